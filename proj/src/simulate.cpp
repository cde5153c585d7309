// src/simulate.cpp

// Copyright 2026 The scatloc authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "scatloc/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "scatloc/fft.hpp"
#include "scatloc/rng.hpp"

namespace scatloc {
namespace {

TimeSignal make_white(std::size_t n, int sample_rate, Rng& rng) {
  TimeSignal s;
  s.sample_rate = sample_rate;
  s.samples.resize(n);
  for (double& v : s.samples) v = rng.gaussian();
  return s;
}

constexpr int kEnvelopePoints = 10;
constexpr int kVoicedPhones = 4;
constexpr int kPhoneCount = 6;  // 4 voiced + 2 fricative-like

std::vector<double> random_ctrl(std::uint64_t seed, double sigma) {
  Rng rng(seed);
  std::vector<double> ctrl(kEnvelopePoints);
  for (double& c : ctrl) c = sigma * rng.gaussian();
  return ctrl;
}

/// Shared phone inventory: archetype spectral envelopes common to every
/// speaker, the "language" the universal model can cover. Individual voices
/// perturb these.
const std::vector<std::vector<double>>& phone_archetypes() {
  static const std::vector<std::vector<double>> inventory = [] {
    std::vector<std::vector<double>> v;
    for (int p = 0; p < kPhoneCount; ++p)
      v.push_back(random_ctrl(0xA5C11 + static_cast<std::uint64_t>(p), 1.0));
    return v;
  }();
  return inventory;
}

double envelope_at(const std::vector<double>& ctrl, double f_hz, double nyquist) {
  const double pos = std::clamp(f_hz / nyquist, 0.0, 1.0) *
                     (static_cast<double>(ctrl.size()) - 1.0);
  const std::size_t i0 = std::min(static_cast<std::size_t>(pos), ctrl.size() - 2);
  const double frac = pos - static_cast<double>(i0);
  const double w = 0.5 - 0.5 * std::cos(std::numbers::pi * frac);
  return std::exp((1.0 - w) * ctrl[i0] + w * ctrl[i0 + 1]);
}

/// White noise shaped to the envelope, unit average power.
std::vector<double> shaped_noise(std::size_t len, const std::vector<double>& ctrl,
                                 double nyquist, int sample_rate, Rng& rng) {
  const std::size_t n_even = len + (len % 2);
  std::vector<double> white(n_even);
  for (double& v : white) v = rng.gaussian();
  auto spec = fft::forward_real(white);
  for (std::size_t k = 0; k < spec.size(); ++k)
    spec[k] *= envelope_at(
        ctrl, static_cast<double>(k) * sample_rate / static_cast<double>(n_even), nyquist);
  std::vector<double> out = fft::inverse_real(spec, n_even);
  out.resize(len);
  double power = 0.0;
  for (double v : out) power += v * v;
  power /= static_cast<double>(std::max<std::size_t>(len, 1));
  if (power > 0.0)
    for (double& v : out) v /= std::sqrt(power);
  return out;
}

// Voiced-speech stand-in: a random sequence of phone segments. Voiced phones
// are harmonics of a slowly gliding f0 with a per-octave rolloff, shaped by
// the phone's envelope plus a fixed per-voice perturbation, with co-shaped
// aspiration noise; fricative-like phones are envelope-shaped noise alone.
// Everything rides a syllabic amplitude modulation. The voice (envelope
// perturbation) is pinned by voice_seed, the realization by seed.
TimeSignal make_harmonic_speaker(const SourceSpec& spec, std::size_t n, int sample_rate,
                                 Rng& rng) {
  const double nyquist = sample_rate / 2.0;
  const int harmonics =
      std::max(1, static_cast<int>(std::floor(0.95 * nyquist / spec.f0_hz)));
  const auto voice_pert = random_ctrl(spec.voice_seed, 0.25);

  std::vector<double> phase(static_cast<std::size_t>(harmonics));
  for (double& p : phase) p = rng.uniform(0.0, 2.0 * std::numbers::pi);
  const double glide_phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
  const double am_rate = rng.uniform(2.0, 4.0);
  const double am_phase = rng.uniform(0.0, 2.0 * std::numbers::pi);

  TimeSignal s;
  s.sample_rate = sample_rate;
  s.samples.assign(n, 0.0);
  const double dt = 1.0 / sample_rate;

  std::vector<double> amp(static_cast<std::size_t>(harmonics));
  std::vector<double> env_ctrl(kEnvelopePoints);
  std::size_t at = 0;
  while (at < n) {
    const int phone = static_cast<int>(rng.integer(kPhoneCount));
    const bool voiced = phone < kVoicedPhones;
    std::size_t seg = static_cast<std::size_t>(rng.uniform(0.12, 0.25) * sample_rate);
    seg = std::min(seg, n - at);

    const auto& arch = phone_archetypes()[static_cast<std::size_t>(phone)];
    for (int i = 0; i < kEnvelopePoints; ++i)
      env_ctrl[static_cast<std::size_t>(i)] =
          arch[static_cast<std::size_t>(i)] + voice_pert[static_cast<std::size_t>(i)];

    double harm_power = 0.0;
    for (int k = 0; k < harmonics; ++k) {
      amp[static_cast<std::size_t>(k)] =
          std::pow(10.0, -spec.tilt_db_per_oct * std::log2(k + 1.0) / 20.0) *
          envelope_at(env_ctrl, (k + 1.0) * spec.f0_hz, nyquist);
      harm_power += 0.5 * amp[static_cast<std::size_t>(k)] * amp[static_cast<std::size_t>(k)];
    }
    const std::vector<double> noise = shaped_noise(seg, env_ctrl, nyquist, sample_rate, rng);
    // Aspiration under voiced phones, the entire segment when fricative.
    const double noise_gain =
        voiced ? 0.08 * std::sqrt(harm_power) : 0.6 * std::sqrt(harm_power);

    for (std::size_t i = 0; i < seg; ++i) {
      const double t = static_cast<double>(at + i) * dt;
      const double f0 = spec.f0_hz * (1.0 + 0.08 * std::sin(2.0 * std::numbers::pi * 0.8 * t +
                                                            glide_phase));
      const double env =
          0.4 + 0.6 * (0.5 + 0.5 * std::sin(2.0 * std::numbers::pi * am_rate * t + am_phase));
      double acc = 0.0;
      if (voiced) {
        for (int k = 0; k < harmonics; ++k) {
          phase[static_cast<std::size_t>(k)] +=
              2.0 * std::numbers::pi * (k + 1.0) * f0 * dt;
          acc += amp[static_cast<std::size_t>(k)] * std::sin(phase[static_cast<std::size_t>(k)]);
        }
      }
      s.samples[at + i] = env * (acc + noise_gain * noise[i]) + 0.002 * rng.gaussian();
    }
    at += seg;
  }
  return s;
}

// White noise shaped by a fixed random magnitude envelope, piecewise linear
// in log amplitude over 24 control points.
TimeSignal make_prototype_colored(std::size_t n, int sample_rate, Rng& rng) {
  constexpr int kControlPoints = 24;
  std::vector<double> ctrl(kControlPoints);
  for (double& c : ctrl) c = rng.gaussian();

  TimeSignal noise = make_white(n + (n % 2), sample_rate, rng);
  auto spec = fft::forward_real(noise.samples);
  const std::size_t bins = spec.size();
  for (std::size_t k = 0; k < bins; ++k) {
    const double pos =
        static_cast<double>(k) / static_cast<double>(bins - 1) * (kControlPoints - 1);
    const int i0 = std::min(static_cast<int>(pos), kControlPoints - 2);
    const double frac = pos - i0;
    const double logmag = (1.0 - frac) * ctrl[static_cast<std::size_t>(i0)] +
                          frac * ctrl[static_cast<std::size_t>(i0 + 1)];
    spec[k] *= std::exp(logmag);
  }
  TimeSignal s;
  s.sample_rate = sample_rate;
  s.samples = fft::inverse_real(spec, noise.samples.size());
  s.samples.resize(n);
  return s;
}

}  // namespace

TimeSignal make_source(const SourceSpec& spec, int sample_rate) {
  if (spec.duration_s <= 0.0) throw std::invalid_argument("make_source: duration must be > 0");
  const std::size_t n =
      static_cast<std::size_t>(std::llround(spec.duration_s * sample_rate));
  Rng rng(spec.seed);
  switch (spec.kind) {
    case SourceSpec::Kind::kWhite:
      return make_white(n, sample_rate, rng);
    case SourceSpec::Kind::kHarmonicSpeaker:
      return make_harmonic_speaker(spec, n, sample_rate, rng);
    case SourceSpec::Kind::kPrototypeColored:
      return make_prototype_colored(n, sample_rate, rng);
  }
  throw std::invalid_argument("make_source: unknown kind");
}

TimeSignal render_mixture(const Scene& scene, const DirectionalResponseSet& fine_responses,
                          int threads) {
  if (scene.sources.empty()) throw std::invalid_argument("render_mixture: empty scene");
  if (!fine_responses.has_irs())
    throw std::invalid_argument("render_mixture: fine responses lack impulse responses");

  std::size_t shortest = SIZE_MAX;
  for (const auto& [az, sig] : scene.sources) shortest = std::min(shortest, sig.size());
  if (shortest == 0) throw std::invalid_argument("render_mixture: empty source signal");

  TimeSignal clean;
  clean.sample_rate = scene.sources.front().second.sample_rate;
  for (const auto& [az, sig] : scene.sources) {
    if (sig.sample_rate != clean.sample_rate)
      throw std::invalid_argument("render_mixture: mixed sample rates");
    const Eigen::Index d = fine_responses.find_azimuth(az);
    if (d < 0)
      throw std::invalid_argument("render_mixture: azimuth not on the fine grid: " +
                                  std::to_string(az));

    TimeSignal s;
    s.sample_rate = sig.sample_rate;
    s.samples.assign(sig.samples.begin(),
                     sig.samples.begin() + static_cast<std::ptrdiff_t>(shortest));
    double peak = 0.0;
    for (double v : s.samples) peak = std::max(peak, std::abs(v));
    if (peak == 0.0) throw std::invalid_argument("render_mixture: all-zero source");
    for (double& v : s.samples) v /= peak;

    const TimeSignal contrib =
        convolve(s, fine_responses.impulse_responses[static_cast<std::size_t>(d)], threads);
    if (clean.samples.size() < contrib.samples.size())
      clean.samples.resize(contrib.samples.size(), 0.0);
    for (std::size_t i = 0; i < contrib.samples.size(); ++i)
      clean.samples[i] += contrib.samples[i];
  }
  return add_noise_at_snr(clean, scene.snr_db, derive_seed(scene.seed, 0x6e6f6973));
}

Scene random_scene(int num_sources, int fine_directions, const std::vector<SourceSpec>& pool,
                   double snr_db, std::uint64_t seed, int sample_rate, bool reseed_sources) {
  if (num_sources < 1) throw std::invalid_argument("random_scene: need at least one source");
  if (num_sources > fine_directions)
    throw std::invalid_argument("random_scene: more sources than grid directions");
  if (pool.empty()) throw std::invalid_argument("random_scene: empty source pool");

  Rng rng(seed);
  const auto dir_idx = rng.sample_without_replacement(static_cast<std::size_t>(fine_directions),
                                                      static_cast<std::size_t>(num_sources));

  std::vector<std::size_t> pool_idx;
  if (!reseed_sources && pool.size() >= static_cast<std::size_t>(num_sources)) {
    pool_idx = rng.sample_without_replacement(pool.size(), static_cast<std::size_t>(num_sources));
  } else {
    for (int j = 0; j < num_sources; ++j)
      pool_idx.push_back(static_cast<std::size_t>(rng.integer(pool.size())));
  }

  Scene scene;
  scene.snr_db = snr_db;
  scene.seed = seed;
  const double step = 360.0 / fine_directions;
  for (int j = 0; j < num_sources; ++j) {
    SourceSpec spec = pool[pool_idx[static_cast<std::size_t>(j)]];
    if (reseed_sources) spec.seed = derive_seed(seed, static_cast<std::uint64_t>(j) + 1);
    scene.sources.emplace_back(step * static_cast<double>(dir_idx[static_cast<std::size_t>(j)]),
                               make_source(spec, sample_rate));
  }
  return scene;
}

std::vector<SourceSpec> make_speaker_pool(int num_female, int num_male, double duration_s,
                                          std::uint64_t seed) {
  Rng rng(seed);
  std::vector<SourceSpec> pool;
  pool.reserve(static_cast<std::size_t>(num_female + num_male));
  for (int i = 0; i < num_female + num_male; ++i) {
    const bool female = i < num_female;
    SourceSpec s;
    s.kind = SourceSpec::Kind::kHarmonicSpeaker;
    s.duration_s = duration_s;
    s.f0_hz = female ? rng.uniform(165.0, 255.0) : rng.uniform(85.0, 155.0);
    s.tilt_db_per_oct = female ? rng.uniform(4.0, 6.5) : rng.uniform(7.0, 9.5);
    s.seed = derive_seed(seed, static_cast<std::uint64_t>(i) + 101);
    s.voice_seed = derive_seed(seed, static_cast<std::uint64_t>(i) + 501);
    pool.push_back(s);
  }
  return pool;
}

std::string to_string(SourceSpec::Kind kind) {
  switch (kind) {
    case SourceSpec::Kind::kWhite: return "white";
    case SourceSpec::Kind::kPrototypeColored: return "prototype-colored";
    case SourceSpec::Kind::kHarmonicSpeaker: return "harmonic-speaker";
  }
  return "unknown";
}

SourceSpec::Kind source_kind_from_string(const std::string& s) {
  if (s == "white") return SourceSpec::Kind::kWhite;
  if (s == "prototype-colored") return SourceSpec::Kind::kPrototypeColored;
  if (s == "harmonic-speaker") return SourceSpec::Kind::kHarmonicSpeaker;
  throw std::invalid_argument("unknown source kind: " + s);
}

}  // namespace scatloc
