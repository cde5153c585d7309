// src/signal.cpp

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

#include "scatloc/signal.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "scatloc/fft.hpp"
#include "scatloc/rng.hpp"

namespace scatloc {

double TimeSignal::l2_norm() const {
  double s = 0.0;
  for (double v : samples) s += v * v;
  return std::sqrt(s);
}

double TimeSignal::rms() const {
  if (samples.empty()) return 0.0;
  return l2_norm() / std::sqrt(static_cast<double>(samples.size()));
}

TimeSignal convolve(const TimeSignal& x, const std::vector<double>& h, int threads) {
  if (x.samples.empty() || h.empty())
    throw std::invalid_argument("convolve: empty input");
  const std::ptrdiff_t nx = static_cast<std::ptrdiff_t>(x.samples.size());
  const std::ptrdiff_t nh = static_cast<std::ptrdiff_t>(h.size());
  TimeSignal y;
  y.sample_rate = x.sample_rate;
  y.samples.assign(static_cast<std::size_t>(nx + nh - 1), 0.0);
  const double* xs = x.samples.data();
  const double* hs = h.data();
  double* ys = y.samples.data();
  const std::ptrdiff_t ny = nx + nh - 1;

  // Scatter-add over fixed output chunks: the inner loop over k writes
  // consecutive outputs (vectorizable without reassociating any sum), each
  // output belongs to exactly one chunk, and its contributions arrive in
  // ascending input order whatever the thread count.
  constexpr std::ptrdiff_t kChunk = 4096;
  const std::ptrdiff_t chunks = (ny + kChunk - 1) / kChunk;
#pragma omp parallel for schedule(static) num_threads(threads) if (threads > 1)
  for (std::ptrdiff_t c = 0; c < chunks; ++c) {
    const std::ptrdiff_t c0 = c * kChunk;
    const std::ptrdiff_t c1 = std::min(c0 + kChunk, ny);
    const std::ptrdiff_t i0 = std::max<std::ptrdiff_t>(0, c0 - nh + 1);
    const std::ptrdiff_t i1 = std::min(nx, c1);
    for (std::ptrdiff_t i = i0; i < i1; ++i) {
      const std::ptrdiff_t k0 = std::max<std::ptrdiff_t>(0, c0 - i);
      const std::ptrdiff_t k1 = std::min(nh, c1 - i);
      const double xi = xs[i];
      for (std::ptrdiff_t k = k0; k < k1; ++k) ys[i + k] += xi * hs[k];
    }
  }
  return y;
}

TimeSignal add_noise_at_snr(const TimeSignal& clean, double snr_db, std::uint64_t seed) {
  if (snr_db == kNoNoise) return clean;
  const double clean_norm = clean.l2_norm();
  if (clean_norm == 0.0)
    throw std::invalid_argument("add_noise_at_snr: SNR undefined for all-zero signal");
  Rng rng(seed);
  std::vector<double> e(clean.samples.size());
  double e_sq = 0.0;
  for (double& v : e) {
    v = rng.gaussian();
    e_sq += v * v;
  }
  const double e_norm = std::sqrt(e_sq);
  // ||alpha * e|| == ||clean|| / 10^(snr/20) by construction.
  const double alpha = clean_norm / (e_norm * std::pow(10.0, snr_db / 20.0));
  TimeSignal out = clean;
  for (std::size_t i = 0; i < out.samples.size(); ++i) out.samples[i] += alpha * e[i];
  return out;
}

std::vector<double> hann_window(std::size_t n) {
  std::vector<double> w(n);
  for (std::size_t k = 0; k < n; ++k)
    w[k] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(k) /
                                static_cast<double>(n));
  return w;
}

ComplexSpectrogram stft(const TimeSignal& x, int window_len, int hop) {
  if (window_len <= 0 || window_len % 2 != 0)
    throw std::invalid_argument("stft: window_len must be positive and even");
  if (hop <= 0 || hop > window_len)
    throw std::invalid_argument("stft: hop must be in (0, window_len]");
  if (x.sample_rate <= 0) throw std::invalid_argument("stft: sample_rate must be positive");

  const std::size_t len = x.samples.size();
  const std::size_t wl = static_cast<std::size_t>(window_len);
  std::size_t frames = 1;
  if (len > wl)
    frames = (len - wl + static_cast<std::size_t>(hop) - 1) / static_cast<std::size_t>(hop) + 1;

  const std::size_t F = wl / 2 + 1;
  const std::vector<double> w = hann_window(wl);

  ComplexSpectrogram s;
  s.bins.resize(static_cast<Eigen::Index>(F), static_cast<Eigen::Index>(frames));
  s.frame_hop = hop;
  s.window_len = window_len;
  s.sample_rate = x.sample_rate;
  s.freq_axis.resize(F);
  for (std::size_t k = 0; k < F; ++k)
    s.freq_axis[k] =
        static_cast<double>(k) * x.sample_rate / static_cast<double>(window_len);

  std::vector<double> frame(wl);
  for (std::size_t m = 0; m < frames; ++m) {
    const std::size_t start = m * static_cast<std::size_t>(hop);
    for (std::size_t k = 0; k < wl; ++k) {
      const std::size_t idx = start + k;
      frame[k] = idx < len ? w[k] * x.samples[idx] : 0.0;
    }
    const auto spec = fft::forward_real(frame);
    for (std::size_t k = 0; k < F; ++k)
      s.bins(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(m)) = spec[k];
  }
  return s;
}

MagSpectrogram magnitude(const ComplexSpectrogram& s) {
  MagSpectrogram m;
  m.values = s.bins.cwiseAbs();
  m.freq_axis = s.freq_axis;
  return m;
}

Eigen::VectorXd empirical_psd(const ComplexSpectrogram& s) {
  if (s.num_frames() < 1) throw std::invalid_argument("empirical_psd: no frames");
  return s.bins.cwiseAbs2().rowwise().mean();
}

}  // namespace scatloc
