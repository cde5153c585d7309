// src/scatter.cpp

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

#include "scatloc/scatter.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "scatloc/container.hpp"
#include "scatloc/fft.hpp"
#include "scatloc/rng.hpp"

namespace scatloc {
namespace {

double circular_distance_deg(double a, double b) {
  double d = std::fmod(a - b, 360.0);
  if (d < 0) d += 360.0;
  return std::min(d, 360.0 - d);
}

std::vector<double> gaussian_kernel(double sigma, int radius) {
  std::vector<double> k(2 * radius + 1);
  for (int i = -radius; i <= radius; ++i)
    k[static_cast<std::size_t>(i + radius)] = std::exp(-0.5 * (i / sigma) * (i / sigma));
  return k;
}

// Circular smoothing along rows (direction axis).
Eigen::MatrixXd smooth_rows_circular(const Eigen::MatrixXd& g, double sigma) {
  const Eigen::Index d = g.rows();
  if (sigma <= 0.0) return g;
  if (sigma >= 2.0 * static_cast<double>(d)) {
    // Limit case: kernel much wider than the circle -> uniform average.
    Eigen::MatrixXd out(d, g.cols());
    out.rowwise() = g.colwise().mean();
    return out;
  }
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  const auto k = gaussian_kernel(sigma, radius);
  const double ksum = std::accumulate(k.begin(), k.end(), 0.0);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(d, g.cols());
  for (Eigen::Index i = 0; i < d; ++i) {
    for (int o = -radius; o <= radius; ++o) {
      Eigen::Index j = (i + o) % d;
      if (j < 0) j += d;
      out.row(i) += (k[static_cast<std::size_t>(o + radius)] / ksum) * g.row(j);
    }
  }
  return out;
}

// Truncated-kernel smoothing along columns (frequency axis), renormalized at
// the edges.
Eigen::MatrixXd smooth_cols(const Eigen::MatrixXd& g, double sigma) {
  const Eigen::Index f = g.cols();
  if (sigma <= 0.0) return g;
  if (sigma >= 2.0 * static_cast<double>(f)) {
    Eigen::MatrixXd out(g.rows(), f);
    out.colwise() = g.rowwise().mean();
    return out;
  }
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  const auto k = gaussian_kernel(sigma, radius);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(g.rows(), f);
  for (Eigen::Index j = 0; j < f; ++j) {
    double wsum = 0.0;
    for (int o = -radius; o <= radius; ++o) {
      const Eigen::Index c = j + o;
      if (c < 0 || c >= f) continue;
      const double w = k[static_cast<std::size_t>(o + radius)];
      out.col(j) += w * g.col(c);
      wsum += w;
    }
    out.col(j) /= wsum;
  }
  return out;
}

DirectionalResponseSet synth_scatterer(int directions, const std::vector<double>& freq_axis,
                                       const ScatterSynthParams& p, std::uint64_t seed,
                                       int sample_rate, const std::string& label) {
  if (directions < 1) throw std::invalid_argument("synth_scatterer: need directions >= 1");
  if (freq_axis.size() < 2) throw std::invalid_argument("synth_scatterer: bad freq_axis");
  if (p.flat_below_hz < 0.0 || p.flat_below_hz >= freq_axis.back())
    throw std::invalid_argument("synth_scatterer: flat_below_hz outside grid");

  const Eigen::Index d = directions;
  const Eigen::Index f = static_cast<Eigen::Index>(freq_axis.size());
  const double df = freq_axis[1] - freq_axis[0];
  const double deg_per_dir = 360.0 / directions;

  Rng rng(seed);
  Eigen::MatrixXd field(d, f);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < f; ++j) field(i, j) = rng.gaussian();

  field = smooth_rows_circular(field, p.roughness_dir_deg / deg_per_dir);
  field = smooth_cols(field, p.roughness_freq_hz / df);

  // Smoothing shrinks the variance; restore the requested log std. A field
  // that is constant up to rounding (the infinite-roughness limit) is left
  // alone, otherwise rescaling would blow the rounding noise up to log_std.
  const double mean = field.mean();
  const double sd = std::sqrt((field.array() - mean).square().mean());
  if (sd > 1e-9 * std::max(1.0, std::abs(mean)))
    field = ((field.array() - mean) / sd * p.log_std).matrix();
  else
    field.setConstant(mean);

  DirectionalResponseSet set;
  set.label = label;
  set.sample_rate = sample_rate;
  set.window_len = 2 * static_cast<int>(f - 1);
  set.freq_axis = freq_axis;
  set.azimuths_deg.resize(static_cast<std::size_t>(d));
  for (Eigen::Index i = 0; i < d; ++i)
    set.azimuths_deg[static_cast<std::size_t>(i)] = deg_per_dir * static_cast<double>(i);

  set.mags = field.array().exp().matrix();
  for (Eigen::Index j = 0; j < f; ++j)
    if (freq_axis[static_cast<std::size_t>(j)] < p.flat_below_hz) set.mags.col(j).setOnes();

  set.impulse_responses.resize(static_cast<std::size_t>(d));
  for (Eigen::Index i = 0; i < d; ++i)
    set.impulse_responses[static_cast<std::size_t>(i)] =
        minimum_phase_ir(set.mags.row(i).transpose(), set.window_len);
  set.validate();
  return set;
}

}  // namespace

Eigen::Index DirectionalResponseSet::find_azimuth(double az_deg) const {
  for (std::size_t i = 0; i < azimuths_deg.size(); ++i)
    if (std::abs(azimuths_deg[i] - az_deg) < 1e-9) return static_cast<Eigen::Index>(i);
  return -1;
}

void DirectionalResponseSet::validate() const {
  if (azimuths_deg.empty()) throw std::invalid_argument("response set: no directions");
  if (mags.rows() != static_cast<Eigen::Index>(azimuths_deg.size()))
    throw std::invalid_argument("response set: mags rows != azimuth count");
  if (mags.cols() != static_cast<Eigen::Index>(freq_axis.size()))
    throw std::invalid_argument("response set: mags cols != freq axis length");
  for (std::size_t i = 0; i < azimuths_deg.size(); ++i) {
    if (azimuths_deg[i] < 0.0 || azimuths_deg[i] >= 360.0)
      throw std::invalid_argument("response set: azimuth outside [0, 360)");
    if (i > 0 && azimuths_deg[i] <= azimuths_deg[i - 1])
      throw std::invalid_argument("response set: azimuths not strictly increasing");
  }
  if (!mags.allFinite() || (mags.array() < 0.0).any())
    throw std::invalid_argument("response set: magnitudes must be finite and >= 0");
  if (!impulse_responses.empty() && impulse_responses.size() != azimuths_deg.size())
    throw std::invalid_argument("response set: impulse response count mismatch");
}

double DirectionalResponseSet::ir_consistency_error() const {
  if (!has_irs()) return 0.0;
  double worst = 0.0;
  for (Eigen::Index i = 0; i < num_directions(); ++i) {
    const auto& ir = impulse_responses[static_cast<std::size_t>(i)];
    std::vector<double> padded(static_cast<std::size_t>(window_len), 0.0);
    const std::size_t n = std::min(ir.size(), padded.size());
    std::copy(ir.begin(), ir.begin() + static_cast<std::ptrdiff_t>(n), padded.begin());
    const auto spec = fft::forward_real(padded);
    for (Eigen::Index j = 0; j < num_bins(); ++j) {
      const double ref = mags(i, j);
      const double got = std::abs(spec[static_cast<std::size_t>(j)]);
      const double denom = std::max(ref, 1e-30);
      worst = std::max(worst, std::abs(got - ref) / denom);
    }
  }
  return worst;
}

DirectionalResponseSet from_impulse_responses(const std::vector<std::vector<double>>& irs,
                                              const std::vector<double>& azimuths_deg,
                                              int sample_rate, int window_len,
                                              const std::string& label) {
  if (irs.empty() || irs.size() != azimuths_deg.size())
    throw std::invalid_argument("from_impulse_responses: size mismatch");
  if (window_len <= 0 || window_len % 2 != 0)
    throw std::invalid_argument("from_impulse_responses: bad window_len");

  const std::size_t f = static_cast<std::size_t>(window_len) / 2 + 1;
  DirectionalResponseSet set;
  set.label = label;
  set.sample_rate = sample_rate;
  set.window_len = window_len;
  set.azimuths_deg = azimuths_deg;
  set.freq_axis = fft_freq_axis(window_len, sample_rate);
  set.mags.resize(static_cast<Eigen::Index>(irs.size()), static_cast<Eigen::Index>(f));
  set.impulse_responses = irs;

  for (std::size_t d = 0; d < irs.size(); ++d) {
    if (irs[d].size() > static_cast<std::size_t>(window_len))
      std::cerr << "warning: impulse response " << d << " is longer than the analysis window ("
                << irs[d].size() << " > " << window_len
                << "); narrowband approximation degraded\n";
    std::vector<double> padded(static_cast<std::size_t>(window_len), 0.0);
    const std::size_t n = std::min(irs[d].size(), padded.size());
    std::copy(irs[d].begin(), irs[d].begin() + static_cast<std::ptrdiff_t>(n), padded.begin());
    const auto spec = fft::forward_real(padded);
    for (std::size_t k = 0; k < f; ++k)
      set.mags(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(k)) = std::abs(spec[k]);
  }
  set.validate();
  return set;
}

std::vector<double> fft_freq_axis(int window_len, int sample_rate) {
  const std::size_t f = static_cast<std::size_t>(window_len) / 2 + 1;
  std::vector<double> axis(f);
  for (std::size_t k = 0; k < f; ++k)
    axis[k] = static_cast<double>(k) * sample_rate / static_cast<double>(window_len);
  return axis;
}

DirectionalResponseSet synth_rough_scatterer(int directions, const std::vector<double>& freq_axis,
                                             double flat_below_hz, double roughness_freq_hz,
                                             double roughness_dir_deg, std::uint64_t seed,
                                             double log_std, int sample_rate) {
  ScatterSynthParams p;
  p.flat_below_hz = flat_below_hz;
  p.roughness_freq_hz = roughness_freq_hz;
  p.roughness_dir_deg = roughness_dir_deg;
  p.log_std = log_std;
  return synth_scatterer(directions, freq_axis, p, seed, sample_rate, "rough-synth");
}

DirectionalResponseSet synth_smooth_scatterer(int directions, const std::vector<double>& freq_axis,
                                              std::uint64_t seed, int sample_rate) {
  ScatterSynthParams p;
  p.flat_below_hz = 300.0;
  p.roughness_freq_hz = 500.0;
  p.roughness_dir_deg = 120.0;  // >= 90 deg: adjacent responses nearly identical
  p.log_std = 1.0;
  return synth_scatterer(directions, freq_axis, p, seed, sample_rate, "smooth-synth");
}

BandSelection select_band(const std::vector<double>& freq_axis, double fmin_hz, double fmax_hz) {
  if (fmin_hz > fmax_hz) throw std::invalid_argument("select_band: fmin > fmax");
  BandSelection band;
  band.fmin_hz = fmin_hz;
  band.fmax_hz = fmax_hz;
  for (std::size_t k = 0; k < freq_axis.size(); ++k)
    if (freq_axis[k] >= fmin_hz && freq_axis[k] <= fmax_hz)
      band.bin_indices.push_back(static_cast<Eigen::Index>(k));
  if (band.bin_indices.empty())
    throw std::invalid_argument("select_band: no bins in requested band");
  return band;
}

std::pair<DirectionalResponseSet, BandSelection> band_select(const DirectionalResponseSet& set,
                                                             double fmin_hz, double fmax_hz) {
  BandSelection band = select_band(set.freq_axis, fmin_hz, fmax_hz);
  DirectionalResponseSet r;
  r.label = set.label;
  r.sample_rate = set.sample_rate;
  r.window_len = set.window_len;
  r.azimuths_deg = set.azimuths_deg;
  r.mags.resize(set.num_directions(), static_cast<Eigen::Index>(band.bin_indices.size()));
  r.freq_axis.reserve(band.bin_indices.size());
  for (std::size_t j = 0; j < band.bin_indices.size(); ++j) {
    r.mags.col(static_cast<Eigen::Index>(j)) = set.mags.col(band.bin_indices[j]);
    r.freq_axis.push_back(set.freq_axis[static_cast<std::size_t>(band.bin_indices[j])]);
  }
  return {std::move(r), std::move(band)};
}

DirectionalResponseSet interpolate_to_grid(const DirectionalResponseSet& set,
                                           const std::vector<double>& target_azimuths_deg) {
  DirectionalResponseSet r;
  r.label = set.label;
  r.sample_rate = set.sample_rate;
  r.window_len = set.window_len;
  r.freq_axis = set.freq_axis;
  r.azimuths_deg = target_azimuths_deg;
  r.mags.resize(static_cast<Eigen::Index>(target_azimuths_deg.size()), set.num_bins());
  if (set.has_irs()) r.impulse_responses.resize(target_azimuths_deg.size());

  for (std::size_t t = 0; t < target_azimuths_deg.size(); ++t) {
    std::size_t best = 0;
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t d = 0; d < set.azimuths_deg.size(); ++d) {
      const double dist = circular_distance_deg(target_azimuths_deg[t], set.azimuths_deg[d]);
      if (dist < best_dist) {
        best_dist = dist;
        best = d;
      }
    }
    r.mags.row(static_cast<Eigen::Index>(t)) = set.mags.row(static_cast<Eigen::Index>(best));
    if (set.has_irs()) r.impulse_responses[t] = set.impulse_responses[best];
  }
  r.validate();
  return r;
}

void save_device(const DirectionalResponseSet& set, const std::string& path) {
  nlohmann::ordered_json manifest;
  manifest["kind"] = "device";
  manifest["label"] = set.label;
  manifest["sample_rate"] = set.sample_rate;
  manifest["window_len"] = set.window_len;
  manifest["azimuths_deg"] = set.azimuths_deg;
  manifest["freq_axis"] = set.freq_axis;
  manifest["has_irs"] = set.has_irs();

  Eigen::MatrixXd irs;
  std::vector<std::pair<std::string, const Eigen::MatrixXd*>> mats = {{"mags", &set.mags}};
  if (set.has_irs()) {
    std::size_t ir_len = 0;
    for (const auto& ir : set.impulse_responses) ir_len = std::max(ir_len, ir.size());
    irs = Eigen::MatrixXd::Zero(set.num_directions(), static_cast<Eigen::Index>(ir_len));
    for (Eigen::Index d = 0; d < set.num_directions(); ++d) {
      const auto& ir = set.impulse_responses[static_cast<std::size_t>(d)];
      for (std::size_t k = 0; k < ir.size(); ++k)
        irs(d, static_cast<Eigen::Index>(k)) = ir[k];
    }
    mats.emplace_back("irs", &irs);
  }
  write_container(path, std::move(manifest), mats);
}

DirectionalResponseSet load_device(const std::string& path) {
  Container c = read_container(path);
  if (c.manifest.value("kind", "") != "device")
    throw std::runtime_error("load_device: not a device file: " + path);
  DirectionalResponseSet set;
  set.label = c.manifest.value("label", "");
  set.sample_rate = c.manifest["sample_rate"];
  set.window_len = c.manifest["window_len"];
  set.azimuths_deg = c.manifest["azimuths_deg"].get<std::vector<double>>();
  set.freq_axis = c.manifest["freq_axis"].get<std::vector<double>>();
  set.mags = c.matrices.at("mags");
  if (c.manifest.value("has_irs", false)) {
    const Eigen::MatrixXd& irs = c.matrices.at("irs");
    set.impulse_responses.resize(static_cast<std::size_t>(irs.rows()));
    for (Eigen::Index d = 0; d < irs.rows(); ++d) {
      auto& ir = set.impulse_responses[static_cast<std::size_t>(d)];
      ir.resize(static_cast<std::size_t>(irs.cols()));
      for (Eigen::Index k = 0; k < irs.cols(); ++k) ir[static_cast<std::size_t>(k)] = irs(d, k);
    }
  }
  set.validate();
  return set;
}

void export_mags_csv(const DirectionalResponseSet& set, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("export_mags_csv: cannot open " + path);
  f << "azimuth_deg";
  for (double hz : set.freq_axis) f << ',' << hz;
  f << '\n';
  for (Eigen::Index d = 0; d < set.num_directions(); ++d) {
    f << set.azimuths_deg[static_cast<std::size_t>(d)];
    for (Eigen::Index k = 0; k < set.num_bins(); ++k) f << ',' << set.mags(d, k);
    f << '\n';
  }
}

std::vector<double> minimum_phase_ir(const Eigen::VectorXd& onesided_mag, int n) {
  if (n <= 0 || n % 2 != 0) throw std::invalid_argument("minimum_phase_ir: n must be even");
  const std::size_t f = static_cast<std::size_t>(n) / 2 + 1;
  if (static_cast<std::size_t>(onesided_mag.size()) != f)
    throw std::invalid_argument("minimum_phase_ir: magnitude bin count != n/2+1");

  // Real cepstrum of log|H| (symmetric spectrum -> real even cepstrum).
  std::vector<std::complex<double>> logmag(f);
  for (std::size_t k = 0; k < f; ++k)
    logmag[k] = std::log(std::max(onesided_mag(static_cast<Eigen::Index>(k)), 1e-12));
  std::vector<double> cep = fft::inverse_real(logmag, static_cast<std::size_t>(n));

  // Fold the anticausal half onto the causal half; the spectrum of the folded
  // cepstrum has the original log magnitude as its real part and the minimum
  // phase as its imaginary part.
  std::vector<double> folded(static_cast<std::size_t>(n), 0.0);
  folded[0] = cep[0];
  for (std::size_t k = 1; k < static_cast<std::size_t>(n) / 2; ++k) folded[k] = 2.0 * cep[k];
  folded[static_cast<std::size_t>(n) / 2] = cep[static_cast<std::size_t>(n) / 2];

  auto log_hmin = fft::forward_real(folded);
  std::vector<std::complex<double>> hmin(f);
  for (std::size_t k = 0; k < f; ++k) hmin[k] = std::exp(log_hmin[k]);
  return fft::inverse_real(hmin, static_cast<std::size_t>(n));
}

}  // namespace scatloc
