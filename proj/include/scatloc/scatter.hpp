// include/scatloc/scatter.hpp

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

#ifndef SCATLOC_SCATTER_HPP
#define SCATLOC_SCATTER_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace scatloc {

/// Per-direction magnitude responses |H_d| of a scattering device on the
/// one-sided STFT frequency grid, optionally with time-domain impulse
/// responses for rendering. Immutable after construction.
struct DirectionalResponseSet {
  std::vector<double> azimuths_deg;             // strictly increasing, in [0, 360)
  Eigen::MatrixXd mags;                         // D x F, >= 0
  std::vector<double> freq_axis;                // Hz per bin
  std::vector<std::vector<double>> impulse_responses;  // empty, or one per direction
  std::string label;
  int sample_rate = 0;
  int window_len = 0;                           // analysis window the grid came from

  Eigen::Index num_directions() const { return mags.rows(); }
  Eigen::Index num_bins() const { return mags.cols(); }
  bool has_irs() const { return !impulse_responses.empty(); }

  /// Index of the direction whose azimuth equals `az_deg` (1e-9 tolerance).
  /// Returns -1 if absent.
  Eigen::Index find_azimuth(double az_deg) const;

  /// Throws std::invalid_argument on any violated structural invariant.
  void validate() const;

  /// Max relative deviation between mags and |DFT(zero-pad(ir, window_len))|.
  /// Only meaningful when impulse responses are present.
  double ir_consistency_error() const;
};

/// Contiguous frequency band on a response set's grid.
struct BandSelection {
  double fmin_hz = 0.0;
  double fmax_hz = 0.0;
  std::vector<Eigen::Index> bin_indices;  // bins with fmin <= f <= fmax
};

/// Tuning knobs for the synthetic scatterer generators.
struct ScatterSynthParams {
  double flat_below_hz = 3000.0;    // bins below this are forced to |H| = 1
  double roughness_freq_hz = 75.0;  // correlation length along frequency
  double roughness_dir_deg = 10.0;  // correlation length along direction
  double log_std = 0.5;             // std of the log-magnitude field
};

/// Build a set from measured impulse responses. Magnitudes are taken on the
/// one-sided grid of `window_len`; an IR longer than the window is truncated
/// for the magnitude computation (with a warning on stderr) but kept whole
/// for rendering.
DirectionalResponseSet from_impulse_responses(const std::vector<std::vector<double>>& irs,
                                              const std::vector<double>& azimuths_deg,
                                              int sample_rate, int window_len,
                                              const std::string& label = "measured");

/// Synthesize a strongly scattering device: the log-magnitude over
/// (direction x frequency) is smoothed Gaussian noise with short correlation
/// lengths, flat below `flat_below_hz`. Impulse responses are minimum-phase
/// reconstructions of each |H_d|. Deterministic per seed.
DirectionalResponseSet synth_rough_scatterer(int directions, const std::vector<double>& freq_axis,
                                             double flat_below_hz, double roughness_freq_hz,
                                             double roughness_dir_deg, std::uint64_t seed,
                                             double log_std = 0.5, int sample_rate = 16000);

/// HRTF-like device: same construction with a >= 90 degree direction
/// correlation length, giving near-identical neighboring responses.
DirectionalResponseSet synth_smooth_scatterer(int directions, const std::vector<double>& freq_axis,
                                              std::uint64_t seed, int sample_rate = 16000);

/// One-sided frequency grid for a given window length and sample rate.
std::vector<double> fft_freq_axis(int window_len, int sample_rate);

/// Bins of `freq_axis` with fmin <= f <= fmax. Throws on an empty band.
BandSelection select_band(const std::vector<double>& freq_axis, double fmin_hz, double fmax_hz);

/// Restrict to bins with fmin <= f <= fmax. Impulse responses do not survive
/// band restriction. Throws on an empty band.
std::pair<DirectionalResponseSet, BandSelection> band_select(const DirectionalResponseSet& set,
                                                             double fmin_hz, double fmax_hz);

/// Nearest-neighbor resampling onto a new azimuth grid (used to subsample a
/// fine generation grid down to the model grid).
DirectionalResponseSet interpolate_to_grid(const DirectionalResponseSet& set,
                                           const std::vector<double>& target_azimuths_deg);

// Device files: JSON manifest + raw float64 payload (see container.hpp).
void save_device(const DirectionalResponseSet& set, const std::string& path);
DirectionalResponseSet load_device(const std::string& path);

/// Per-direction magnitude rows as CSV (azimuth column, then one column per
/// frequency bin).
void export_mags_csv(const DirectionalResponseSet& set, const std::string& path);

/// Minimum-phase impulse response of length `n` with the given one-sided
/// magnitude (n/2+1 bins). Magnitude is floored at a tiny positive value.
std::vector<double> minimum_phase_ir(const Eigen::VectorXd& onesided_mag, int n);

}  // namespace scatloc

#endif  // SCATLOC_SCATTER_HPP
