// include/scatloc/signal.hpp

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

#ifndef SCATLOC_SIGNAL_HPP
#define SCATLOC_SIGNAL_HPP

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <limits>
#include <vector>

namespace scatloc {

/// Sampled waveform. Samples are dimensionless amplitudes.
struct TimeSignal {
  std::vector<double> samples;
  int sample_rate = 0;  // Hz, > 0

  std::size_t size() const { return samples.size(); }
  double duration_s() const { return static_cast<double>(samples.size()) / sample_rate; }
  double rms() const;
  double l2_norm() const;
};

/// Complex STFT, one-sided. bins(f, n) is frequency bin f of frame n.
struct ComplexSpectrogram {
  Eigen::MatrixXcd bins;              // F x N
  std::vector<double> freq_axis;      // Hz per bin row, 0 .. sample_rate/2
  int frame_hop = 0;                  // samples
  int window_len = 0;                 // samples
  int sample_rate = 0;

  Eigen::Index num_bins() const { return bins.rows(); }
  Eigen::Index num_frames() const { return bins.cols(); }
};

/// Non-negative magnitude spectrogram.
struct MagSpectrogram {
  Eigen::MatrixXd values;             // F x N, entries >= 0
  std::vector<double> freq_axis;      // Hz per bin row
};

/// Sentinel for "no noise" in add_noise_at_snr.
inline constexpr double kNoNoise = std::numeric_limits<double>::infinity();

/// Full linear convolution; output length len(x) + len(h) - 1.
/// threads > 1 parallelizes over output samples (bit-identical to serial).
TimeSignal convolve(const TimeSignal& x, const std::vector<double>& h, int threads = 1);

/// Add white Gaussian noise scaled so that
/// 20*log10(||clean|| / ||noise||) == snr_db holds exactly for the realized
/// noise vector. snr_db == kNoNoise returns the input unchanged.
TimeSignal add_noise_at_snr(const TimeSignal& clean, double snr_db, std::uint64_t seed);

/// Periodic Hann window of length n: 0.5 - 0.5*cos(2*pi*k/n).
std::vector<double> hann_window(std::size_t n);

/// Hann-windowed one-sided STFT, unnormalized DFT per frame.
///
/// Frames start at multiples of hop. A trailing partial frame is completed by
/// zero padding; a signal shorter than one window yields a single padded
/// frame.
ComplexSpectrogram stft(const TimeSignal& x, int window_len, int hop);

/// Elementwise modulus.
MagSpectrogram magnitude(const ComplexSpectrogram& s);

/// Per-bin mean of |Y|^2 over frames.
Eigen::VectorXd empirical_psd(const ComplexSpectrogram& s);

}  // namespace scatloc

#endif  // SCATLOC_SIGNAL_HPP
