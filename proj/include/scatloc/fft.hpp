// include/scatloc/fft.hpp

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

#ifndef SCATLOC_FFT_HPP
#define SCATLOC_FFT_HPP

#include <complex>
#include <cstddef>
#include <vector>

namespace scatloc::fft {

/// One-sided DFT of a real signal: n/2+1 bins (n even), or (n+1)/2 bins (n odd).
/// Unnormalized, FFTW sign convention (exp(-i 2 pi k n / N)).
std::vector<std::complex<double>> forward_real(const std::vector<double>& in);

/// Inverse of forward_real for even n: takes n/2+1 bins, returns n real samples.
/// Normalized by 1/n, so inverse_real(forward_real(x), n) == x.
std::vector<double> inverse_real(const std::vector<std::complex<double>>& bins, std::size_t n);

}  // namespace scatloc::fft

#endif  // SCATLOC_FFT_HPP
