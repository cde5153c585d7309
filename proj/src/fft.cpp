// src/fft.cpp

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

#include "scatloc/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>

namespace scatloc::fft {
namespace {

// FFTW plan creation is not thread safe; new-array execution is. Plans are
// cached per size and created with FFTW_ESTIMATE so the chosen algorithm
// (and hence the bit pattern of the output) does not vary between runs.
std::mutex plan_mutex;

fftw_plan r2c_plan(std::size_t n) {
  static std::map<std::size_t, fftw_plan> cache;
  std::lock_guard<std::mutex> lock(plan_mutex);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  std::vector<double> in(n);
  std::vector<fftw_complex> out(n / 2 + 1);
  fftw_plan p = fftw_plan_dft_r2c_1d(static_cast<int>(n), in.data(), out.data(),
                                     FFTW_ESTIMATE | FFTW_UNALIGNED);
  cache[n] = p;
  return p;
}

fftw_plan c2r_plan(std::size_t n) {
  static std::map<std::size_t, fftw_plan> cache;
  std::lock_guard<std::mutex> lock(plan_mutex);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  std::vector<fftw_complex> in(n / 2 + 1);
  std::vector<double> out(n);
  fftw_plan p = fftw_plan_dft_c2r_1d(static_cast<int>(n), in.data(), out.data(),
                                     FFTW_ESTIMATE | FFTW_UNALIGNED | FFTW_PRESERVE_INPUT);
  cache[n] = p;
  return p;
}

}  // namespace

std::vector<std::complex<double>> forward_real(const std::vector<double>& in) {
  if (in.empty()) throw std::invalid_argument("fft::forward_real: empty input");
  const std::size_t n = in.size();
  std::vector<std::complex<double>> out(n / 2 + 1);
  fftw_plan p = r2c_plan(n);
  // fftw_execute_dft_r2c does not modify the input array for 1-d r2c with
  // separate output, but the signature is non-const; copy to be safe.
  std::vector<double> tmp(in);
  fftw_execute_dft_r2c(p, tmp.data(), reinterpret_cast<fftw_complex*>(out.data()));
  return out;
}

std::vector<double> inverse_real(const std::vector<std::complex<double>>& bins, std::size_t n) {
  if (n == 0 || bins.size() != n / 2 + 1)
    throw std::invalid_argument("fft::inverse_real: bin count does not match n");
  std::vector<std::complex<double>> tmp(bins);
  std::vector<double> out(n);
  fftw_plan p = c2r_plan(n);
  fftw_execute_dft_c2r(p, reinterpret_cast<fftw_complex*>(tmp.data()), out.data());
  for (double& v : out) v /= static_cast<double>(n);
  return out;
}

}  // namespace scatloc::fft
