// tools/bench_kernels.cpp

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

// Times the parallel kernels against the serial path and the scalar
// reference implementations, and verifies that the parallel results are
// bit-identical to serial.

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <functional>

#include "scatloc/reference.hpp"
#include "scatloc/rng.hpp"
#include "scatloc/whiteloc.hpp"

using namespace scatloc;

namespace {

double time_s(const std::function<void()>& fn, int reps) {
  fn();  // warmup
  const auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < reps; ++i) fn();
  const auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double>(t1 - t0).count() / reps;
}

Eigen::MatrixXd random_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c)
    for (Eigen::Index r = 0; r < rows; ++r) m(r, c) = rng.uniform() + 0.01;
  return m;
}

}  // namespace

int main() {
  const int threads = omp_get_max_threads();
  std::printf("kernel benchmark, %d threads available\n\n", threads);
  std::printf("%-28s %12s %12s %12s %9s %s\n", "kernel", "reference", "serial", "parallel",
              "speedup", "bitwise");

  Rng rng(42);

  {  // multiplicative update, USM-sized problem
    const Eigen::Index f = 321, k = 10, d = 36, n = 256;
    MixingMatrix a;
    a.atoms_per_group = k;
    a.num_groups = d;
    a.values = random_matrix(f, k * d, rng);
    const Eigen::MatrixXd y = random_matrix(f, n, rng);
    Activations x;
    x.atoms_per_group = k;
    x.num_groups = d;
    x.values = a.values.transpose() * y;
    SolverConfig cfg;
    cfg.divergence = Divergence::kItakuraSaito;
    cfg.lambda = 1.0;
    cfg.gamma = 1.0;

    Activations serial_out, parallel_out;
    const double t_ref = time_s([&] { reference::mu_step(x, a, y, cfg); }, 2);
    const double t_serial = time_s([&] { serial_out = mu_step(x, a, y, cfg, 1); }, 5);
    const double t_par = time_s([&] { parallel_out = mu_step(x, a, y, cfg, threads); }, 5);
    const bool same = serial_out.values == parallel_out.values;
    std::printf("%-28s %10.2f ms %10.2f ms %10.2f ms %8.2fx %s\n",
                "mu_step IS 321x360x256", 1e3 * t_ref, 1e3 * t_serial, 1e3 * t_par,
                t_serial / t_par, same ? "yes" : "NO");
  }

  {  // white localization, two sources
    const int d = 36, j = 2;
    const Eigen::Index f = 513;
    DirectionalResponseSet set;
    set.mags = random_matrix(d, f, rng);
    set.freq_axis.assign(static_cast<std::size_t>(f), 0.0);
    for (Eigen::Index i = 0; i < f; ++i)
      set.freq_axis[static_cast<std::size_t>(i)] = static_cast<double>(i);
    set.azimuths_deg.resize(d);
    for (int i = 0; i < d; ++i) set.azimuths_deg[static_cast<std::size_t>(i)] = 10.0 * i;
    set.sample_rate = 16000;
    set.window_len = 1024;
    const Eigen::VectorXd psd = random_matrix(f, 1, rng);

    WhiteLocResult serial_res, parallel_res;
    const double t_ref = time_s([&] { reference::localize_white(psd, set.mags, j); }, 2);
    const double t_serial = time_s([&] { serial_res = localize_white(psd, set, j, 1); }, 3);
    const double t_par = time_s([&] { parallel_res = localize_white(psd, set, j, threads); }, 3);
    const bool same = serial_res.residuals == parallel_res.residuals &&
                      serial_res.subset == parallel_res.subset;
    std::printf("%-28s %10.2f ms %10.2f ms %10.2f ms %8.2fx %s\n", "whiteloc D=36 J=2",
                1e3 * t_ref, 1e3 * t_serial, 1e3 * t_par, t_serial / t_par, same ? "yes" : "NO");
  }

  {  // time-domain convolution
    TimeSignal x;
    x.sample_rate = 16000;
    x.samples.resize(48000);
    for (double& v : x.samples) v = rng.gaussian();
    std::vector<double> h(1024);
    for (double& v : h) v = rng.gaussian();

    TimeSignal serial_out, parallel_out;
    const double t_ref = time_s([&] { reference::convolve(x, h); }, 2);
    const double t_serial = time_s([&] { serial_out = convolve(x, h, 1); }, 3);
    const double t_par = time_s([&] { parallel_out = convolve(x, h, threads); }, 3);
    const bool same = serial_out.samples == parallel_out.samples;
    std::printf("%-28s %10.2f ms %10.2f ms %10.2f ms %8.2fx %s\n", "convolve 48000x1024",
                1e3 * t_ref, 1e3 * t_serial, 1e3 * t_par, t_serial / t_par, same ? "yes" : "NO");
  }

  return 0;
}
