// include/scatloc/reference.hpp

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

#ifndef SCATLOC_REFERENCE_HPP
#define SCATLOC_REFERENCE_HPP

#include <Eigen/Dense>
#include <vector>

#include "scatloc/nmf.hpp"
#include "scatloc/signal.hpp"

// Slow, independent reference implementations of the production kernels.
// These are deliberately written as plain scalar loops (or use a different
// algorithm entirely) and exist for tests and for the serial baselines in the
// kernel benchmark. They are not called from the production paths.
namespace scatloc::reference {

/// Direct convolution sum, looping over the input rather than the kernel.
TimeSignal convolve(const TimeSignal& x, const std::vector<double>& h);

/// O(n^2) one-sided DFT magnitude of a zero-padded signal.
Eigen::VectorXd dft_magnitude(const std::vector<double>& x, int n);

/// Least-squares residual norm via the SVD pseudo-inverse.
double projection_residual(const Eigen::VectorXd& psd, const Eigen::MatrixXd& basis);

/// Exhaustive white localization scoring subsets with a normal-equations
/// projection (B (B^T B)^-1 B^T y). Returns the winning subset.
std::vector<int> localize_white(const Eigen::VectorXd& psd, const Eigen::MatrixXd& mags,
                                int num_sources);

/// Scalar-loop multiplicative update (same contract as scatloc::mu_step).
Activations mu_step(const Activations& x, const MixingMatrix& a, const Eigen::MatrixXd& y,
                    const SolverConfig& cfg);

/// Scalar-loop objective (same contract as scatloc::objective).
double objective(const Eigen::MatrixXd& y, const MixingMatrix& a, const Activations& x,
                 const SolverConfig& cfg);

}  // namespace scatloc::reference

#endif  // SCATLOC_REFERENCE_HPP
