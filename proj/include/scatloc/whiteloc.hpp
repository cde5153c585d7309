// include/scatloc/whiteloc.hpp

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

#ifndef SCATLOC_WHITELOC_HPP
#define SCATLOC_WHITELOC_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "scatloc/scatter.hpp"

namespace scatloc {

struct WhiteLocResult {
  std::vector<int> subset;         // winning direction indices, strictly increasing
  double residual = 0.0;           // winning projection residual
  std::vector<double> residuals;   // one per candidate subset, lexicographic order
  bool tie = false;                // another subset matched the winner within 1e-12 rel
};

/// l2 norm of the least-squares residual of psd against the basis columns.
/// Rank-deficient bases are handled (column-pivoted QR).
double projection_residual(const Eigen::VectorXd& psd, const Eigen::MatrixXd& basis);

/// Localize `num_sources` white sources from an empirical PSD by exhaustive
/// enumeration of direction subsets: each subset J is scored by the residual
/// of projecting the PSD onto span{|H_j|^2, j in J}, and the minimizer wins.
/// Ties break toward the lexicographically smallest subset.
///
/// Enumeration cost is C(D, J); the call refuses budgets above
/// `candidate_budget`. threads > 1 splits candidates across threads with
/// results identical to the serial order.
WhiteLocResult localize_white(const Eigen::VectorXd& psd, const DirectionalResponseSet& set,
                              int num_sources, int threads = 1,
                              std::uint64_t candidate_budget = 1000000);

/// Number of J-subsets of D elements, saturating at 2^63-1.
std::uint64_t subset_count(int d, int j);

/// The subset of rank `r` (lexicographic order) among J-subsets of {0..D-1}.
std::vector<int> subset_from_rank(std::uint64_t r, int d, int j);

}  // namespace scatloc

#endif  // SCATLOC_WHITELOC_HPP
