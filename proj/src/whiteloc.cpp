// src/whiteloc.cpp

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

#include "scatloc/whiteloc.hpp"

#include <stdexcept>

namespace scatloc {

std::uint64_t subset_count(int d, int j) {
  if (j < 0 || j > d) return 0;
  if (j == 0 || j == d) return 1;
  j = std::min(j, d - j);
  constexpr std::uint64_t kCap = INT64_MAX;
  std::uint64_t c = 1;
  for (int i = 1; i <= j; ++i) {
    // c * (d - j + i) / i, watching for overflow against the cap.
    const std::uint64_t num = static_cast<std::uint64_t>(d - j + i);
    if (c > kCap / num) return kCap;
    c = c * num / static_cast<std::uint64_t>(i);
  }
  return c;
}

std::vector<int> subset_from_rank(std::uint64_t r, int d, int j) {
  std::vector<int> subset;
  subset.reserve(static_cast<std::size_t>(j));
  int v = 0;
  for (int p = 0; p < j; ++p) {
    for (;; ++v) {
      const std::uint64_t block = subset_count(d - v - 1, j - p - 1);
      if (r < block) break;
      r -= block;
    }
    subset.push_back(v);
    ++v;
  }
  return subset;
}

double projection_residual(const Eigen::VectorXd& psd, const Eigen::MatrixXd& basis) {
  if (basis.rows() != psd.size())
    throw std::invalid_argument("projection_residual: basis row count != psd length");
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(basis);
  const Eigen::VectorXd coeffs = qr.solve(psd);
  return (psd - basis * coeffs).norm();
}

WhiteLocResult localize_white(const Eigen::VectorXd& psd, const DirectionalResponseSet& set,
                              int num_sources, int threads, std::uint64_t candidate_budget) {
  const int d = static_cast<int>(set.num_directions());
  const Eigen::Index f = set.num_bins();
  if (num_sources < 1) throw std::invalid_argument("localize_white: need num_sources >= 1");
  if (num_sources > d) throw std::invalid_argument("localize_white: more sources than directions");
  if (num_sources >= f)
    throw std::invalid_argument("localize_white: num_sources must be < frequency bin count");
  if (psd.size() != f) throw std::invalid_argument("localize_white: psd length != bin count");

  const std::uint64_t candidates = subset_count(d, num_sources);
  if (candidates > candidate_budget)
    throw std::invalid_argument(
        "localize_white: C(D, J) = " + std::to_string(candidates) +
        " exceeds the candidate budget; reduce the grid size D or the source count J");

  // Squared magnitude responses; subsets select columns of this.
  const Eigen::MatrixXd h2 = set.mags.array().square().matrix().transpose();  // F x D

  WhiteLocResult result;
  result.residuals.assign(static_cast<std::size_t>(candidates), 0.0);
  const std::int64_t n = static_cast<std::int64_t>(candidates);

#pragma omp parallel num_threads(threads) if (threads > 1)
  {
    Eigen::MatrixXd basis(f, num_sources);
#pragma omp for schedule(static)
    for (std::int64_t r = 0; r < n; ++r) {
      const auto subset = subset_from_rank(static_cast<std::uint64_t>(r), d, num_sources);
      for (int c = 0; c < num_sources; ++c)
        basis.col(c) = h2.col(subset[static_cast<std::size_t>(c)]);
      result.residuals[static_cast<std::size_t>(r)] = projection_residual(psd, basis);
    }
  }

  std::uint64_t best = 0;
  for (std::uint64_t r = 1; r < candidates; ++r)
    if (result.residuals[r] < result.residuals[best]) best = r;

  const double tie_eps = 1e-12 * std::max(1.0, psd.norm());
  for (std::uint64_t r = 0; r < candidates && !result.tie; ++r)
    if (r != best && result.residuals[r] <= result.residuals[best] + tie_eps) result.tie = true;

  result.subset = subset_from_rank(best, d, num_sources);
  result.residual = result.residuals[best];
  return result;
}

}  // namespace scatloc
