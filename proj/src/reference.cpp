// src/reference.cpp

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

#include "scatloc/reference.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace scatloc::reference {

TimeSignal convolve(const TimeSignal& x, const std::vector<double>& h) {
  if (x.samples.empty() || h.empty())
    throw std::invalid_argument("reference::convolve: empty input");
  TimeSignal y;
  y.sample_rate = x.sample_rate;
  y.samples.assign(x.samples.size() + h.size() - 1, 0.0);
  for (std::size_t i = 0; i < x.samples.size(); ++i)
    for (std::size_t k = 0; k < h.size(); ++k) y.samples[i + k] += x.samples[i] * h[k];
  return y;
}

Eigen::VectorXd dft_magnitude(const std::vector<double>& x, int n) {
  const std::size_t bins = static_cast<std::size_t>(n) / 2 + 1;
  Eigen::VectorXd mag(static_cast<Eigen::Index>(bins));
  for (std::size_t k = 0; k < bins; ++k) {
    double re = 0.0, im = 0.0;
    for (std::size_t t = 0; t < x.size() && t < static_cast<std::size_t>(n); ++t) {
      const double angle = -2.0 * std::numbers::pi * static_cast<double>(k) *
                           static_cast<double>(t) / static_cast<double>(n);
      re += x[t] * std::cos(angle);
      im += x[t] * std::sin(angle);
    }
    mag(static_cast<Eigen::Index>(k)) = std::hypot(re, im);
  }
  return mag;
}

double projection_residual(const Eigen::VectorXd& psd, const Eigen::MatrixXd& basis) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(basis, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd coeffs = svd.solve(psd);
  return (psd - basis * coeffs).norm();
}

namespace {

void enumerate_subsets(int d, int j, std::vector<int>& current,
                       const std::function<void(const std::vector<int>&)>& visit, int from) {
  if (static_cast<int>(current.size()) == j) {
    visit(current);
    return;
  }
  for (int v = from; v <= d - (j - static_cast<int>(current.size())); ++v) {
    current.push_back(v);
    enumerate_subsets(d, j, current, visit, v + 1);
    current.pop_back();
  }
}

}  // namespace

std::vector<int> localize_white(const Eigen::VectorXd& psd, const Eigen::MatrixXd& mags,
                                int num_sources) {
  const int d = static_cast<int>(mags.rows());
  const Eigen::MatrixXd h2 = mags.array().square().matrix().transpose();

  std::vector<int> best;
  double best_residual = std::numeric_limits<double>::infinity();
  std::vector<int> current;
  enumerate_subsets(d, num_sources, current, [&](const std::vector<int>& subset) {
    Eigen::MatrixXd basis(h2.rows(), num_sources);
    for (int c = 0; c < num_sources; ++c)
      basis.col(c) = h2.col(subset[static_cast<std::size_t>(c)]);
    const Eigen::MatrixXd gram = basis.transpose() * basis;
    const Eigen::VectorXd coeffs = gram.fullPivLu().solve(basis.transpose() * psd);
    const double residual = (psd - basis * coeffs).norm();
    if (residual < best_residual) {
      best_residual = residual;
      best = subset;
    }
  }, 0);
  return best;
}

Activations mu_step(const Activations& x, const MixingMatrix& a, const Eigen::MatrixXd& y,
                    const SolverConfig& cfg) {
  const Eigen::Index rows = x.values.rows(), cols = x.values.cols(), f = y.rows();
  const Eigen::Index k = x.atoms_per_group;

  std::vector<double> group_norm(static_cast<std::size_t>(x.num_groups), 0.0);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c)
      group_norm[static_cast<std::size_t>(r / k)] += std::abs(x.values(r, c));

  Activations out = x;
  for (Eigen::Index c = 0; c < cols; ++c) {
    std::vector<double> yh(static_cast<std::size_t>(f), 0.0);
    for (Eigen::Index fi = 0; fi < f; ++fi) {
      double acc = 0.0;
      for (Eigen::Index r = 0; r < rows; ++r) acc += a.values(fi, r) * x.values(r, c);
      yh[static_cast<std::size_t>(fi)] = std::max(acc, cfg.eps_floor);
    }
    for (Eigen::Index r = 0; r < rows; ++r) {
      const double penalty =
          cfg.lambda / (cfg.eps_group + group_norm[static_cast<std::size_t>(r / k)]) + cfg.gamma;
      if (cfg.divergence == Divergence::kItakuraSaito) {
        double num = 0.0, den = 0.0;
        for (Eigen::Index fi = 0; fi < f; ++fi) {
          const double v = yh[static_cast<std::size_t>(fi)];
          num += a.values(fi, r) * y(fi, c) / (v * v);
          den += a.values(fi, r) / v;
        }
        out.values(r, c) = x.values(r, c) * std::sqrt(num / (den + penalty));
      } else {
        double num = 0.0, den = 0.0;
        for (Eigen::Index fi = 0; fi < f; ++fi) {
          num += a.values(fi, r) * y(fi, c);
          den += a.values(fi, r) * yh[static_cast<std::size_t>(fi)];
        }
        out.values(r, c) = x.values(r, c) * std::max((num - penalty) / den, cfg.eps_floor);
      }
    }
  }
  return out;
}

double objective(const Eigen::MatrixXd& y, const MixingMatrix& a, const Activations& x,
                 const SolverConfig& cfg) {
  const Eigen::Index rows = x.values.rows(), cols = x.values.cols(), f = y.rows();
  double fit = 0.0;
  for (Eigen::Index c = 0; c < cols; ++c)
    for (Eigen::Index fi = 0; fi < f; ++fi) {
      double yh = 0.0;
      for (Eigen::Index r = 0; r < rows; ++r) yh += a.values(fi, r) * x.values(r, c);
      yh = std::max(yh, cfg.eps_floor);
      if (cfg.divergence == Divergence::kItakuraSaito) {
        const double v = std::max(y(fi, c), cfg.eps_floor);
        fit += v / yh - std::log(v / yh) - 1.0;
      } else {
        fit += 0.5 * (y(fi, c) - yh) * (y(fi, c) - yh);
      }
    }
  double penalty = 0.0;
  for (Eigen::Index d = 0; d < x.num_groups; ++d) {
    double norm = 0.0;
    for (Eigen::Index r = d * x.atoms_per_group; r < (d + 1) * x.atoms_per_group; ++r)
      for (Eigen::Index c = 0; c < cols; ++c) norm += std::abs(x.values(r, c));
    if (cfg.lambda > 0.0) penalty += cfg.lambda * std::log(cfg.eps_group + norm);
  }
  double l1 = 0.0;
  for (Eigen::Index c = 0; c < cols; ++c)
    for (Eigen::Index r = 0; r < rows; ++r) l1 += std::abs(x.values(r, c));
  return fit + penalty + cfg.gamma * l1;
}

}  // namespace scatloc::reference
