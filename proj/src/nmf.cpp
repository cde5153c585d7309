// src/nmf.cpp

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

#include "scatloc/nmf.hpp"

#include <cmath>

#include "scatloc/container.hpp"
#include "scatloc/rng.hpp"

namespace scatloc {
namespace {

// Fixed column block width: the work unit for both the serial and the
// parallel path, so results do not depend on the thread count.
constexpr Eigen::Index kColBlock = 8;

Eigen::Index num_blocks(Eigen::Index cols) { return (cols + kColBlock - 1) / kColBlock; }

double is_divergence_block(const Eigen::MatrixXd& v, const Eigen::MatrixXd& v_hat,
                           double eps_floor) {
  double acc = 0.0;
  for (Eigen::Index c = 0; c < v.cols(); ++c)
    for (Eigen::Index r = 0; r < v.rows(); ++r) {
      const double x = std::max(v(r, c), eps_floor);
      const double ratio = x / v_hat(r, c);
      acc += ratio - std::log(ratio) - 1.0;
    }
  return acc;
}

/// Per-row group penalty vector: p(row) = 1 / (eps_group + ||vec(X_d)||_1)
/// for the group d owning that row.
Eigen::VectorXd group_penalty_rows(const Activations& x, double eps_group) {
  Eigen::VectorXd p(x.values.rows());
  for (Eigen::Index d = 0; d < x.num_groups; ++d) {
    const double norm = x.group(d).cwiseAbs().sum();
    p.segment(d * x.atoms_per_group, x.atoms_per_group).setConstant(1.0 / (eps_group + norm));
  }
  return p;
}

double penalty_terms(const Activations& x, const SolverConfig& cfg) {
  double acc = 0.0;
  if (cfg.lambda > 0.0)
    for (Eigen::Index d = 0; d < x.num_groups; ++d)
      acc += cfg.lambda * std::log(cfg.eps_group + x.group(d).cwiseAbs().sum());
  if (cfg.gamma > 0.0) acc += cfg.gamma * x.values.cwiseAbs().sum();
  return acc;
}

/// One multiplicative update over all columns, block by block. Returns the
/// data-fit divergence D(Y || AX) evaluated at the incoming X (with Yh
/// floored at eps_floor). Bit-identical for any thread count.
double mu_step_blocks(const Eigen::MatrixXd& x, const Eigen::MatrixXd& a,
                      const Eigen::MatrixXd& y, const Eigen::VectorXd& p,
                      const SolverConfig& cfg, int threads, Eigen::MatrixXd& x_out) {
  const Eigen::Index blocks = num_blocks(x.cols());
  std::vector<double> div(static_cast<std::size_t>(blocks), 0.0);
  bool bad = false;

#pragma omp parallel for schedule(static) num_threads(threads) if (threads > 1)
  for (Eigen::Index b = 0; b < blocks; ++b) {
    const Eigen::Index c0 = b * kColBlock;
    const Eigen::Index w = std::min(kColBlock, x.cols() - c0);
    const auto xb = x.middleCols(c0, w);
    const auto yb = y.middleCols(c0, w);

    Eigen::MatrixXd yh = (a * xb).array().max(cfg.eps_floor).matrix();

    if (cfg.divergence == Divergence::kItakuraSaito) {
      div[static_cast<std::size_t>(b)] = is_divergence_block(yb, yh, cfg.eps_floor);
      const Eigen::MatrixXd num = a.transpose() * yb.cwiseQuotient(yh.cwiseAbs2());
      Eigen::MatrixXd den = a.transpose() * yh.cwiseInverse();
      den.array() += cfg.gamma;
      if (cfg.lambda > 0.0) den.colwise() += cfg.lambda * p;
      x_out.middleCols(c0, w) =
          xb.array() * (num.array() / den.array()).sqrt();
    } else {
      div[static_cast<std::size_t>(b)] = 0.5 * (yb - yh).squaredNorm();
      Eigen::MatrixXd num = a.transpose() * yb;
      num.array() -= cfg.gamma;
      if (cfg.lambda > 0.0) num.colwise() -= cfg.lambda * p;
      const Eigen::MatrixXd den = a.transpose() * yh;
      x_out.middleCols(c0, w) =
          xb.array() * (num.array() / den.array()).max(cfg.eps_floor);
    }
    if (!x_out.middleCols(c0, w).allFinite()) bad = true;
  }

  if (bad)
    throw SolverAbort(
        "mu_step: update produced NaN/Inf (check eps_floor/eps_group and input scaling)");
  double total = 0.0;
  for (double v : div) total += v;
  return total;
}

/// D(Y || AX) alone, same block traversal as mu_step_blocks.
double data_fit(const Eigen::MatrixXd& x, const Eigen::MatrixXd& a, const Eigen::MatrixXd& y,
                const SolverConfig& cfg, int threads) {
  const Eigen::Index blocks = num_blocks(x.cols());
  std::vector<double> div(static_cast<std::size_t>(blocks), 0.0);
#pragma omp parallel for schedule(static) num_threads(threads) if (threads > 1)
  for (Eigen::Index b = 0; b < blocks; ++b) {
    const Eigen::Index c0 = b * kColBlock;
    const Eigen::Index w = std::min(kColBlock, x.cols() - c0);
    const Eigen::MatrixXd yh = (a * x.middleCols(c0, w)).array().max(cfg.eps_floor).matrix();
    if (cfg.divergence == Divergence::kItakuraSaito)
      div[static_cast<std::size_t>(b)] = is_divergence_block(y.middleCols(c0, w), yh, cfg.eps_floor);
    else
      div[static_cast<std::size_t>(b)] = 0.5 * (y.middleCols(c0, w) - yh).squaredNorm();
  }
  double total = 0.0;
  for (double v : div) total += v;
  return total;
}

void check_shapes(const Eigen::MatrixXd& y, const MixingMatrix& a) {
  if (a.values.cols() != a.atoms_per_group * a.num_groups)
    throw std::invalid_argument("mixing matrix: K*D does not match column count");
  if (y.rows() != a.values.rows())
    throw std::invalid_argument("factorize: Y row count != mixing matrix row count");
}

}  // namespace

std::string to_string(Divergence d) {
  return d == Divergence::kItakuraSaito ? "itakura_saito" : "euclidean";
}

Divergence divergence_from_string(const std::string& s) {
  if (s == "itakura_saito" || s == "is") return Divergence::kItakuraSaito;
  if (s == "euclidean" || s == "eu") return Divergence::kEuclidean;
  throw std::invalid_argument("unknown divergence: " + s);
}

double beta_divergence(const Eigen::MatrixXd& v, const Eigen::MatrixXd& v_hat,
                       Divergence divergence, double eps_floor) {
  if (v.rows() != v_hat.rows() || v.cols() != v_hat.cols())
    throw std::invalid_argument("beta_divergence: shape mismatch");
  if (divergence == Divergence::kEuclidean) return 0.5 * (v - v_hat).squaredNorm();
  if ((v_hat.array() <= 0.0).any())
    throw std::invalid_argument("beta_divergence: Itakura-Saito needs strictly positive V_hat");
  return is_divergence_block(v, v_hat, eps_floor);
}

double objective(const Eigen::MatrixXd& y, const MixingMatrix& a, const Activations& x,
                 const SolverConfig& cfg) {
  check_shapes(y, a);
  if (x.values.rows() != a.values.cols() || x.values.cols() != y.cols())
    throw std::invalid_argument("objective: activation shape mismatch");
  return data_fit(x.values, a.values, y, cfg, 1) + penalty_terms(x, cfg);
}

Activations mu_step(const Activations& x, const MixingMatrix& a, const Eigen::MatrixXd& y,
                    const SolverConfig& cfg, int threads) {
  check_shapes(y, a);
  if (x.values.rows() != a.values.cols() || x.values.cols() != y.cols())
    throw std::invalid_argument("mu_step: activation shape mismatch");
  Activations out;
  out.atoms_per_group = x.atoms_per_group;
  out.num_groups = x.num_groups;
  out.values.resize(x.values.rows(), x.values.cols());
  const Eigen::VectorXd p = group_penalty_rows(x, cfg.eps_group);
  mu_step_blocks(x.values, a.values, y, p, cfg, threads, out.values);
  return out;
}

FactorizeResult factorize(const Eigen::MatrixXd& y_in, const MixingMatrix& a,
                          const SolverConfig& cfg, int threads) {
  check_shapes(y_in, a);
  if (cfg.iters < 1) throw std::invalid_argument("factorize: iters must be >= 1");

  Eigen::MatrixXd y = y_in;
  if (cfg.divergence == Divergence::kItakuraSaito)
    y = y.array().max(cfg.eps_floor).matrix();

  FactorizeResult res;
  res.x.atoms_per_group = a.atoms_per_group;
  res.x.num_groups = a.num_groups;
  if (cfg.random_init_seed) {
    Rng rng(*cfg.random_init_seed);
    const double scale = std::max((a.values.transpose() * y).mean(), cfg.eps_floor);
    res.x.values.resize(a.values.cols(), y.cols());
    for (Eigen::Index c = 0; c < res.x.values.cols(); ++c)
      for (Eigen::Index r = 0; r < res.x.values.rows(); ++r)
        res.x.values(r, c) = scale * (1.0 - rng.uniform());  // in (0, scale]
  } else {
    res.x.values = a.values.transpose() * y;
    // A^T Y lands far from the data's scale (off by ||A||^2-ish); one closed
    // form scalar brings it onto the right footing so the iterations go into
    // structure rather than scale. Deterministic.
    const Eigen::MatrixXd yh = a.values * res.x.values;
    double scale = 1.0;
    if (cfg.divergence == Divergence::kItakuraSaito) {
      scale = (y.array() / yh.array().max(cfg.eps_floor)).mean();
    } else {
      const double denom = yh.squaredNorm();
      if (denom > 0.0) scale = y.cwiseProduct(yh).sum() / denom;
    }
    if (scale > 0.0 && std::isfinite(scale)) res.x.values *= scale;
  }

  Eigen::MatrixXd next(res.x.values.rows(), res.x.values.cols());
  res.objective_trace.reserve(static_cast<std::size_t>(cfg.iters) + 1);
  for (int i = 0; i < cfg.iters; ++i) {
    const Eigen::VectorXd p = group_penalty_rows(res.x, cfg.eps_group);
    const double fit = mu_step_blocks(res.x.values, a.values, y, p, cfg, threads, next);
    res.objective_trace.push_back(fit + penalty_terms(res.x, cfg));
    res.x.values.swap(next);
    if (cfg.rel_tol && res.objective_trace.size() >= 2) {
      const double prev = res.objective_trace[res.objective_trace.size() - 2];
      const double cur = res.objective_trace.back();
      if (std::abs(prev - cur) <= *cfg.rel_tol * std::max(std::abs(prev), 1e-30)) break;
    }
  }
  res.objective_trace.push_back(data_fit(res.x.values, a.values, y, cfg, threads) +
                                penalty_terms(res.x, cfg));
  return res;
}

Dictionary learn_dictionary(const std::vector<std::pair<std::string, MagSpectrogram>>& training,
                            int atoms_per_speaker, Divergence divergence, int iters,
                            std::uint64_t seed) {
  if (training.empty()) throw std::invalid_argument("learn_dictionary: no training data");
  if (atoms_per_speaker < 1) throw std::invalid_argument("learn_dictionary: need K >= 1");

  // Group spectrograms by label, preserving first-appearance order.
  std::vector<std::string> labels;
  std::vector<std::vector<const MagSpectrogram*>> groups;
  for (const auto& [label, spec] : training) {
    std::size_t g = 0;
    for (; g < labels.size(); ++g)
      if (labels[g] == label) break;
    if (g == labels.size()) {
      labels.push_back(label);
      groups.emplace_back();
    }
    groups[g].push_back(&spec);
  }

  const Eigen::Index f = training.front().second.values.rows();
  const Eigen::Index k = atoms_per_speaker;
  constexpr double kEps = 1e-20;

  Dictionary dict;
  dict.freq_axis = training.front().second.freq_axis;
  dict.atoms.resize(f, k * static_cast<Eigen::Index>(labels.size()));

  for (std::size_t g = 0; g < labels.size(); ++g) {
    Eigen::Index total_cols = 0;
    for (const auto* spec : groups[g]) {
      if (spec->values.rows() != f)
        throw std::invalid_argument("learn_dictionary: inconsistent frequency grids");
      total_cols += spec->values.cols();
    }
    if (total_cols == 0) throw std::invalid_argument("learn_dictionary: empty spectrogram");
    Eigen::MatrixXd v(f, total_cols);
    Eigen::Index at = 0;
    for (const auto* spec : groups[g]) {
      v.middleCols(at, spec->values.cols()) = spec->values;
      at += spec->values.cols();
    }
    if (v.maxCoeff() <= 0.0)
      throw std::invalid_argument("learn_dictionary: all-zero training data for " + labels[g]);
    if (divergence == Divergence::kItakuraSaito) v = v.array().max(kEps).matrix();

    Rng rng(derive_seed(seed, g));
    const double scale = std::sqrt(v.mean() / static_cast<double>(k));
    Eigen::MatrixXd w(f, k), h(k, total_cols);
    for (Eigen::Index c = 0; c < k; ++c)
      for (Eigen::Index r = 0; r < f; ++r) w(r, c) = scale * (1.0 - rng.uniform());
    for (Eigen::Index c = 0; c < total_cols; ++c)
      for (Eigen::Index r = 0; r < k; ++r) h(r, c) = scale * (1.0 - rng.uniform());

    for (int it = 0; it < iters; ++it) {
      if (divergence == Divergence::kItakuraSaito) {
        Eigen::MatrixXd yh = (w * h).array().max(kEps).matrix();
        const Eigen::MatrixXd vq = v.cwiseQuotient(yh.cwiseAbs2());
        w.array() *= ((vq * h.transpose()).array() /
                      (yh.cwiseInverse() * h.transpose()).array().max(kEps))
                         .sqrt();
        yh = (w * h).array().max(kEps).matrix();
        const Eigen::MatrixXd vq2 = v.cwiseQuotient(yh.cwiseAbs2());
        h.array() *= ((w.transpose() * vq2).array() /
                      (w.transpose() * yh.cwiseInverse()).array().max(kEps))
                         .sqrt();
      } else {
        w.array() *= ((v * h.transpose()).array() /
                      ((w * h) * h.transpose()).array().max(kEps));
        h.array() *= ((w.transpose() * v).array() /
                      (w.transpose() * (w * h)).array().max(kEps));
      }
    }

    for (Eigen::Index c = 0; c < k; ++c) {
      double norm = w.col(c).norm();
      if (!(norm > 0.0) || !w.col(c).allFinite()) {
        // Collapsed atom: fall back to the (normalized) mean training column.
        w.col(c) = v.rowwise().mean();
        norm = w.col(c).norm();
      }
      dict.atoms.col(static_cast<Eigen::Index>(g) * k + c) = w.col(c) / norm;
      dict.atom_meta.push_back(labels[g]);
    }
  }
  return dict;
}

MixingMatrix build_mixing_matrix(const DirectionalResponseSet& set, const Dictionary& w) {
  if (set.freq_axis.size() != w.freq_axis.size())
    throw std::invalid_argument("build_mixing_matrix: frequency grid size mismatch");
  for (std::size_t i = 0; i < set.freq_axis.size(); ++i)
    if (std::abs(set.freq_axis[i] - w.freq_axis[i]) > 1e-9)
      throw std::invalid_argument("build_mixing_matrix: frequency grids differ");

  MixingMatrix a;
  a.atoms_per_group = w.num_atoms();
  a.num_groups = set.num_directions();
  a.values.resize(w.num_bins(), a.atoms_per_group * a.num_groups);
  for (Eigen::Index d = 0; d < a.num_groups; ++d)
    a.values.middleCols(d * a.atoms_per_group, a.atoms_per_group) =
        set.mags.row(d).transpose().asDiagonal() * w.atoms;
  return a;
}

void save_dictionary(const Dictionary& w, const std::string& path) {
  nlohmann::ordered_json manifest;
  manifest["kind"] = "dictionary";
  manifest["atom_meta"] = w.atom_meta;
  manifest["freq_axis"] = w.freq_axis;
  write_container(path, std::move(manifest), {{"atoms", &w.atoms}});
}

Dictionary load_dictionary(const std::string& path) {
  Container c = read_container(path);
  if (c.manifest.value("kind", "") != "dictionary")
    throw std::runtime_error("load_dictionary: not a dictionary file: " + path);
  Dictionary w;
  w.atoms = c.matrices.at("atoms");
  w.atom_meta = c.manifest["atom_meta"].get<std::vector<std::string>>();
  w.freq_axis = c.manifest["freq_axis"].get<std::vector<double>>();
  return w;
}

}  // namespace scatloc
