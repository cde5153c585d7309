// include/scatloc/nmf.hpp

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

#ifndef SCATLOC_NMF_HPP
#define SCATLOC_NMF_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "scatloc/scatter.hpp"
#include "scatloc/signal.hpp"

namespace scatloc {

enum class Divergence { kItakuraSaito, kEuclidean };

std::string to_string(Divergence d);
Divergence divergence_from_string(const std::string& s);

/// Learned (or prototype) source model W: one non-negative column per atom.
struct Dictionary {
  Eigen::MatrixXd atoms;               // F x K, >= 0, no all-zero column
  std::vector<std::string> atom_meta;  // source label per atom
  std::vector<double> freq_axis;       // grid the atoms live on

  Eigen::Index num_bins() const { return atoms.rows(); }
  Eigen::Index num_atoms() const { return atoms.cols(); }
};

/// A = [diag(H_1) W, ..., diag(H_D) W]; column c belongs to direction c / K.
struct MixingMatrix {
  Eigen::MatrixXd values;  // F x (K*D)
  Eigen::Index atoms_per_group = 0;   // K
  Eigen::Index num_groups = 0;        // D

  Eigen::Index group_of_column(Eigen::Index c) const { return c / atoms_per_group; }
};

/// Group-structured activations X: K rows per direction, N columns.
struct Activations {
  Eigen::MatrixXd values;  // (K*D) x N
  Eigen::Index atoms_per_group = 0;
  Eigen::Index num_groups = 0;

  Eigen::Block<const Eigen::MatrixXd> group(Eigen::Index d) const {
    return values.block(d * atoms_per_group, 0, atoms_per_group, values.cols());
  }
};

struct SolverConfig {
  Divergence divergence = Divergence::kItakuraSaito;
  double lambda = 0.0;      // group-sparsity weight
  double gamma = 0.0;       // l1 weight
  int iters = 100;
  double eps_group = 1e-12; // epsilon inside the log group penalty
  double eps_floor = 1e-20; // thresholding / division floor
  // Optional convergence stop on relative objective change; off by default
  // (fixed iteration count is the reference behavior).
  std::optional<double> rel_tol;
  // When set, X is initialized from seeded uniform noise instead of A^T Y.
  std::optional<std::uint64_t> random_init_seed;
};

/// Raised when an update produces NaN/Inf (epsilon misconfiguration).
struct SolverAbort : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Sum of elementwise divergences. Itakura-Saito: v/v' - log(v/v') - 1 with v
/// floored at eps_floor (exact zeros otherwise contribute +inf); throws if
/// any v' is zero. Euclidean: 0.5 * (v - v')^2.
double beta_divergence(const Eigen::MatrixXd& v, const Eigen::MatrixXd& v_hat,
                       Divergence divergence, double eps_floor = 1e-20);

/// D(Y || AX) + lambda * sum_d log(eps_group + ||vec(X_d)||_1)
///            + gamma * ||vec(X)||_1
double objective(const Eigen::MatrixXd& y, const MixingMatrix& a, const Activations& x,
                 const SolverConfig& cfg);

/// One multiplicative update of X (Y and A fixed).
///
/// Itakura-Saito:  X' = X .* ( A'(Y .* Yh^-2) ./ (A'Yh^-1 + lambda P + gamma) ).^(1/2)
/// Euclidean:      X' = X .* max( (A'Y - lambda P - gamma) ./ (A'Yh), eps_floor )
/// with Yh = AX floored at eps_floor and P_d = 1 / (eps_group + ||vec(X_d)||_1)
/// broadcast over group d. Non-negativity is preserved; NaN/Inf aborts.
///
/// threads > 1 splits columns into fixed-width blocks; the result is
/// bit-identical to the serial path for any thread count.
Activations mu_step(const Activations& x, const MixingMatrix& a, const Eigen::MatrixXd& y,
                    const SolverConfig& cfg, int threads = 1);

struct FactorizeResult {
  Activations x;
  std::vector<double> objective_trace;  // iters + 1 entries, [0] is the init
};

/// Run cfg.iters multiplicative updates from X0 = A^T Y (or the seeded random
/// init). Y must already be restricted to the band A was built on. For the
/// Itakura-Saito divergence Y is floored at eps_floor first. Deterministic;
/// parallel mode is bit-identical to serial.
FactorizeResult factorize(const Eigen::MatrixXd& y, const MixingMatrix& a,
                          const SolverConfig& cfg, int threads = 1);

/// Per-speaker unpenalized NMF: each labeled training spectrogram set is
/// factorized into `atoms_per_speaker` atoms (random non-negative init from
/// `seed`), atoms are l2-normalized and concatenated in input order.
Dictionary learn_dictionary(const std::vector<std::pair<std::string, MagSpectrogram>>& training,
                            int atoms_per_speaker, Divergence divergence, int iters,
                            std::uint64_t seed);

/// A = [diag(H_1) W, ..., diag(H_D) W] on a shared frequency grid.
MixingMatrix build_mixing_matrix(const DirectionalResponseSet& set, const Dictionary& w);

// Dictionary files use the same JSON-manifest + float64 container as devices.
void save_dictionary(const Dictionary& w, const std::string& path);
Dictionary load_dictionary(const std::string& path);

}  // namespace scatloc

#endif  // SCATLOC_NMF_HPP
