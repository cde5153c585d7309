// include/scatloc/doa.hpp

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

#ifndef SCATLOC_DOA_HPP
#define SCATLOC_DOA_HPP

#include <optional>
#include <vector>

#include "scatloc/nmf.hpp"
#include "scatloc/scatter.hpp"
#include "scatloc/signal.hpp"

namespace scatloc {

/// Multiresolution refinement settings: the top T coarse candidates are
/// re-scored on a fine grid of `neighbors` offsets of `fine_step_deg` around
/// each candidate (offsets up to +/- (neighbors/2)*fine_step_deg).
struct MultiresConfig {
  int candidates = 7;        // T
  double fine_step_deg = 2.0;
  int neighbors = 4;         // R, even: neighbors/2 offsets on each side
  double lambda = 0.0;       // fine-stage penalty weights
  double gamma = 0.0;
};

struct DoAResult {
  std::vector<double> estimates_deg;       // J azimuths, ascending
  std::vector<double> azimuths_deg;        // scored grid (model or fine)
  std::vector<double> group_energies;      // ||vec(X_d)||_1 per grid direction
  enum class Stage { kCoarse, kRefined } stage = Stage::kCoarse;
  std::vector<double> objective_trace;
  // Band-restricted observation the estimate came from; lets refine() re-run
  // the factorization without re-rendering.
  Eigen::MatrixXd band_mags;
  BandSelection band;
};

/// Per-direction l1 norms of the activation groups.
std::vector<double> score_groups(const Activations& x);

/// Algorithm: Y = |STFT(y)| restricted to `band`, A built from the banded
/// device responses and W, X recovered by penalized multiplicative updates,
/// directions ranked by group energy. Ties break toward the smaller azimuth.
/// If `multires` is given, `fine_device` must cover the neighbor azimuths and
/// the top candidates are re-scored on the fine grid.
DoAResult localize(const TimeSignal& y, const DirectionalResponseSet& device,
                   const Dictionary& w, int num_sources, const SolverConfig& cfg,
                   const BandSelection& band,
                   const std::optional<MultiresConfig>& multires = std::nullopt,
                   const DirectionalResponseSet* fine_device = nullptr, int threads = 1);

/// Fine-stage pass over the top candidates of a coarse result.
DoAResult refine(const DoAResult& coarse, const DirectionalResponseSet& fine_device,
                 const Dictionary& w, int num_sources, const MultiresConfig& multires,
                 const SolverConfig& cfg, int threads = 1);

}  // namespace scatloc

#endif  // SCATLOC_DOA_HPP
