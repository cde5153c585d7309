// src/doa.cpp

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

#include "scatloc/doa.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace scatloc {
namespace {

/// Indices of the `count` highest scores; ties go to the smaller azimuth
/// (grid order is ascending, so stable ordering on index does it).
std::vector<std::size_t> top_indices(const std::vector<double>& scores, int count) {
  std::vector<std::size_t> idx(scores.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return a < b;
  });
  idx.resize(static_cast<std::size_t>(std::min<std::size_t>(idx.size(),
                                                            static_cast<std::size_t>(count))));
  return idx;
}

DoAResult score_and_select(const Eigen::MatrixXd& band_mags, const BandSelection& band,
                           const DirectionalResponseSet& banded_device, const Dictionary& w,
                           int num_sources, const SolverConfig& cfg, DoAResult::Stage stage,
                           int threads) {
  const MixingMatrix a = build_mixing_matrix(banded_device, w);
  FactorizeResult fact = factorize(band_mags, a, cfg, threads);

  DoAResult res;
  res.stage = stage;
  res.azimuths_deg = banded_device.azimuths_deg;
  res.group_energies = score_groups(fact.x);
  res.objective_trace = std::move(fact.objective_trace);
  res.band_mags = band_mags;
  res.band = band;

  for (std::size_t i : top_indices(res.group_energies, num_sources))
    res.estimates_deg.push_back(res.azimuths_deg[i]);
  std::sort(res.estimates_deg.begin(), res.estimates_deg.end());
  return res;
}

}  // namespace

std::vector<double> score_groups(const Activations& x) {
  std::vector<double> scores(static_cast<std::size_t>(x.num_groups));
  for (Eigen::Index d = 0; d < x.num_groups; ++d)
    scores[static_cast<std::size_t>(d)] = x.group(d).cwiseAbs().sum();
  return scores;
}

DoAResult localize(const TimeSignal& y, const DirectionalResponseSet& device,
                   const Dictionary& w, int num_sources, const SolverConfig& cfg,
                   const BandSelection& band, const std::optional<MultiresConfig>& multires,
                   const DirectionalResponseSet* fine_device, int threads) {
  if (num_sources < 1) throw std::invalid_argument("localize: need num_sources >= 1");
  if (num_sources > device.num_directions())
    throw std::invalid_argument("localize: more sources than model directions");
  if (device.window_len <= 0) throw std::invalid_argument("localize: device lacks window_len");

  const ComplexSpectrogram spec = stft(y, device.window_len, device.window_len / 2);
  const MagSpectrogram mags = magnitude(spec);
  Eigen::MatrixXd band_mags(static_cast<Eigen::Index>(band.bin_indices.size()),
                            mags.values.cols());
  for (std::size_t j = 0; j < band.bin_indices.size(); ++j)
    band_mags.row(static_cast<Eigen::Index>(j)) = mags.values.row(band.bin_indices[j]);

  auto [banded_device, band_echo] = band_select(device, band.fmin_hz, band.fmax_hz);
  if (band_echo.bin_indices != band.bin_indices)
    throw std::invalid_argument("localize: band selection does not match the device grid");

  DoAResult coarse = score_and_select(band_mags, band, banded_device, w, num_sources, cfg,
                                      DoAResult::Stage::kCoarse, threads);
  if (!multires) return coarse;
  if (fine_device == nullptr)
    throw std::invalid_argument("localize: multiresolution needs a fine device");
  return refine(coarse, *fine_device, w, num_sources, *multires, cfg, threads);
}

DoAResult refine(const DoAResult& coarse, const DirectionalResponseSet& fine_device,
                 const Dictionary& w, int num_sources, const MultiresConfig& multires,
                 const SolverConfig& cfg, int threads) {
  if (multires.candidates < num_sources)
    throw std::invalid_argument("refine: candidate count T must be >= J");
  if (multires.neighbors % 2 != 0)
    throw std::invalid_argument("refine: neighbor count R must be even");

  // Candidate azimuths plus +/- offsets, deduplicated and sorted.
  std::vector<double> fine_azimuths;
  for (std::size_t i : top_indices(coarse.group_energies, multires.candidates)) {
    const double center = coarse.azimuths_deg[i];
    for (int o = -multires.neighbors / 2; o <= multires.neighbors / 2; ++o) {
      double az = std::fmod(center + o * multires.fine_step_deg, 360.0);
      if (az < 0.0) az += 360.0;
      fine_azimuths.push_back(az);
    }
  }
  std::sort(fine_azimuths.begin(), fine_azimuths.end());
  fine_azimuths.erase(std::unique(fine_azimuths.begin(), fine_azimuths.end(),
                                  [](double a, double b) { return std::abs(a - b) < 1e-9; }),
                      fine_azimuths.end());
  for (double az : fine_azimuths)
    if (fine_device.find_azimuth(az) < 0)
      throw std::invalid_argument("refine: fine device lacks azimuth " + std::to_string(az));

  DirectionalResponseSet neighborhood = interpolate_to_grid(fine_device, fine_azimuths);
  auto [banded, band_echo] = band_select(neighborhood, coarse.band.fmin_hz, coarse.band.fmax_hz);
  if (banded.num_bins() != coarse.band_mags.rows())
    throw std::invalid_argument("refine: fine device band does not match the observation");

  SolverConfig fine_cfg = cfg;
  fine_cfg.lambda = multires.lambda;
  fine_cfg.gamma = multires.gamma;
  DoAResult res = score_and_select(coarse.band_mags, coarse.band, banded, w, num_sources,
                                   fine_cfg, DoAResult::Stage::kRefined, threads);
  res.objective_trace.insert(res.objective_trace.begin(), coarse.objective_trace.begin(),
                             coarse.objective_trace.end());
  return res;
}

}  // namespace scatloc
