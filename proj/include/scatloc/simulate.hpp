// include/scatloc/simulate.hpp

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

#ifndef SCATLOC_SIMULATE_HPP
#define SCATLOC_SIMULATE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "scatloc/scatter.hpp"
#include "scatloc/signal.hpp"

namespace scatloc {

/// Recipe for one synthetic test source.
struct SourceSpec {
  enum class Kind { kWhite, kPrototypeColored, kHarmonicSpeaker };
  Kind kind = Kind::kWhite;
  double duration_s = 0.5;
  std::uint64_t seed = 0;        // realization (phases, noise, modulation)
  // harmonic-speaker parameters
  double f0_hz = 200.0;          // fundamental
  double tilt_db_per_oct = 6.0;  // harmonic rolloff
  std::uint64_t voice_seed = 0;  // fixed per speaker: formant-like envelope
};

/// A multi-source scene on the fine direction grid.
struct Scene {
  std::vector<std::pair<double, TimeSignal>> sources;  // (azimuth_deg, signal)
  double snr_db = kNoNoise;
  std::uint64_t seed = 0;
};

/// Synthesize a source signal. Deterministic per spec.seed.
TimeSignal make_source(const SourceSpec& spec, int sample_rate);

/// Render y = sum_j s_j * h(theta_j) + e.
///
/// Sources are truncated to the shortest and peak-normalized to 1 before
/// convolution with the fine-grid impulse responses; noise is added in the
/// time domain at scene.snr_db.
TimeSignal render_mixture(const Scene& scene, const DirectionalResponseSet& fine_responses,
                          int threads = 1);

/// Draw J distinct directions uniformly from a D_fine-point azimuth grid and
/// J sources from the pool. When reseed_sources is set each drawn spec gets a
/// fresh per-scene seed (for "unseen realization" trials); otherwise pool
/// entries are used verbatim and drawn without replacement when possible
/// (prototype trials need exact pool waveforms).
Scene random_scene(int num_sources, int fine_directions, const std::vector<SourceSpec>& pool,
                   double snr_db, std::uint64_t seed, int sample_rate,
                   bool reseed_sources = true);

/// Synthetic speaker pool: harmonic-speaker specs with per-speaker f0 and
/// tilt. "Female-like" speakers draw f0 from [165, 255] Hz with a gentler
/// spectral tilt, "male-like" from [85, 155] Hz with a steeper one.
std::vector<SourceSpec> make_speaker_pool(int num_female, int num_male, double duration_s,
                                          std::uint64_t seed);

std::string to_string(SourceSpec::Kind kind);
SourceSpec::Kind source_kind_from_string(const std::string& s);

}  // namespace scatloc

#endif  // SCATLOC_SIMULATE_HPP
