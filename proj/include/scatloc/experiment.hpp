// include/scatloc/experiment.hpp

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

#ifndef SCATLOC_EXPERIMENT_HPP
#define SCATLOC_EXPERIMENT_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "scatloc/doa.hpp"
#include "scatloc/nmf.hpp"
#include "scatloc/scatter.hpp"
#include "scatloc/simulate.hpp"

namespace scatloc {

/// Raised for malformed or inconsistent configuration (CLI exit code 2).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Method { kWhite, kNmfPrototype, kNmfUsm };

std::string to_string(Method m);
Method method_from_string(const std::string& s);

/// Declarative experiment description; one config drives one `run`.
/// See README for the JSON schema. Unknown keys are rejected.
struct ExperimentConfig {
  int sample_rate = 16000;
  int window_len = 1024;  // 64 ms at 16 kHz

  // device
  std::string device_kind = "rough";  // rough | smooth | file
  std::string device_path;            // kind == file
  std::uint64_t device_seed = 1;
  double flat_below_hz = 3000.0;
  double roughness_freq_hz = 75.0;
  double roughness_dir_deg = 10.0;
  double log_std = 0.5;

  int model_directions = 36;
  int fine_directions = 360;

  double fmin_hz = 0.0;
  double fmax_hz = 8000.0;

  Method method = Method::kWhite;
  Divergence divergence = Divergence::kItakuraSaito;
  double lambda = 0.0;
  double gamma = 0.0;
  int iters = 100;
  std::optional<std::uint64_t> random_init_seed;
  std::string dictionary_path;  // nmf-usm

  // trial source pool
  std::string source_kind = "white";  // white | harmonic-speakers | prototype-colored
  double source_duration_s = 0.5;
  int num_female = 2;
  int num_male = 2;
  std::uint64_t source_seed = 7;
  bool reseed_per_trial = true;

  int num_sources = 1;  // J
  std::vector<double> snr_db = {30.0};
  int trials = 100;
  std::uint64_t seed = 1234;

  bool multires_enabled = false;
  MultiresConfig multires;

  int threads = 1;
  std::string output_dir;  // default: $SCATLOC_OUT or "."
};

ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);
nlohmann::ordered_json config_to_json(const ExperimentConfig& cfg);

/// FNV-1a over the canonical serialized config.
std::string config_hash(const ExperimentConfig& cfg);

/// One trial record as written to results.jsonl.
struct TrialRecord {
  int trial = 0;
  double snr_db = 0.0;
  std::vector<double> truth_deg;
  std::vector<double> estimates_deg;
  std::vector<double> group_energies;
  std::string stage = "coarse";
  double timing_ms = 0.0;
};

struct RunArtifacts {
  std::string results_path;   // JSONL, one record per trial
  std::string summary_path;   // CSV, one row per (J, snr)
  std::string meta_path;      // config echo + hash
  std::vector<TrialRecord> records;
};

// CLI entry points. Each writes its outputs under the given directory/path
// and returns what it wrote.

/// `device`: synthesize (or import) a fine-grid device, write the device file
/// and the per-direction magnitude CSV behind the response heatmaps.
std::string cmd_device(const ExperimentConfig& cfg, const std::string& out_path,
                       const std::string& csv_path = "");

/// `corpus`: write a synthetic speaker corpus description (JSON), optionally
/// rendering each source as WAV next to it.
std::string cmd_corpus(int num_female, int num_male, double duration_s, std::uint64_t seed,
                       int sample_rate, const std::string& out_path,
                       const std::string& wav_dir = "");

/// `train`: learn a dictionary from a corpus file, optionally band-restricted.
std::string cmd_train(const std::string& corpus_path, int atoms_per_speaker,
                      Divergence divergence, int iters, std::uint64_t seed, int sample_rate,
                      int window_len, double fmin_hz, double fmax_hz,
                      const std::string& out_path);

/// `run`: execute the experiment described by the config.
RunArtifacts cmd_run(const ExperimentConfig& cfg);

/// `report`: recompute summary tables and confusion heatmaps from the JSONL
/// records in a results directory.
std::vector<std::string> cmd_report(const std::string& results_dir, int model_directions);

/// Canonical hash of a results file with the timing fields excluded
/// (run-to-run determinism is judged on this).
std::string hash_results_file(const std::string& path);

}  // namespace scatloc

#endif  // SCATLOC_EXPERIMENT_HPP
