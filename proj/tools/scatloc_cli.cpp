// tools/scatloc_cli.cpp

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

#include <CLI11.hpp>
#include <iostream>

#include "scatloc/experiment.hpp"

// Exit codes: 0 success, 2 config error, 3 solver abort, 1 anything else.

int main(int argc, char** argv) {
  CLI::App app{"Monaural direction-of-arrival estimation with a scattering device"};
  app.require_subcommand(1);

  // --- device ---
  auto* dev = app.add_subcommand("device", "Synthesize or import a directional response set");
  std::string dev_kind = "rough", dev_path, dev_out = "device.sdev", dev_csv;
  std::uint64_t dev_seed = 1;
  int dev_dirs = 360, dev_sr = 16000, dev_window = 1024;
  double dev_flat = 3000.0, dev_rfreq = 200.0, dev_rdir = 10.0, dev_logstd = 1.0;
  dev->add_option("--kind", dev_kind, "rough | smooth | file")->capture_default_str();
  dev->add_option("--path", dev_path, "input device file (kind=file)");
  dev->add_option("--directions", dev_dirs, "fine grid size")->capture_default_str();
  dev->add_option("--seed", dev_seed)->capture_default_str();
  dev->add_option("--sample-rate", dev_sr)->capture_default_str();
  dev->add_option("--window", dev_window, "analysis window length")->capture_default_str();
  dev->add_option("--flat-below-hz", dev_flat)->capture_default_str();
  dev->add_option("--roughness-freq-hz", dev_rfreq)->capture_default_str();
  dev->add_option("--roughness-dir-deg", dev_rdir)->capture_default_str();
  dev->add_option("--log-std", dev_logstd)->capture_default_str();
  dev->add_option("--out", dev_out, "output device file")->capture_default_str();
  dev->add_option("--csv", dev_csv, "also export the magnitude heatmap CSV");

  // --- corpus ---
  auto* corpus = app.add_subcommand("corpus", "Generate a synthetic speaker corpus");
  int c_female = 25, c_male = 25, c_sr = 16000;
  double c_duration = 3.0;
  std::uint64_t c_seed = 5;
  std::string c_out = "corpus.json", c_wav_dir;
  corpus->add_option("--num-female", c_female)->capture_default_str();
  corpus->add_option("--num-male", c_male)->capture_default_str();
  corpus->add_option("--duration", c_duration, "seconds per speaker")->capture_default_str();
  corpus->add_option("--seed", c_seed)->capture_default_str();
  corpus->add_option("--sample-rate", c_sr)->capture_default_str();
  corpus->add_option("--out", c_out)->capture_default_str();
  corpus->add_option("--wav-dir", c_wav_dir, "also render speakers as WAV files");

  // --- train ---
  auto* train = app.add_subcommand("train", "Learn a dictionary from a corpus");
  std::string t_corpus, t_out = "dictionary.sdict", t_div = "itakura_saito";
  int t_atoms = 10, t_iters = 200, t_sr = 16000, t_window = 1024;
  double t_fmin = 0.0, t_fmax = 8000.0;
  std::uint64_t t_seed = 3;
  train->add_option("--corpus", t_corpus, "corpus JSON")->required();
  train->add_option("--atoms", t_atoms, "atoms per speaker")->capture_default_str();
  train->add_option("--divergence", t_div, "itakura_saito | euclidean")->capture_default_str();
  train->add_option("--iters", t_iters)->capture_default_str();
  train->add_option("--seed", t_seed)->capture_default_str();
  train->add_option("--sample-rate", t_sr)->capture_default_str();
  train->add_option("--window", t_window)->capture_default_str();
  train->add_option("--band-fmin", t_fmin)->capture_default_str();
  train->add_option("--band-fmax", t_fmax)->capture_default_str();
  train->add_option("--out", t_out)->capture_default_str();

  // --- run ---
  auto* run = app.add_subcommand("run", "Run the experiment described by a config file");
  std::string r_config;
  int r_threads = 0;
  std::string r_outdir;
  run->add_option("--config", r_config, "experiment config JSON")->required();
  run->add_option("--threads", r_threads, "override config.threads");
  run->add_option("--out", r_outdir, "override config.output_dir");

  // --- report ---
  auto* report = app.add_subcommand("report", "Rebuild tables and heatmaps from results.jsonl");
  std::string p_dir = ".";
  int p_dirs = 36;
  report->add_option("--dir", p_dir, "results directory")->capture_default_str();
  report->add_option("--directions", p_dirs, "model grid size for confusion bins")
      ->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (dev->parsed()) {
      scatloc::ExperimentConfig cfg;
      cfg.device_kind = dev_kind;
      cfg.device_path = dev_path;
      cfg.device_seed = dev_seed;
      cfg.fine_directions = dev_dirs;
      cfg.model_directions = 1;
      cfg.sample_rate = dev_sr;
      cfg.window_len = dev_window;
      cfg.flat_below_hz = dev_flat;
      cfg.roughness_freq_hz = dev_rfreq;
      cfg.roughness_dir_deg = dev_rdir;
      cfg.log_std = dev_logstd;
      std::cout << scatloc::cmd_device(cfg, dev_out, dev_csv) << '\n';
    } else if (corpus->parsed()) {
      std::cout << scatloc::cmd_corpus(c_female, c_male, c_duration, c_seed, c_sr, c_out,
                                       c_wav_dir)
                << '\n';
    } else if (train->parsed()) {
      std::cout << scatloc::cmd_train(t_corpus, t_atoms, scatloc::divergence_from_string(t_div),
                                      t_iters, t_seed, t_sr, t_window, t_fmin, t_fmax, t_out)
                << '\n';
    } else if (run->parsed()) {
      scatloc::ExperimentConfig cfg = scatloc::load_config(r_config);
      if (r_threads > 0) cfg.threads = r_threads;
      if (!r_outdir.empty()) cfg.output_dir = r_outdir;
      const auto art = scatloc::cmd_run(cfg);
      std::cout << art.results_path << '\n' << art.summary_path << '\n';
    } else if (report->parsed()) {
      for (const auto& path : scatloc::cmd_report(p_dir, p_dirs)) std::cout << path << '\n';
    }
  } catch (const scatloc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const scatloc::SolverAbort& e) {
    std::cerr << "solver abort: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
