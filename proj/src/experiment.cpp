// src/experiment.cpp

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

#include "scatloc/experiment.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "scatloc/eval.hpp"
#include "scatloc/rng.hpp"
#include "scatloc/wav.hpp"
#include "scatloc/whiteloc.hpp"

namespace scatloc {
namespace fs = std::filesystem;
namespace {

std::uint64_t fnv1a(std::string_view s, std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << v;
  return os.str();
}

template <typename T>
T get_or(const nlohmann::json& j, const std::string& key, T fallback) {
  if (!j.contains(key)) return fallback;
  return j.at(key).get<T>();
}

void reject_unknown(const nlohmann::json& j, std::initializer_list<const char*> known,
                    const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* k : known)
      if (key == k) ok = true;
    if (!ok) throw ConfigError("unknown config key '" + key + "' in " + where);
  }
}

MagSpectrogram apply_band(const MagSpectrogram& mag, const BandSelection& band) {
  MagSpectrogram out;
  out.values.resize(static_cast<Eigen::Index>(band.bin_indices.size()), mag.values.cols());
  out.freq_axis.reserve(band.bin_indices.size());
  for (std::size_t j = 0; j < band.bin_indices.size(); ++j) {
    out.values.row(static_cast<Eigen::Index>(j)) = mag.values.row(band.bin_indices[j]);
    out.freq_axis.push_back(mag.freq_axis[static_cast<std::size_t>(band.bin_indices[j])]);
  }
  return out;
}

DirectionalResponseSet make_fine_device(const ExperimentConfig& cfg) {
  if (cfg.device_kind == "file") {
    DirectionalResponseSet set = load_device(cfg.device_path);
    if (!set.has_irs())
      throw ConfigError("device file lacks impulse responses; cannot render mixtures");
    return set;
  }
  const auto axis = fft_freq_axis(cfg.window_len, cfg.sample_rate);
  if (cfg.device_kind == "rough")
    return synth_rough_scatterer(cfg.fine_directions, axis, cfg.flat_below_hz,
                                 cfg.roughness_freq_hz, cfg.roughness_dir_deg, cfg.device_seed,
                                 cfg.log_std, cfg.sample_rate);
  if (cfg.device_kind == "smooth")
    return synth_smooth_scatterer(cfg.fine_directions, axis, cfg.device_seed, cfg.sample_rate);
  throw ConfigError("unknown device kind: " + cfg.device_kind);
}

std::vector<double> even_grid(int directions) {
  std::vector<double> az(static_cast<std::size_t>(directions));
  for (int i = 0; i < directions; ++i)
    az[static_cast<std::size_t>(i)] = 360.0 * i / directions;
  return az;
}

std::vector<SourceSpec> make_pool(const ExperimentConfig& cfg) {
  if (cfg.source_kind == "white") {
    SourceSpec s;
    s.kind = SourceSpec::Kind::kWhite;
    s.duration_s = cfg.source_duration_s;
    s.seed = cfg.source_seed;
    return {s};
  }
  if (cfg.source_kind == "harmonic-speakers")
    return make_speaker_pool(cfg.num_female, cfg.num_male, cfg.source_duration_s,
                             cfg.source_seed);
  if (cfg.source_kind == "prototype-colored") {
    std::vector<SourceSpec> pool;
    for (int i = 0; i < cfg.num_female + cfg.num_male; ++i) {
      SourceSpec s;
      s.kind = SourceSpec::Kind::kPrototypeColored;
      s.duration_s = cfg.source_duration_s;
      s.seed = derive_seed(cfg.source_seed, static_cast<std::uint64_t>(i) + 11);
      pool.push_back(s);
    }
    return pool;
  }
  throw ConfigError("unknown source kind: " + cfg.source_kind);
}

/// Time-averaged banded magnitude spectrum of each pool source, l2-normalized.
Dictionary prototypes_from_pool(const std::vector<SourceSpec>& pool, const ExperimentConfig& cfg,
                                const BandSelection& band,
                                const std::vector<double>& banded_axis) {
  Dictionary dict;
  dict.freq_axis = banded_axis;
  dict.atoms.resize(static_cast<Eigen::Index>(band.bin_indices.size()),
                    static_cast<Eigen::Index>(pool.size()));
  for (std::size_t i = 0; i < pool.size(); ++i) {
    const TimeSignal s = make_source(pool[i], cfg.sample_rate);
    const MagSpectrogram mag =
        apply_band(magnitude(stft(s, cfg.window_len, cfg.window_len / 2)), band);
    Eigen::VectorXd proto = mag.values.rowwise().mean();
    const double norm = proto.norm();
    if (!(norm > 0.0)) throw ConfigError("prototype source has an all-zero spectrum");
    dict.atoms.col(static_cast<Eigen::Index>(i)) = proto / norm;
    dict.atom_meta.push_back("proto" + std::to_string(i));
  }
  return dict;
}

nlohmann::ordered_json record_to_json(const TrialRecord& r) {
  nlohmann::ordered_json j;
  j["trial"] = r.trial;
  j["snr_db"] = r.snr_db;
  j["truth_deg"] = r.truth_deg;
  j["estimates_deg"] = r.estimates_deg;
  j["group_energies"] = r.group_energies;
  j["stage"] = r.stage;
  j["timing_ms"] = r.timing_ms;
  return j;
}

TrialRecord record_from_json(const nlohmann::json& j) {
  TrialRecord r;
  r.trial = j.at("trial");
  r.snr_db = j.at("snr_db");
  r.truth_deg = j.at("truth_deg").get<std::vector<double>>();
  r.estimates_deg = j.at("estimates_deg").get<std::vector<double>>();
  r.group_energies = get_or(j, "group_energies", std::vector<double>{});
  r.stage = get_or<std::string>(j, "stage", "coarse");
  r.timing_ms = get_or(j, "timing_ms", 0.0);
  return r;
}

void write_summary_csv(const std::string& path,
                       const std::map<std::pair<int, double>, std::vector<TrialOutcome>>& groups,
                       const std::string& device, const std::string& method,
                       const std::string& divergence, const std::string& hash) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  f << "device,method,divergence,J,snr_db,trials,accuracy,mean_error_deg,per_source_accuracy,"
       "config_hash\n";
  for (const auto& [key, outcomes] : groups) {
    const AccuracySummary s = bin_accuracy(outcomes, 10.0);
    f << device << ',' << method << ',' << divergence << ',' << key.first << ',' << key.second
      << ',' << outcomes.size() << ',' << s.accuracy << ',' << s.mean_error_of_hits << ','
      << s.per_source_accuracy << ',' << hash << '\n';
  }
}

}  // namespace

std::string to_string(Method m) {
  switch (m) {
    case Method::kWhite: return "white";
    case Method::kNmfPrototype: return "nmf-prototype";
    case Method::kNmfUsm: return "nmf-usm";
  }
  return "unknown";
}

Method method_from_string(const std::string& s) {
  if (s == "white") return Method::kWhite;
  if (s == "nmf-prototype") return Method::kNmfPrototype;
  if (s == "nmf-usm") return Method::kNmfUsm;
  throw ConfigError("unknown method: " + s);
}

ExperimentConfig parse_config(const nlohmann::json& j) {
  reject_unknown(j,
                 {"sample_rate", "window_len", "device", "grids", "band", "method", "divergence",
                  "lambda", "gamma", "iters", "random_init_seed", "dictionary", "sources",
                  "num_sources", "snr_db", "trials", "seed", "multires", "threads", "output_dir"},
                 "config");
  ExperimentConfig c;
  c.sample_rate = get_or(j, "sample_rate", c.sample_rate);
  c.window_len = get_or(j, "window_len", 0);
  if (c.window_len == 0) {
    // Default analysis window: 64 ms, rounded to the nearest even length.
    c.window_len = static_cast<int>(std::llround(0.064 * c.sample_rate / 2.0)) * 2;
  }
  if (j.contains("device")) {
    const auto& d = j.at("device");
    reject_unknown(d,
                   {"kind", "path", "seed", "flat_below_hz", "roughness_freq_hz",
                    "roughness_dir_deg", "log_std"},
                   "device");
    c.device_kind = get_or<std::string>(d, "kind", c.device_kind);
    c.device_path = get_or<std::string>(d, "path", "");
    c.device_seed = get_or(d, "seed", c.device_seed);
    c.flat_below_hz = get_or(d, "flat_below_hz", c.flat_below_hz);
    c.roughness_freq_hz = get_or(d, "roughness_freq_hz", c.roughness_freq_hz);
    c.roughness_dir_deg = get_or(d, "roughness_dir_deg", c.roughness_dir_deg);
    c.log_std = get_or(d, "log_std", c.log_std);
  }
  if (j.contains("grids")) {
    const auto& g = j.at("grids");
    reject_unknown(g, {"model_directions", "fine_directions"}, "grids");
    c.model_directions = get_or(g, "model_directions", c.model_directions);
    c.fine_directions = get_or(g, "fine_directions", c.fine_directions);
  }
  if (j.contains("band")) {
    const auto& b = j.at("band");
    reject_unknown(b, {"fmin_hz", "fmax_hz"}, "band");
    c.fmin_hz = get_or(b, "fmin_hz", c.fmin_hz);
    c.fmax_hz = get_or(b, "fmax_hz", c.fmax_hz);
  } else {
    c.fmax_hz = c.sample_rate / 2.0;
  }
  c.method = method_from_string(get_or<std::string>(j, "method", "white"));
  c.divergence = divergence_from_string(get_or<std::string>(j, "divergence", "itakura_saito"));
  c.lambda = get_or(j, "lambda", c.lambda);
  c.gamma = get_or(j, "gamma", c.gamma);
  c.iters = get_or(j, "iters", c.iters);
  if (j.contains("random_init_seed"))
    c.random_init_seed = j.at("random_init_seed").get<std::uint64_t>();
  c.dictionary_path = get_or<std::string>(j, "dictionary", "");
  if (j.contains("sources")) {
    const auto& s = j.at("sources");
    reject_unknown(s, {"kind", "duration_s", "num_female", "num_male", "seed", "reseed_per_trial"},
                   "sources");
    c.source_kind = get_or<std::string>(s, "kind", c.source_kind);
    c.source_duration_s = get_or(s, "duration_s", c.source_duration_s);
    c.num_female = get_or(s, "num_female", c.num_female);
    c.num_male = get_or(s, "num_male", c.num_male);
    c.source_seed = get_or(s, "seed", c.source_seed);
    c.reseed_per_trial = get_or(s, "reseed_per_trial", c.reseed_per_trial);
  }
  c.num_sources = get_or(j, "num_sources", c.num_sources);
  c.snr_db = get_or(j, "snr_db", c.snr_db);
  c.trials = get_or(j, "trials", c.trials);
  c.seed = get_or(j, "seed", c.seed);
  if (j.contains("multires")) {
    const auto& m = j.at("multires");
    reject_unknown(m, {"enabled", "candidates", "fine_step_deg", "neighbors", "lambda", "gamma"},
                   "multires");
    c.multires_enabled = get_or(m, "enabled", false);
    c.multires.candidates = get_or(m, "candidates", c.multires.candidates);
    c.multires.fine_step_deg = get_or(m, "fine_step_deg", c.multires.fine_step_deg);
    c.multires.neighbors = get_or(m, "neighbors", c.multires.neighbors);
    c.multires.lambda = get_or(m, "lambda", c.multires.lambda);
    c.multires.gamma = get_or(m, "gamma", c.multires.gamma);
  }
  c.threads = get_or(j, "threads", c.threads);
  c.output_dir = get_or<std::string>(j, "output_dir", "");

  // Consistency checks the run would otherwise hit late.
  if (c.sample_rate <= 0) throw ConfigError("sample_rate must be positive");
  if (c.window_len <= 0 || c.window_len % 2 != 0) throw ConfigError("window_len must be even");
  if (c.num_sources < 1) throw ConfigError("num_sources must be >= 1");
  if (c.trials < 1) throw ConfigError("trials must be >= 1");
  if (c.model_directions < 1 || c.fine_directions < c.model_directions)
    throw ConfigError("grids: need fine_directions >= model_directions >= 1");
  if (c.snr_db.empty()) throw ConfigError("snr_db must list at least one level");
  if (c.method == Method::kNmfUsm && c.dictionary_path.empty())
    throw ConfigError("method nmf-usm needs a dictionary path");
  if (!c.dictionary_path.empty() && !fs::exists(c.dictionary_path))
    throw ConfigError("dictionary file does not exist: " + c.dictionary_path);
  if (c.device_kind == "file" && !fs::exists(c.device_path))
    throw ConfigError("device file does not exist: " + c.device_path);
  if (c.method == Method::kNmfPrototype && c.reseed_per_trial)
    throw ConfigError("method nmf-prototype needs sources.reseed_per_trial = false "
                      "(prototypes are the exact pool waveforms)");
  if (c.threads < 1) throw ConfigError("threads must be >= 1");
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config: " + path);
  nlohmann::json j;
  try {
    f >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config parse error in " + path + ": " + e.what());
  }
  return parse_config(j);
}

nlohmann::ordered_json config_to_json(const ExperimentConfig& c) {
  nlohmann::ordered_json j;
  j["sample_rate"] = c.sample_rate;
  j["window_len"] = c.window_len;
  j["device"] = {{"kind", c.device_kind},      {"path", c.device_path},
                 {"seed", c.device_seed},      {"flat_below_hz", c.flat_below_hz},
                 {"roughness_freq_hz", c.roughness_freq_hz},
                 {"roughness_dir_deg", c.roughness_dir_deg},
                 {"log_std", c.log_std}};
  j["grids"] = {{"model_directions", c.model_directions},
                {"fine_directions", c.fine_directions}};
  j["band"] = {{"fmin_hz", c.fmin_hz}, {"fmax_hz", c.fmax_hz}};
  j["method"] = to_string(c.method);
  j["divergence"] = to_string(c.divergence);
  j["lambda"] = c.lambda;
  j["gamma"] = c.gamma;
  j["iters"] = c.iters;
  if (c.random_init_seed) j["random_init_seed"] = *c.random_init_seed;
  j["dictionary"] = c.dictionary_path;
  j["sources"] = {{"kind", c.source_kind},
                  {"duration_s", c.source_duration_s},
                  {"num_female", c.num_female},
                  {"num_male", c.num_male},
                  {"seed", c.source_seed},
                  {"reseed_per_trial", c.reseed_per_trial}};
  j["num_sources"] = c.num_sources;
  j["snr_db"] = c.snr_db;
  j["trials"] = c.trials;
  j["seed"] = c.seed;
  j["multires"] = {{"enabled", c.multires_enabled},
                   {"candidates", c.multires.candidates},
                   {"fine_step_deg", c.multires.fine_step_deg},
                   {"neighbors", c.multires.neighbors},
                   {"lambda", c.multires.lambda},
                   {"gamma", c.multires.gamma}};
  j["threads"] = c.threads;
  j["output_dir"] = c.output_dir;
  return j;
}

std::string config_hash(const ExperimentConfig& cfg) {
  // threads and output_dir do not affect the results, so they are excluded.
  nlohmann::ordered_json j = config_to_json(cfg);
  j.erase("threads");
  j.erase("output_dir");
  return hex64(fnv1a(j.dump()));
}

std::string cmd_device(const ExperimentConfig& cfg, const std::string& out_path,
                       const std::string& csv_path) {
  const DirectionalResponseSet set = make_fine_device(cfg);
  save_device(set, out_path);
  if (!csv_path.empty()) export_mags_csv(set, csv_path);
  return out_path;
}

std::string cmd_corpus(int num_female, int num_male, double duration_s, std::uint64_t seed,
                       int sample_rate, const std::string& out_path,
                       const std::string& wav_dir) {
  if (num_female + num_male < 1) throw ConfigError("corpus: need at least one speaker");
  const auto pool = make_speaker_pool(num_female, num_male, duration_s, seed);
  nlohmann::ordered_json j;
  j["sample_rate"] = sample_rate;
  j["speakers"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < pool.size(); ++i) {
    const bool female = static_cast<int>(i) < num_female;
    const std::string label =
        (female ? "f" : "m") + std::to_string(female ? i : i - static_cast<std::size_t>(num_female));
    j["speakers"].push_back({{"label", label},
                             {"kind", to_string(pool[i].kind)},
                             {"duration_s", pool[i].duration_s},
                             {"seed", pool[i].seed},
                             {"f0_hz", pool[i].f0_hz},
                             {"tilt_db_per_oct", pool[i].tilt_db_per_oct},
                             {"voice_seed", pool[i].voice_seed}});
    if (!wav_dir.empty()) {
      fs::create_directories(wav_dir);
      write_wav((fs::path(wav_dir) / (label + ".wav")).string(),
                make_source(pool[i], sample_rate));
    }
  }
  std::ofstream f(out_path);
  if (!f) throw std::runtime_error("cannot open " + out_path);
  f << j.dump(2) << '\n';
  return out_path;
}

std::string cmd_train(const std::string& corpus_path, int atoms_per_speaker,
                      Divergence divergence, int iters, std::uint64_t seed, int sample_rate,
                      int window_len, double fmin_hz, double fmax_hz,
                      const std::string& out_path) {
  std::ifstream f(corpus_path);
  if (!f) throw ConfigError("cannot open corpus: " + corpus_path);
  nlohmann::json corpus;
  try {
    f >> corpus;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("corpus parse error: ") + e.what());
  }
  const int sr = get_or(corpus, "sample_rate", sample_rate);
  const BandSelection band = select_band(fft_freq_axis(window_len, sr), fmin_hz, fmax_hz);

  std::vector<std::pair<std::string, MagSpectrogram>> training;
  for (const auto& sp : corpus.at("speakers")) {
    SourceSpec spec;
    spec.kind = source_kind_from_string(sp.at("kind"));
    spec.duration_s = sp.at("duration_s");
    spec.seed = sp.at("seed");
    spec.f0_hz = get_or(sp, "f0_hz", spec.f0_hz);
    spec.tilt_db_per_oct = get_or(sp, "tilt_db_per_oct", spec.tilt_db_per_oct);
    spec.voice_seed = get_or(sp, "voice_seed", spec.voice_seed);
    const TimeSignal s = make_source(spec, sr);
    training.emplace_back(sp.at("label"),
                          apply_band(magnitude(stft(s, window_len, window_len / 2)), band));
  }
  const Dictionary dict = learn_dictionary(training, atoms_per_speaker, divergence, iters, seed);
  save_dictionary(dict, out_path);
  return out_path;
}

RunArtifacts cmd_run(const ExperimentConfig& cfg) {
  const DirectionalResponseSet fine = make_fine_device(cfg);
  const DirectionalResponseSet model = interpolate_to_grid(fine, even_grid(cfg.model_directions));
  auto [model_banded, band] = band_select(model, cfg.fmin_hz, cfg.fmax_hz);
  const std::vector<SourceSpec> pool = make_pool(cfg);

  Dictionary dict;
  if (cfg.method == Method::kNmfPrototype) {
    dict = prototypes_from_pool(pool, cfg, band, model_banded.freq_axis);
  } else if (cfg.method == Method::kNmfUsm) {
    dict = load_dictionary(cfg.dictionary_path);
    if (dict.num_bins() != model_banded.num_bins())
      throw ConfigError("dictionary frequency grid does not match the band-selected device");
  }

  SolverConfig solver;
  solver.divergence = cfg.divergence;
  solver.lambda = cfg.lambda;
  solver.gamma = cfg.gamma;
  solver.iters = cfg.iters;
  solver.random_init_seed = cfg.random_init_seed;

  const int total = static_cast<int>(cfg.snr_db.size()) * cfg.trials;
  std::vector<TrialRecord> records(static_cast<std::size_t>(total));
  std::string abort_message;

#pragma omp parallel for schedule(dynamic) num_threads(cfg.threads) if (cfg.threads > 1)
  for (int idx = 0; idx < total; ++idx) {
    try {
      const int snr_index = idx / cfg.trials;
      const double snr = cfg.snr_db[static_cast<std::size_t>(snr_index)];
      const Scene scene =
          random_scene(cfg.num_sources, cfg.fine_directions, pool, snr,
                       derive_seed(cfg.seed, static_cast<std::uint64_t>(idx)), cfg.sample_rate,
                       cfg.reseed_per_trial);
      const TimeSignal y = render_mixture(scene, fine);

      TrialRecord rec;
      rec.trial = idx % cfg.trials;
      rec.snr_db = snr;
      for (const auto& [az, sig] : scene.sources) rec.truth_deg.push_back(az);

      const auto t0 = std::chrono::steady_clock::now();
      if (cfg.method == Method::kWhite) {
        const ComplexSpectrogram spec = stft(y, cfg.window_len, cfg.window_len / 2);
        const Eigen::VectorXd psd = empirical_psd(spec);
        Eigen::VectorXd banded(static_cast<Eigen::Index>(band.bin_indices.size()));
        for (std::size_t k = 0; k < band.bin_indices.size(); ++k)
          banded(static_cast<Eigen::Index>(k)) = psd(band.bin_indices[k]);
        const WhiteLocResult res = localize_white(banded, model_banded, cfg.num_sources);
        for (int d : res.subset)
          rec.estimates_deg.push_back(model_banded.azimuths_deg[static_cast<std::size_t>(d)]);
        if (cfg.num_sources == 1) rec.group_energies = res.residuals;
        rec.stage = "coarse";
      } else {
        const DoAResult res =
            localize(y, model, dict, cfg.num_sources, solver, band,
                     cfg.multires_enabled ? std::optional<MultiresConfig>(cfg.multires)
                                          : std::nullopt,
                     cfg.multires_enabled ? &fine : nullptr);
        rec.estimates_deg = res.estimates_deg;
        rec.group_energies = res.group_energies;
        rec.stage = res.stage == DoAResult::Stage::kRefined ? "refined" : "coarse";
      }
      const auto t1 = std::chrono::steady_clock::now();
      rec.timing_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
      records[static_cast<std::size_t>(idx)] = std::move(rec);
    } catch (const std::exception& e) {
#pragma omp critical
      abort_message = e.what();
    }
  }
  if (!abort_message.empty()) throw SolverAbort("trial failed: " + abort_message);

  // Outputs.
  std::string outdir = cfg.output_dir;
  if (outdir.empty()) {
    const char* env = std::getenv("SCATLOC_OUT");
    outdir = env != nullptr ? env : ".";
  }
  fs::create_directories(outdir);
  RunArtifacts art;
  art.records = std::move(records);
  art.results_path = (fs::path(outdir) / "results.jsonl").string();
  art.summary_path = (fs::path(outdir) / "summary.csv").string();
  art.meta_path = (fs::path(outdir) / "meta.json").string();

  {
    std::ofstream f(art.results_path);
    if (!f) throw std::runtime_error("cannot open " + art.results_path);
    for (const auto& r : art.records) f << record_to_json(r).dump() << '\n';
  }
  {
    nlohmann::ordered_json meta;
    meta["config_hash"] = config_hash(cfg);
    meta["config"] = config_to_json(cfg);
    std::ofstream f(art.meta_path);
    f << meta.dump(2) << '\n';
  }
  {
    std::map<std::pair<int, double>, std::vector<TrialOutcome>> groups;
    for (const auto& r : art.records)
      groups[{static_cast<int>(r.truth_deg.size()), r.snr_db}].push_back(
          evaluate_trial(r.truth_deg, r.estimates_deg));
    write_summary_csv(art.summary_path, groups, model.label, to_string(cfg.method),
                      to_string(cfg.divergence), config_hash(cfg));
    for (const auto& [key, outcomes] : groups) {
      const ConfusionMatrix cm = accumulate_confusion(outcomes, cfg.model_directions);
      std::ostringstream base;
      base << "confusion_J" << key.first << "_snr" << key.second;
      write_confusion_csv(cm, (fs::path(outdir) / (base.str() + ".csv")).string());
      write_confusion_svg(cm, (fs::path(outdir) / (base.str() + ".svg")).string());
    }
  }
  return art;
}

std::vector<std::string> cmd_report(const std::string& results_dir, int model_directions) {
  const fs::path dir(results_dir);
  const fs::path results = dir / "results.jsonl";
  if (!fs::exists(results)) throw ConfigError("no results.jsonl in " + results_dir);

  std::vector<TrialRecord> records;
  std::ifstream f(results);
  std::string line;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    records.push_back(record_from_json(nlohmann::json::parse(line)));
  }
  if (records.empty()) throw ConfigError("results.jsonl is empty");

  std::map<std::pair<int, double>, std::vector<TrialOutcome>> groups;
  for (const auto& r : records)
    groups[{static_cast<int>(r.truth_deg.size()), r.snr_db}].push_back(
        evaluate_trial(r.truth_deg, r.estimates_deg));

  std::vector<std::string> written;
  const std::string summary = (dir / "report_summary.csv").string();
  write_summary_csv(summary, groups, "-", "-", "-", "-");
  written.push_back(summary);
  for (const auto& [key, outcomes] : groups) {
    const ConfusionMatrix cm = accumulate_confusion(outcomes, model_directions);
    std::ostringstream base;
    base << "report_confusion_J" << key.first << "_snr" << key.second;
    const std::string csv = (dir / (base.str() + ".csv")).string();
    const std::string svg = (dir / (base.str() + ".svg")).string();
    write_confusion_csv(cm, csv);
    write_confusion_svg(cm, svg);
    written.push_back(csv);
    written.push_back(svg);
  }
  return written;
}

std::string hash_results_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  std::string line;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    nlohmann::ordered_json j = nlohmann::ordered_json::parse(line);
    j.erase("timing_ms");
    h = fnv1a(j.dump(), h);
  }
  return hex64(h);
}

}  // namespace scatloc
