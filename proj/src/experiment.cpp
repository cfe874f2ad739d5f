// Copyright 2026 The gritnet Authors. All Rights Reserved.
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

#include "gritnet/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>
#include <type_traits>

#include "gritnet/checkpoint.hpp"
#include "gritnet/common.hpp"
#include "gritnet/error.hpp"
#include "gritnet/kernels.hpp"

namespace fs = std::filesystem;

namespace gritnet {

void ExperimentConfig::validate() const {
  if (weeks.empty()) throw ConfigError("weeks must not be empty");
  for (std::size_t n = 0; n < weeks.size(); ++n) {
    if (weeks[n] < 1) throw ConfigError("weeks must be positive");
    if (n > 0 && weeks[n] <= weeks[n - 1]) throw ConfigError("weeks must be strictly ascending");
  }
  for (double t : thetas) {
    if (!(t > 0.0 && t < 1.0)) throw ConfigError("thetas must lie in (0, 1), got " + format_double(t));
  }
  if (seeds.empty()) throw ConfigError("seeds must not be empty");
  if (folds < 2) throw ConfigError("folds must be >= 2");
  if (adapt_epochs < 1) throw ConfigError("adapt epochs must be >= 1");
  if (arr_first_week > arr_last_week) throw ConfigError("arr_weeks must be ascending");
  if (!source.profile && (source.events_path.empty() || source.schema_path.empty())) {
    throw ConfigError("source needs a profile or events + schema files");
  }
  if (source.shift) throw ConfigError("source cannot be a shift");
  if (target.shift && !source.profile) {
    throw ConfigError("a target shift requires a synthetic source profile");
  }
  if (!target.synthetic() && (target.events_path.empty() || target.schema_path.empty())) {
    throw ConfigError("target needs a profile, a shift, or events + schema files");
  }
  try {
    LayerConfig probe = layers;
    probe.vocab_size = 1;
    probe.validate();
    train.validate();
  } catch (const ArgumentError& e) {
    throw ConfigError(e.what());
  }
}

ExperimentConfig default_experiment_config() {
  ExperimentConfig c;
  CourseProfile src = profile_nd_a_v1();
  src.n_students = 1400;
  c.source.profile = src;
  ShiftSpec shift;
  shift.contents_delta = 568 - 471;
  shift.quizzes_delta = 84 - 168;
  shift.projects_delta = 10 - 4;
  shift.pacing_scale = 0.8;
  shift.graduation_rate_delta = 0.394 - 0.214;
  shift.mean_length_scale = 675.0 / 421.0;
  shift.reorder_fraction = 0.05;
  shift.revisit_struggle_delta = 8.0;
  shift.n_students = 1100;
  c.target.shift = shift;
  c.layers.embed_dim = 64;
  c.layers.hidden_dim = 32;
  c.train.epochs = 10;
  c.train.patience = 3;
  c.train.max_sequence_length = 512;
  return c;
}

namespace {

const char* mode_name(PseudoLabelMode m) {
  return m == PseudoLabelMode::kBinarize ? "binarize" : "confidence_filter";
}

void check_keys(const nlohmann::json& j, std::initializer_list<const char*> keys, const char* what) {
  if (!j.is_object()) throw ConfigError(std::string(what) + " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (std::find_if(keys.begin(), keys.end(), [&](const char* k) { return key == k; }) ==
        keys.end()) {
      throw ConfigError(std::string(what) + ": unknown field '" + key + "'");
    }
  }
}

template <typename T>
void get_opt(const nlohmann::json& j, const char* key, T& out, const char* what) {
  auto it = j.find(key);
  if (it == j.end()) return;
  if constexpr (std::is_unsigned_v<T> && !std::is_same_v<T, bool>) {
    // get<unsigned>() would wrap a negative number around
    if (!it->is_number_unsigned()) {
      throw ConfigError(std::string(what) + ": field '" + key + "' must be a non-negative integer");
    }
  }
  try {
    out = it->get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(std::string(what) + ": field '" + key + "' has the wrong type");
  }
}

std::string resolve(const std::string& base, const std::string& path) {
  if (path.empty() || fs::path(path).is_absolute()) return path;
  return (fs::path(base) / path).lexically_normal().string();
}

CourseSource source_from_json(const nlohmann::json& j, const std::string& base, bool target) {
  if (target) {
    check_keys(j, {"profile", "shift", "events", "schema"}, "target");
  } else {
    check_keys(j, {"profile", "events", "schema"}, "source");
  }
  CourseSource s;
  if (j.contains("profile")) s.profile = profile_from_json(j.at("profile"));
  if (j.contains("shift")) s.shift = shift_from_json(j.at("shift"));
  get_opt(j, "events", s.events_path, "course");
  get_opt(j, "schema", s.schema_path, "course");
  s.events_path = resolve(base, s.events_path);
  s.schema_path = resolve(base, s.schema_path);
  int kinds = (s.profile ? 1 : 0) + (s.shift ? 1 : 0) +
              (!s.events_path.empty() || !s.schema_path.empty() ? 1 : 0);
  if (kinds != 1) {
    throw ConfigError("course must give exactly one of profile, shift, or events + schema");
  }
  return s;
}

nlohmann::json source_to_json(const CourseSource& s) {
  nlohmann::json j = nlohmann::json::object();
  if (s.profile) j["profile"] = profile_to_json(*s.profile);
  if (s.shift) j["shift"] = shift_to_json(*s.shift);
  if (!s.events_path.empty()) j["events"] = s.events_path;
  if (!s.schema_path.empty()) j["schema"] = s.schema_path;
  return j;
}

}  // namespace

ExperimentConfig experiment_config_from_json(const nlohmann::json& j, const std::string& base) {
  check_keys(j,
             {"source", "target", "weeks", "thetas", "seeds", "model", "train", "adapt",
              "baseline", "folds", "arr_weeks", "write_checkpoints"},
             "config");
  ExperimentConfig c = default_experiment_config();
  if (j.contains("source")) c.source = source_from_json(j.at("source"), base, false);
  if (j.contains("target")) c.target = source_from_json(j.at("target"), base, true);
  get_opt(j, "weeks", c.weeks, "config");
  get_opt(j, "thetas", c.thetas, "config");
  if (auto it = j.find("seeds"); it != j.end() && it->is_array()) {
    for (const auto& v : *it) {
      if (!v.is_number_unsigned()) throw ConfigError("config: seeds must be non-negative integers");
    }
  }
  get_opt(j, "seeds", c.seeds, "config");
  get_opt(j, "folds", c.folds, "config");
  get_opt(j, "write_checkpoints", c.write_checkpoints, "config");
  if (auto it = j.find("arr_weeks"); it != j.end()) {
    std::vector<int> w;
    get_opt(j, "arr_weeks", w, "config");
    if (w.size() != 2) throw ConfigError("arr_weeks must be [first, last]");
    c.arr_first_week = w[0];
    c.arr_last_week = w[1];
  }
  if (auto it = j.find("model"); it != j.end()) {
    check_keys(*it, {"embed_dim", "hidden_dim"}, "model");
    get_opt(*it, "embed_dim", c.layers.embed_dim, "model");
    get_opt(*it, "hidden_dim", c.layers.hidden_dim, "model");
  }
  if (auto it = j.find("train"); it != j.end()) {
    check_keys(*it,
               {"batch_size", "epochs", "patience", "learning_rate", "rho", "epsilon",
                "max_sequence_length"},
               "train");
    get_opt(*it, "batch_size", c.train.batch_size, "train");
    get_opt(*it, "epochs", c.train.epochs, "train");
    get_opt(*it, "patience", c.train.patience, "train");
    get_opt(*it, "learning_rate", c.train.optimizer.lr, "train");
    get_opt(*it, "rho", c.train.optimizer.rho, "train");
    get_opt(*it, "epsilon", c.train.optimizer.eps, "train");
    get_opt(*it, "max_sequence_length", c.train.max_sequence_length, "train");
  }
  if (auto it = j.find("adapt"); it != j.end()) {
    check_keys(*it, {"epochs", "mode"}, "adapt");
    get_opt(*it, "epochs", c.adapt_epochs, "adapt");
    std::string mode = mode_name(c.pseudo_label_mode);
    get_opt(*it, "mode", mode, "adapt");
    if (mode == "binarize") {
      c.pseudo_label_mode = PseudoLabelMode::kBinarize;
    } else if (mode == "confidence_filter") {
      c.pseudo_label_mode = PseudoLabelMode::kConfidenceFilter;
    } else {
      throw ConfigError("adapt: unknown mode '" + mode + "'");
    }
  }
  if (auto it = j.find("baseline"); it != j.end()) {
    check_keys(*it, {"l2", "learning_rate", "iterations"}, "baseline");
    get_opt(*it, "l2", c.logreg.l2, "baseline");
    get_opt(*it, "learning_rate", c.logreg.learning_rate, "baseline");
    get_opt(*it, "iterations", c.logreg.iterations, "baseline");
  }
  c.validate();
  return c;
}

nlohmann::json experiment_config_to_json(const ExperimentConfig& c) {
  return {{"source", source_to_json(c.source)},
          {"target", source_to_json(c.target)},
          {"weeks", c.weeks},
          {"thetas", c.thetas},
          {"seeds", c.seeds},
          {"model", {{"embed_dim", c.layers.embed_dim}, {"hidden_dim", c.layers.hidden_dim}}},
          {"train",
           {{"batch_size", c.train.batch_size},
            {"epochs", c.train.epochs},
            {"patience", c.train.patience},
            {"learning_rate", c.train.optimizer.lr},
            {"rho", c.train.optimizer.rho},
            {"epsilon", c.train.optimizer.eps},
            {"max_sequence_length", c.train.max_sequence_length}}},
          {"adapt", {{"epochs", c.adapt_epochs}, {"mode", mode_name(c.pseudo_label_mode)}}},
          {"baseline",
           {{"l2", c.logreg.l2},
            {"learning_rate", c.logreg.learning_rate},
            {"iterations", c.logreg.iterations}}},
          {"folds", c.folds},
          {"arr_weeks", {c.arr_first_week, c.arr_last_week}},
          {"write_checkpoints", c.write_checkpoints}};
}

std::string config_hash(const ExperimentConfig& config) {
  return hex64(fnv1a64(experiment_config_to_json(config).dump()));
}

Dataset load_dataset_files(const std::string& events_path, const std::string& schema_path) {
  CourseSchema schema;
  try {
    schema = schema_from_json(nlohmann::json::parse(read_file(schema_path)));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(schema_path + ": " + e.what());
  }
  std::ifstream in(events_path);
  if (!in) throw DataError("cannot open " + events_path);
  return parse_event_log(in, schema, fs::path(events_path).stem().string());
}

Dataset load_source(const CourseSource& source, std::uint64_t seed) {
  if (source.profile) return generate_course(*source.profile, mix_seed(seed, 1));
  return load_dataset_files(source.events_path, source.schema_path);
}

Dataset load_target(const CourseSource& target, const CourseSource& source, std::uint64_t seed) {
  if (target.profile) return generate_course(*target.profile, mix_seed(seed, 2));
  if (target.shift) {
    if (!source.profile) throw ConfigError("a target shift requires a synthetic source profile");
    return generate_course(apply_shift(*source.profile, *target.shift), mix_seed(seed, 2));
  }
  return load_dataset_files(target.events_path, target.schema_path);
}

SourceTraining train_source_model(const std::vector<EncodedSequence>& sequences,
                                  const OrdinalMap& map, const LayerConfig& layers,
                                  TrainConfig config, std::size_t folds, std::uint64_t seed) {
  std::vector<bool> labels;
  labels.reserve(sequences.size());
  for (const auto& s : sequences) labels.push_back(s.label);
  std::vector<std::vector<std::size_t>> split;
  try {
    split = stratified_kfold(labels, folds, mix_seed(seed, 1));
  } catch (const ArgumentError& e) {
    throw DataError(std::string("source course too small for a validation split: ") + e.what());
  }
  SourceTraining out;
  out.validation_index = split[0];
  std::sort(out.validation_index.begin(), out.validation_index.end());
  std::vector<bool> held(sequences.size(), false);
  for (std::size_t i : out.validation_index) held[i] = true;
  std::vector<EncodedSequence> fit, val;
  for (std::size_t i = 0; i < sequences.size(); ++i) {
    (held[i] ? val : fit).push_back(sequences[i]);
  }
  out.model = build_model(layers, map, mix_seed(seed, 2));
  config.seed = mix_seed(seed, 3);
  out.history = train(out.model, fit, config, val);
  return out;
}

AdaptConfig make_adapt_config(const TrainConfig& train, int epochs, PseudoLabelMode mode,
                              std::uint64_t seed) {
  AdaptConfig a;
  a.train = train;
  a.train.epochs = epochs;
  a.train.patience = 0;
  a.train.seed = seed;
  a.mode = mode;
  return a;
}

StageSeeds stage_seeds(std::uint64_t seed, int week) {
  const auto w = static_cast<std::uint64_t>(week);
  return {seed, mix_seed(seed, 1000 + w), mix_seed(seed, 2000 + w)};
}

std::string theta_label(double theta) { return format_double(theta); }

namespace {

struct Logger {
  std::ostream* out = nullptr;
  std::mutex mu;
  void operator()(const std::string& line) {
    if (!out) return;
    std::lock_guard lock(mu);
    *out << line << '\n';
    out->flush();
  }
};

std::vector<bool> labels_of(const std::vector<EncodedSequence>& seqs) {
  std::vector<bool> y;
  y.reserve(seqs.size());
  for (const auto& s : seqs) y.push_back(s.label);
  return y;
}

std::string scores_csv(const std::vector<EncodedSequence>& seqs, const WeekScores& s,
                       const std::vector<double>& thetas) {
  std::ostringstream out;
  out << "student_id,label,vanilla,gritnet,oracle";
  for (double t : thetas) out << ",adapted_" << theta_label(t);
  out << '\n';
  auto cell = [&](const std::optional<std::vector<double>>& v, std::size_t i) {
    out << ',';
    if (v) out << format_double((*v)[i]);
  };
  for (std::size_t i = 0; i < seqs.size(); ++i) {
    out << seqs[i].student_id << ',' << (s.labels[i] ? 1 : 0);
    cell(s.vanilla, i);
    cell(s.gritnet, i);
    cell(s.oracle, i);
    for (double t : thetas) {
      out << ',';
      auto it = s.adapted.find(t);
      if (it != s.adapted.end()) out << format_double(it->second[i]);
    }
    out << '\n';
  }
  return out.str();
}

void write_roc(const fs::path& dir, const std::string& setup, const std::vector<double>& scores,
               const std::vector<bool>& labels) {
  bool pos = std::find(labels.begin(), labels.end(), true) != labels.end();
  bool neg = std::find(labels.begin(), labels.end(), false) != labels.end();
  if (!pos || !neg) return;
  write_file((dir / ("roc-" + setup + ".csv")).string(), roc_to_csv(roc_curve(scores, labels)));
}

nlohmann::json history_json(const TrainHistory& h) {
  return {{"epochs", h.epochs_completed()},
          {"best_epoch", h.best_epoch},
          {"early_stopped", h.early_stopped},
          {"train_loss", h.train_loss},
          {"val_loss", h.val_loss}};
}

struct CellResult {
  WeekScores scores;
  nlohmann::json info;
};

struct SeedData {
  Dataset source;
  Dataset target;
  OrdinalMap source_map;
  OrdinalMap target_map;
  std::string error;
};

CellResult run_cell(const ExperimentConfig& config, const SeedData& data, std::uint64_t seed,
                    int week, const fs::path& dir, Logger& log) {
  CellResult cell;
  WeekScores& sc = cell.scores;
  sc.week = week;
  const StageSeeds seeds = stage_seeds(seed, week);
  cell.info = {{"week", week}, {"train_seed", seeds.train}, {"adapt_seed", seeds.adapt}};
  const std::string tag = "seed " + std::to_string(seed) + " week " + std::to_string(week);

  const Dataset src = truncate_to_week(data.source, week);
  const Dataset tgt = truncate_to_week(data.target, week);
  const auto enc_src = encode_dataset(src, data.source_map);
  const auto enc_tgt = encode_dataset(tgt, data.target_map);
  sc.labels = labels_of(enc_tgt);
  fs::create_directories(dir);

  auto fail = [&](const std::string& setup, const std::exception& e) {
    sc.failures[setup] = e.what();
    log(tag + ": " + setup + " failed: " + e.what());
  };

  try {
    std::vector<bool> y;
    for (const auto& r : src.students) y.push_back(r.graduated);
    LogRegModel lr = train_logreg(featurize(src), y, config.logreg);
    sc.vanilla = predict_logreg(lr, featurize(tgt));
    if (config.write_checkpoints) {
      write_file((dir / "vanilla.json").string(), logreg_to_json(lr).dump(2) + "\n");
    }
  } catch (const std::exception& e) {
    fail("vanilla", e);
  }

  std::optional<GritNetModel> source_model;
  PooledFeatures features;
  try {
    SourceTraining st = train_source_model(enc_src, data.source_map, config.layers, config.train,
                                           config.folds, seeds.train);
    cell.info["source_training"] = history_json(st.history);
    cell.info["t_max"] = st.model.t_max;
    // Adaptation only retrains fc, so one pass over the target serves the
    // baseline, every adapted model and the oracle.
    features = pooled_features(st.model, enc_tgt);
    sc.gritnet = predict_from_features(st.model, features);
    if (config.write_checkpoints) save_model(st.model, (dir / "source.grit").string());
    source_model = std::move(st.model);
    log(tag + ": gritnet trained (" + std::to_string(st.history.epochs_completed()) + " epochs)");
  } catch (const std::exception& e) {
    fail("gritnet", e);
  }

  if (source_model) {
    AdaptConfig ac = make_adapt_config(config.train, config.adapt_epochs, config.pseudo_label_mode,
                                       seeds.adapt);
    for (double theta : config.thetas) {
      const std::string name = "adapted-" + theta_label(theta);
      try {
        AdaptResult r = domain_adapt(*source_model, enc_tgt, theta, ac, &features);
        sc.adapted[theta] = predict_from_features(r.model, features);
        cell.info["adapt"][theta_label(theta)] = {{"positive_rate", r.pseudo.positive_rate()},
                                                  {"examples", r.pseudo.sequences.size()},
                                                  {"train_loss", r.history.train_loss}};
        if (config.write_checkpoints) save_model(r.model, (dir / (name + ".grit")).string());
      } catch (const std::exception& e) {
        fail(name, e);
      }
    }
    try {
      OracleResult r = oracle_adapt(*source_model, enc_tgt, sc.labels, ac, &features);
      sc.oracle = predict_from_features(r.model, features);
      if (config.write_checkpoints) save_model(r.model, (dir / "oracle.grit").string());
    } catch (const std::exception& e) {
      fail("oracle", e);
    }
  } else {
    sc.failures.emplace("oracle", "no source model");
    for (double theta : config.thetas) {
      sc.failures.emplace("adapted-" + theta_label(theta), "no source model");
    }
  }

  if (sc.vanilla) write_roc(dir, "vanilla", *sc.vanilla, sc.labels);
  if (sc.gritnet) write_roc(dir, "gritnet", *sc.gritnet, sc.labels);
  if (sc.oracle) write_roc(dir, "oracle", *sc.oracle, sc.labels);
  for (const auto& [theta, s] : sc.adapted) write_roc(dir, "adapted-" + theta_label(theta), s, sc.labels);
  write_file((dir / "scores.csv").string(), scores_csv(enc_tgt, sc, config.thetas));
  if (!sc.failures.empty()) cell.info["errors"] = sc.failures;
  return cell;
}

template <typename Fn>
void parallel_for(std::size_t n, unsigned jobs, Fn&& fn) {
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  if (jobs == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < jobs; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < n;) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config, const std::string& out_dir,
                                unsigned jobs, std::ostream* log_stream) {
  config.validate();
  Logger log{log_stream, {}};
  const fs::path root(out_dir);
  fs::create_directories(root);

  const std::size_t n_seeds = config.seeds.size();
  std::vector<SeedData> data(n_seeds);
  parallel_for(n_seeds, jobs, [&](std::size_t i) {
    SeedData& d = data[i];
    try {
      d.source = load_source(config.source, config.seeds[i]);
      d.target = load_target(config.target, config.source, config.seeds[i]);
      d.source_map = build_ordinal_map(d.source.schema);
      d.target_map = build_aligned_map(d.target.schema, d.source_map);
      log("seed " + std::to_string(config.seeds[i]) + ": source " +
          std::to_string(d.source.students.size()) + " students, target " +
          std::to_string(d.target.students.size()) + " students");
    } catch (const std::exception& e) {
      d.error = e.what();
      log("seed " + std::to_string(config.seeds[i]) + ": data failed: " + e.what());
    }
  });

  const std::size_t n_weeks = config.weeks.size();
  std::vector<CellResult> cells(n_seeds * n_weeks);
  parallel_for(cells.size(), jobs, [&](std::size_t idx) {
    const std::size_t si = idx / n_weeks, wi = idx % n_weeks;
    const std::uint64_t seed = config.seeds[si];
    const int week = config.weeks[wi];
    CellResult& cell = cells[idx];
    if (!data[si].error.empty()) {
      cell.scores.week = week;
      cell.scores.failures["data"] = data[si].error;
      cell.info = {{"week", week}, {"errors", cell.scores.failures}};
      return;
    }
    const fs::path dir = root / ("seed-" + std::to_string(seed)) / ("week-" + std::to_string(week));
    try {
      cell = run_cell(config, data[si], seed, week, dir, log);
    } catch (const std::exception& e) {
      cell.scores = WeekScores{};
      cell.scores.week = week;
      cell.scores.failures["week"] = e.what();
      cell.info = {{"week", week}, {"errors", cell.scores.failures}};
      log("seed " + std::to_string(seed) + " week " + std::to_string(week) + " failed: " + e.what());
    }
  });

  ExperimentResult result;
  nlohmann::json runs = nlohmann::json::array();
  for (std::size_t si = 0; si < n_seeds; ++si) {
    SeedResult sr;
    sr.seed = config.seeds[si];
    nlohmann::json weeks = nlohmann::json::array();
    for (std::size_t wi = 0; wi < n_weeks; ++wi) {
      sr.scores.push_back(cells[si * n_weeks + wi].scores);
      weeks.push_back(cells[si * n_weeks + wi].info);
    }
    sr.report = weekly_evaluation(sr.scores, config.thetas);
    const fs::path dir = root / ("seed-" + std::to_string(sr.seed));
    fs::create_directories(dir);
    write_file((dir / "report.csv").string(), report_to_csv(sr.report));
    nlohmann::json rj = report_to_json(sr.report, config.arr_first_week, config.arr_last_week);
    rj["seed"] = sr.seed;
    write_file((dir / "report.json").string(), rj.dump(2) + "\n");

    nlohmann::json run = {{"seed", sr.seed},
                          {"source_seed", mix_seed(sr.seed, 1)},
                          {"target_seed", mix_seed(sr.seed, 2)},
                          {"weeks", weeks}};
    if (!data[si].error.empty()) run["error"] = data[si].error;
    if (data[si].error.empty()) {
      run["source_students"] = data[si].source.students.size();
      run["target_students"] = data[si].target.students.size();
      run["source_ordinal_map_hash"] = hex64(fnv1a64(data[si].source_map.to_json().dump()));
    }
    runs.push_back(std::move(run));
    result.runs.push_back(std::move(sr));
  }

  nlohmann::json files = nlohmann::json::object();
  std::vector<fs::path> paths;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (entry.is_regular_file() && entry.path().filename() != "manifest.json") {
      paths.push_back(entry.path());
    }
  }
  std::sort(paths.begin(), paths.end());
  for (const auto& p : paths) files[fs::relative(p, root).generic_string()] = file_hash(p.string());

  result.manifest = {{"manifest_version", kManifestVersion},
                     {"format_versions",
                      {{"checkpoint", kCheckpointVersion},
                       {"ordinal_map", kOrdinalLayoutVersion},
                       {"report", kReportVersion}}},
                     {"config", experiment_config_to_json(config)},
                     {"config_hash", config_hash(config)},
                     {"seeds", config.seeds},
                     {"kernels", std::string(kernels::active().name)},
                     {"runs", runs},
                     {"files", files}};
  write_file((root / "manifest.json").string(), result.manifest.dump(2) + "\n");
  return result;
}

}  // namespace gritnet
