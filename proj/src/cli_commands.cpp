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

#include "gritnet/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "gritnet/adapt.hpp"
#include "gritnet/baseline.hpp"
#include "gritnet/common.hpp"
#include "gritnet/encoding.hpp"
#include "gritnet/error.hpp"
#include "gritnet/eval.hpp"
#include "gritnet/experiment.hpp"
#include "gritnet/model.hpp"

namespace fs = std::filesystem;

namespace gritnet {
namespace {

nlohmann::json read_json(const std::string& path) {
  try {
    return nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path + ": " + e.what());
  }
}

ExperimentConfig load_config(const std::string& path) {
  if (path.empty()) return default_experiment_config();
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return experiment_config_from_json(j, fs::path(path).parent_path().string());
}

EncodedArchive read_archive(const std::string& path) {
  nlohmann::json j = read_json(path);
  try {
    return archive_from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path + ": " + e.what());
  }
}

/// A map file or an encoded archive (whose map is used).
OrdinalMap read_map(const std::string& path) {
  nlohmann::json j = read_json(path);
  try {
    if (j.is_object() && j.contains("format")) return archive_from_json(j).map;
    return OrdinalMap::from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path + ": " + e.what());
  }
}

std::vector<double> read_numbers(const std::string& path) {
  std::istringstream in(read_file(path));
  std::vector<double> values;
  std::string line;
  for (std::size_t n = 1; std::getline(in, line); ++n) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      std::size_t used = 0;
      values.push_back(std::stod(line, &used));
      if (line.find_first_not_of(" \t\r", used) != std::string::npos) throw std::invalid_argument("");
    } catch (const std::exception&) {
      throw DataError(path + ": line " + std::to_string(n) + ": not a number");
    }
  }
  return values;
}

void ensure_parent(const std::string& path) {
  fs::path parent = fs::path(path).parent_path();
  if (!parent.empty()) fs::create_directories(parent);
}

struct TrainFlags {
  std::optional<std::size_t> embed_dim, hidden_dim, batch_size, max_len, folds;
  std::optional<int> epochs, patience;
  std::optional<double> lr;

  void add(CLI::App* app) {
    app->add_option("--embed-dim", embed_dim, "Embedding size E");
    app->add_option("--hidden-dim", hidden_dim, "LSTM size per direction H");
    app->add_option("--batch-size", batch_size);
    app->add_option("--epochs", epochs);
    app->add_option("--patience", patience, "Early-stopping patience (0 disables)");
    app->add_option("--learning-rate", lr);
    app->add_option("--max-sequence-length", max_len, "Keep only the most recent events");
    app->add_option("--folds", folds, "Stratified folds; fold 0 validates");
  }
  void apply(ExperimentConfig& c) const {
    if (embed_dim) c.layers.embed_dim = *embed_dim;
    if (hidden_dim) c.layers.hidden_dim = *hidden_dim;
    if (batch_size) c.train.batch_size = *batch_size;
    if (epochs) c.train.epochs = *epochs;
    if (patience) c.train.patience = *patience;
    if (lr) c.train.optimizer.lr = *lr;
    if (max_len) c.train.max_sequence_length = *max_len;
    if (folds) c.folds = *folds;
  }
};

int cmd_synth_gen(const std::string& config_path, std::uint64_t seed, const std::string& out,
                  const std::string& which, std::ostream& os) {
  ExperimentConfig c = load_config(config_path);
  fs::create_directories(out);
  auto emit = [&](const Dataset& d, const std::string& stem) {
    std::ofstream ev(fs::path(out) / (stem + ".jsonl"));
    write_event_log(ev, d);
    if (!ev) throw DataError("cannot write " + stem + ".jsonl");
    write_file((fs::path(out) / (stem + ".schema.json")).string(),
               schema_to_json(d.schema).dump(2) + "\n");
    std::size_t grads = 0, events = 0;
    for (const auto& s : d.students) {
      grads += s.graduated;
      events += s.events.size();
    }
    double n = std::max<std::size_t>(d.students.size(), 1);
    os << stem << ": " << d.students.size() << " students, graduation rate "
       << format_double(std::round(1000.0 * grads / n) / 10.0) << "%, mean length "
       << format_double(std::round(10.0 * events / n) / 10.0) << "\n";
  };
  if (which == "source" || which == "both") {
    if (!c.source.synthetic()) throw ConfigError("source is not synthetic");
    emit(load_source(c.source, seed), "source");
  }
  if (which == "target" || which == "both") {
    if (!c.target.synthetic()) throw ConfigError("target is not synthetic");
    emit(load_target(c.target, c.source, seed), "target");
  }
  return 0;
}

int cmd_encode(const std::string& events, const std::string& schema, const std::string& align_to,
               int week, int d_cap, const std::string& out, const std::string& map_out,
               std::ostream& os) {
  Dataset d = load_dataset_files(events, schema);
  OrdinalMap map = align_to.empty() ? build_ordinal_map(d.schema, d_cap)
                                    : build_aligned_map(d.schema, read_map(align_to));
  if (week > 0) d = truncate_to_week(d, week);
  EncodedArchive archive{map, week, encode_dataset(d, map)};
  ensure_parent(out);
  write_file(out, archive_to_json(archive).dump() + "\n");
  if (!map_out.empty()) {
    ensure_parent(map_out);
    write_file(map_out, map.to_json().dump(2) + "\n");
  }
  os << "encoded " << archive.sequences.size() << " students, L=" << map.num_actions()
     << ", |O|=" << map.vocab_size() << "\n";
  return 0;
}

int cmd_train(const ExperimentConfig& c, const std::string& data, std::uint64_t seed,
              const std::string& out, bool progress, std::ostream& os, std::ostream& es) {
  EncodedArchive a = read_archive(data);
  TrainConfig tc = c.train;
  if (progress) tc.progress = &es;
  SourceTraining st = train_source_model(a.sequences, a.map, c.layers, tc, c.folds, seed);
  ensure_parent(out);
  save_model(st.model, out);
  os << "trained " << st.history.epochs_completed() << " epochs, best epoch "
     << st.history.best_epoch + 1 << ", t_max " << st.model.t_max << " -> " << out << "\n";
  return 0;
}

int cmd_train_vanilla(const ExperimentConfig& c, const std::string& events,
                      const std::string& schema, int week, const std::string& out,
                      std::ostream& os) {
  Dataset d = load_dataset_files(events, schema);
  if (week > 0) d = truncate_to_week(d, week);
  std::vector<bool> y;
  for (const auto& r : d.students) y.push_back(r.graduated);
  LogRegModel m = train_logreg(featurize(d), y, c.logreg);
  ensure_parent(out);
  write_file(out, logreg_to_json(m).dump(2) + "\n");
  os << "vanilla baseline -> " << out << "\n";
  return 0;
}

int cmd_adapt(const ExperimentConfig& c, const std::string& model_path, const std::string& data,
              double theta, bool oracle, std::uint64_t seed, const std::string& out,
              const std::string& report, std::ostream& os) {
  GritNetModel source = load_model(model_path);
  EncodedArchive a = read_archive(data);
  AdaptConfig ac = make_adapt_config(c.train, c.adapt_epochs, c.pseudo_label_mode, seed);
  nlohmann::json rep;
  GritNetModel adapted;
  if (oracle) {
    std::vector<bool> labels;
    for (const auto& s : a.sequences) labels.push_back(s.label);
    OracleResult r = oracle_adapt(source, a.sequences, labels, ac);
    rep = {{"setup", "oracle"}, {"epoch_loss", r.history.train_loss}};
    adapted = std::move(r.model);
  } else {
    AdaptResult r = domain_adapt(source, a.sequences, theta, ac);
    rep = {{"setup", "adapted"},
           {"theta", theta},
           {"positive_rate", r.pseudo.positive_rate()},
           {"examples", r.pseudo.sequences.size()},
           {"epoch_loss", r.history.train_loss}};
    adapted = std::move(r.model);
  }
  ensure_parent(out);
  save_model(adapted, out);
  rep["checkpoint"] = out;
  if (report.empty()) {
    os << rep.dump(2) << "\n";
  } else {
    ensure_parent(report);
    write_file(report, rep.dump(2) + "\n");
  }
  return 0;
}

void write_eval(const std::string& out, const std::vector<std::string>& ids,
                const std::vector<double>& scores, const std::vector<bool>& labels,
                std::ostream& os) {
  if (scores.size() != labels.size()) {
    throw ArgumentError("score/label length mismatch: " + std::to_string(scores.size()) + " vs " +
                        std::to_string(labels.size()));
  }
  std::optional<double> value;
  std::string note;
  try {
    value = auc(scores, labels);
  } catch (const UndefinedMetricError& e) {
    note = e.what();
  }
  if (!out.empty()) {
    fs::create_directories(out);
    std::ostringstream csv;
    csv << "student_id,label,score\n";
    for (std::size_t i = 0; i < scores.size(); ++i) {
      csv << (i < ids.size() ? ids[i] : std::to_string(i)) << ',' << (labels[i] ? 1 : 0) << ','
          << format_double(scores[i]) << '\n';
    }
    write_file((fs::path(out) / "scores.csv").string(), csv.str());
    nlohmann::json m = {{"n", scores.size()}};
    m["auc"] = value ? nlohmann::json(*value) : nlohmann::json(nullptr);
    if (!note.empty()) m["note"] = note;
    write_file((fs::path(out) / "metrics.json").string(), m.dump(2) + "\n");
    if (value) {
      write_file((fs::path(out) / "roc.csv").string(), roc_to_csv(roc_curve(scores, labels)));
    }
  }
  if (value) {
    os << "auc " << format_double(*value) << "\n";
  } else {
    os << "auc undefined: " << note << "\n";
  }
}

int cmd_evaluate(const std::string& model_path, const std::string& data,
                 const std::string& vanilla, const std::string& events,
                 const std::string& schema, int week, const std::string& scores_path,
                 const std::string& labels_path, const std::string& out, std::ostream& os) {
  if (!scores_path.empty() || !labels_path.empty()) {
    if (scores_path.empty() || labels_path.empty()) {
      throw ArgumentError("--scores and --labels go together");
    }
    std::vector<double> s = read_numbers(scores_path);
    std::vector<bool> y;
    for (double v : read_numbers(labels_path)) {
      if (v != 0.0 && v != 1.0) throw DataError(labels_path + ": labels must be 0 or 1");
      y.push_back(v == 1.0);
    }
    write_eval(out, {}, s, y, os);
    return 0;
  }
  if (!vanilla.empty()) {
    if (events.empty() || schema.empty()) throw ArgumentError("--vanilla needs --events and --schema");
    LogRegModel m = logreg_from_json(read_json(vanilla));
    Dataset d = load_dataset_files(events, schema);
    if (week > 0) d = truncate_to_week(d, week);
    std::vector<std::string> ids;
    std::vector<bool> y;
    for (const auto& r : d.students) {
      ids.push_back(r.student_id);
      y.push_back(r.graduated);
    }
    write_eval(out, ids, predict_logreg(m, featurize(d)), y, os);
    return 0;
  }
  if (model_path.empty() || data.empty()) {
    throw ArgumentError("evaluate needs --model and --data, --vanilla, or --scores and --labels");
  }
  GritNetModel m = load_model(model_path);
  EncodedArchive a = read_archive(data);
  std::vector<std::string> ids;
  std::vector<bool> y;
  for (const auto& s : a.sequences) {
    ids.push_back(s.student_id);
    y.push_back(s.label);
  }
  write_eval(out, ids, predict(m, a.sequences), y, os);
  return 0;
}

int cmd_run(ExperimentConfig c, const std::vector<std::uint64_t>& seeds,
            const std::vector<int>& weeks, const std::vector<double>& thetas,
            const std::string& out, unsigned jobs, bool quiet, std::ostream& os, std::ostream& es) {
  if (!seeds.empty()) c.seeds = seeds;
  if (!weeks.empty()) c.weeks = weeks;
  if (!thetas.empty()) c.thetas = thetas;
  c.validate();
  ExperimentResult r = run_experiment(c, out, jobs, quiet ? nullptr : &es);
  for (const auto& run : r.runs) {
    os << "seed " << run.seed << "\n" << report_to_csv(run.report);
  }
  os << "outputs in " << out << "\n";
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& os, std::ostream& es) {
  CLI::App app{"GritNet student graduation prediction with unsupervised course transfer"};
  app.require_subcommand(1);

  std::string config_path, out;
  std::uint64_t seed = 1;

  auto* synth = app.add_subcommand("synth-gen", "Generate synthetic source/target event logs");
  std::string which = "both";
  synth->add_option("--config", config_path, "Experiment config JSON (default benchmark if omitted)");
  synth->add_option("--seed", seed, "Experiment seed");
  synth->add_option("--out", out, "Output directory")->required();
  synth->add_option("--which", which, "source, target or both")
      ->check(CLI::IsMember({"source", "target", "both"}));

  auto* encode = app.add_subcommand("encode", "Truncate to a week and ordinal-encode an event log");
  std::string events, schema, align_to, map_out;
  int week = 0, d_cap = kDefaultDeltaCap;
  encode->add_option("--events", events, "Event log (JSONL)")->required();
  encode->add_option("--schema", schema, "Course schema JSON")->required();
  encode->add_option("--align-to", align_to, "Source map or archive to align the ids to");
  encode->add_option("--week", week, "Keep the first N weeks (0 keeps everything)");
  encode->add_option("--delta-cap", d_cap, "Largest day-gap bucket");
  encode->add_option("--out", out, "Archive path")->required();
  encode->add_option("--map-out", map_out, "Also write the ordinal map here");

  auto* trainc = app.add_subcommand("train", "Train GritNet (or the vanilla baseline) on a source course");
  std::string data;
  bool vanilla_flag = false, progress = false;
  TrainFlags tflags;
  trainc->add_option("--config", config_path, "Experiment config JSON for defaults");
  trainc->add_option("--data", data, "Encoded source archive");
  trainc->add_option("--seed", seed);
  trainc->add_option("--out", out, "Checkpoint path (vanilla: JSON path)")->required();
  trainc->add_flag("--vanilla", vanilla_flag, "Train the logistic-regression baseline instead");
  trainc->add_option("--events", events, "Event log for --vanilla");
  trainc->add_option("--schema", schema, "Schema for --vanilla");
  trainc->add_option("--week", week, "Week truncation for --vanilla");
  trainc->add_flag("--progress", progress, "Per-epoch JSON lines on stderr");
  tflags.add(trainc);

  auto* adaptc = app.add_subcommand("adapt", "Fine-tune the fc layer on pseudo-labeled target data");
  std::string model_path, report_path, mode;
  double theta = 0.2;
  bool oracle = false;
  std::optional<int> adapt_epochs;
  adaptc->add_option("--config", config_path);
  adaptc->add_option("--model", model_path, "Source checkpoint")->required();
  adaptc->add_option("--data", data, "Encoded target archive")->required();
  adaptc->add_option("--theta", theta, "Pseudo-label threshold");
  adaptc->add_flag("--oracle", oracle, "Use the true target labels");
  adaptc->add_option("--seed", seed);
  adaptc->add_option("--epochs", adapt_epochs);
  adaptc->add_option("--mode", mode)->check(CLI::IsMember({"binarize", "confidence_filter"}));
  adaptc->add_option("--out", out, "Adapted checkpoint path")->required();
  adaptc->add_option("--report", report_path, "Adaptation report JSON (stdout if omitted)");

  auto* evalc = app.add_subcommand("evaluate", "Score a target course and report AUC");
  std::string vanilla_path, scores_path, labels_path;
  evalc->add_option("--model", model_path, "GritNet checkpoint");
  evalc->add_option("--data", data, "Encoded target archive");
  evalc->add_option("--vanilla", vanilla_path, "Baseline JSON (with --events/--schema)");
  evalc->add_option("--events", events);
  evalc->add_option("--schema", schema);
  evalc->add_option("--week", week);
  evalc->add_option("--scores", scores_path, "One score per line");
  evalc->add_option("--labels", labels_path, "One 0/1 label per line");
  evalc->add_option("--out", out, "Output directory");

  auto* runc = app.add_subcommand("run", "Run the week-by-week four-setup experiment");
  std::vector<std::uint64_t> seeds;
  std::vector<int> weeks;
  std::vector<double> thetas;
  unsigned jobs = 1;
  bool quiet = false;
  runc->add_option("--config", config_path, "Experiment config JSON");
  runc->add_option("--seed", seeds, "Seeds (comma separated)")->delimiter(',');
  runc->add_option("--weeks", weeks, "Weeks (comma separated)")->delimiter(',');
  runc->add_option("--theta", thetas, "Thresholds (comma separated)")->delimiter(',');
  runc->add_option("--jobs", jobs, "Worker threads");
  runc->add_option("--out", out, "Output directory")->required();
  runc->add_flag("--quiet", quiet);
  tflags.add(runc);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, os, es);
    return code == 0 ? 0 : 2;
  }

  try {
    if (synth->parsed()) return cmd_synth_gen(config_path, seed, out, which, os);
    if (encode->parsed()) {
      return cmd_encode(events, schema, align_to, week, d_cap, out, map_out, os);
    }
    ExperimentConfig c = load_config(config_path);
    tflags.apply(c);
    if (adapt_epochs) c.adapt_epochs = *adapt_epochs;
    if (mode == "confidence_filter") c.pseudo_label_mode = PseudoLabelMode::kConfidenceFilter;
    if (mode == "binarize") c.pseudo_label_mode = PseudoLabelMode::kBinarize;
    if (trainc->parsed()) {
      if (vanilla_flag) {
        if (events.empty() || schema.empty()) throw ArgumentError("--vanilla needs --events and --schema");
        return cmd_train_vanilla(c, events, schema, week, out, os);
      }
      if (data.empty()) throw ArgumentError("train needs --data");
      return cmd_train(c, data, seed, out, progress, os, es);
    }
    if (adaptc->parsed()) {
      return cmd_adapt(c, model_path, data, theta, oracle, seed, out, report_path, os);
    }
    if (evalc->parsed()) {
      return cmd_evaluate(model_path, data, vanilla_path, events, schema, week, scores_path,
                          labels_path, out, os);
    }
    if (runc->parsed()) return cmd_run(c, seeds, weeks, thetas, out, jobs, quiet, os, es);
  } catch (const Error& e) {
    es << "error: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const fs::filesystem_error& e) {
    es << "error: " << e.what() << "\n";
    return exit_code(ErrorKind::kData);
  } catch (const std::exception& e) {
    es << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace gritnet
