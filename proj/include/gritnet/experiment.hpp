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

#pragma once

// Week-by-week comparison of the four setups (vanilla baseline, GritNet
// baseline, pseudo-label adaptation per theta, oracle) on a source/target
// course pair.
//
// Output layout under the output directory:
//   manifest.json
//   seed-<s>/report.csv, report.json
//   seed-<s>/week-<w>/scores.csv, roc-<setup>.csv, source.grit,
//                     adapted-<theta>.grit, oracle.grit, vanilla.json

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "gritnet/adapt.hpp"
#include "gritnet/baseline.hpp"
#include "gritnet/encoding.hpp"
#include "gritnet/eval.hpp"
#include "gritnet/events.hpp"
#include "gritnet/synth.hpp"
#include "gritnet/train.hpp"
#include "json.hpp"

namespace gritnet {

inline constexpr int kManifestVersion = 1;
inline constexpr int kReportVersion = 1;

/// A course read from files or generated from a profile. For the target, a
/// shift relative to the source profile is also accepted.
struct CourseSource {
  std::optional<CourseProfile> profile;
  std::optional<ShiftSpec> shift;
  std::string events_path;
  std::string schema_path;

  bool synthetic() const noexcept { return profile.has_value() || shift.has_value(); }
};

struct ExperimentConfig {
  CourseSource source;
  CourseSource target;
  std::vector<int> weeks = {1, 2, 3, 4, 5, 6, 7, 8};
  std::vector<double> thetas = {0.1, 0.2, 0.3, 0.4};
  std::vector<std::uint64_t> seeds = {1};
  LayerConfig layers;
  TrainConfig train;
  int adapt_epochs = 30;
  PseudoLabelMode pseudo_label_mode = PseudoLabelMode::kBinarize;
  LogRegConfig logreg;
  /// Source students are split into this many stratified folds; fold 0 is
  /// the validation set for early stopping.
  std::size_t folds = 5;
  int arr_first_week = 2;
  int arr_last_week = 4;
  bool write_checkpoints = true;

  /// Throws ConfigError.
  void validate() const;
};

/// The default synthetic benchmark: an ND-A v1 sized source (1,400
/// students) and an ND-C sized target (1,100 students) with faster pacing
/// and a higher graduation rate, at E=64, H=32.
ExperimentConfig default_experiment_config();

/// Fields missing from `j` keep the values of default_experiment_config().
/// Relative paths are resolved against `base_dir`.
ExperimentConfig experiment_config_from_json(const nlohmann::json& j,
                                             const std::string& base_dir = ".");
nlohmann::json experiment_config_to_json(const ExperimentConfig& config);
/// FNV-1a of the canonical config JSON, hex encoded.
std::string config_hash(const ExperimentConfig& config);

// Stage functions shared by run_experiment and the standalone subcommands,
// so that both produce identical artifacts from the same seeds.

/// Generates (seed sub-stream 1) or loads the source course.
Dataset load_source(const CourseSource& source, std::uint64_t seed);
/// Generates (seed sub-stream 2) or loads the target course.
Dataset load_target(const CourseSource& target, const CourseSource& source, std::uint64_t seed);
Dataset load_dataset_files(const std::string& events_path, const std::string& schema_path);

struct SourceTraining {
  GritNetModel model;
  TrainHistory history;
  std::vector<std::size_t> validation_index;
};

/// Stratified split (fold 0 held out), model init and training; all seeds
/// are derived from `seed`.
SourceTraining train_source_model(const std::vector<EncodedSequence>& sequences,
                                  const OrdinalMap& map, const LayerConfig& layers,
                                  TrainConfig config, std::size_t folds, std::uint64_t seed);

AdaptConfig make_adapt_config(const TrainConfig& train, int epochs, PseudoLabelMode mode,
                              std::uint64_t seed);

/// Per-stage seeds of one (seed, week) cell.
struct StageSeeds {
  std::uint64_t data = 0;
  std::uint64_t train = 0;
  std::uint64_t adapt = 0;
};
StageSeeds stage_seeds(std::uint64_t seed, int week);

std::string theta_label(double theta);

struct SeedResult {
  std::uint64_t seed = 0;
  std::vector<WeekScores> scores;
  WeeklyReport report;
};

struct ExperimentResult {
  std::vector<SeedResult> runs;
  nlohmann::json manifest;
};

/// Runs every (seed, week) cell on up to `jobs` threads. Stage failures are
/// recorded (report cells left empty, message in the manifest) and the
/// remaining cells continue. Outputs do not depend on `jobs`.
ExperimentResult run_experiment(const ExperimentConfig& config, const std::string& out_dir,
                                unsigned jobs = 1, std::ostream* log = nullptr);

}  // namespace gritnet
