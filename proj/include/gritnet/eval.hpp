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

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

namespace gritnet {

/// Rank-based (Mann-Whitney) area under the ROC curve, in percent. Tied
/// scores across classes count one half. Throws UndefinedMetricError unless
/// both classes are present.
double auc(std::span<const double> scores, const std::vector<bool>& labels);

struct RocPoint {
  double threshold;
  double fpr;
  double tpr;
};

/// Empirical ROC curve: one point per distinct score, thresholds descending,
/// starting at (0, 0) with threshold +inf and ending at (1, 1).
std::vector<RocPoint> roc_curve(std::span<const double> scores, const std::vector<bool>& labels);
/// Trapezoidal area under a ROC curve, in percent.
double trapezoid_auc(const std::vector<RocPoint>& curve);

/// Smallest |oracle - baseline| (in AUC percentage points) for which the
/// recovery rate is reported.
inline constexpr double kArrGuard = 0.1;

/// (unsup - baseline) / (oracle - baseline), or nullopt when the
/// denominator is below kArrGuard.
std::optional<double> arr(double unsup_auc, double baseline_auc, double oracle_auc);

/// k disjoint folds covering every index, each class dealt round-robin
/// after a seeded shuffle. Throws ArgumentError if k < 2 or a class has
/// fewer than k members.
std::vector<std::vector<std::size_t>> stratified_kfold(const std::vector<bool>& labels,
                                                       std::size_t k, std::uint64_t seed);

/// A metric value or the reason it is missing.
struct MetricCell {
  std::optional<double> value;
  std::string note;
};

/// Target-course scores of every setup for one week. Missing optionals mean
/// the setup failed upstream; `failures` carries the reason.
struct WeekScores {
  int week = 0;
  std::vector<bool> labels;
  std::optional<std::vector<double>> vanilla;
  std::optional<std::vector<double>> gritnet;
  std::optional<std::vector<double>> oracle;
  std::map<double, std::vector<double>> adapted;  // by theta
  std::map<std::string, std::string> failures;    // setup -> message
};

struct WeekRow {
  int week = 0;
  MetricCell vanilla;
  MetricCell gritnet;
  MetricCell oracle;
  std::map<double, MetricCell> adapted;
  std::map<double, MetricCell> arr;
};

struct WeeklyReport {
  std::vector<double> thetas;
  std::vector<WeekRow> rows;
};

WeekRow evaluate_week(const WeekScores& scores, const std::vector<double>& thetas);
WeeklyReport weekly_evaluation(const std::vector<WeekScores>& weeks,
                               const std::vector<double>& thetas);

/// Mean of the defined weekly ARR values per theta over weeks in
/// [first_week, last_week]; nullopt where no week is defined.
std::map<double, std::optional<double>> mean_arr(const WeeklyReport& report, int first_week,
                                                 int last_week);

/// Columns: week,setup,theta,auc,arr. Undefined cells are empty.
std::string report_to_csv(const WeeklyReport& report);
nlohmann::json report_to_json(const WeeklyReport& report, int arr_first_week, int arr_last_week);
/// Columns: threshold,fpr,tpr.
std::string roc_to_csv(const std::vector<RocPoint>& curve);

/// Shortest decimal text that round-trips the double.
std::string format_double(double v);

}  // namespace gritnet
