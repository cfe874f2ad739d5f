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

#include "gritnet/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <numeric>

#include "gritnet/common.hpp"
#include "gritnet/error.hpp"

namespace gritnet {
namespace {

using nlohmann::json;

void check_inputs(std::span<const double> scores, const std::vector<bool>& labels,
                  std::size_t& pos, std::size_t& neg) {
  if (scores.size() != labels.size()) {
    throw ArgumentError("scores (" + std::to_string(scores.size()) + ") and labels (" +
                        std::to_string(labels.size()) + ") differ in length");
  }
  pos = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), true));
  neg = labels.size() - pos;
  if (pos == 0 || neg == 0) throw UndefinedMetricError("AUC undefined: only one class present");
  for (double s : scores) {
    if (std::isnan(s)) throw ArgumentError("NaN score");
  }
}

std::vector<std::size_t> order_by_score(std::span<const double> scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  return order;
}

MetricCell auc_cell(const std::optional<std::vector<double>>& scores,
                    const std::vector<bool>& labels, const std::string& failure) {
  MetricCell cell;
  if (!scores) {
    cell.note = failure.empty() ? "missing" : failure;
    return cell;
  }
  try {
    cell.value = auc(*scores, labels);
  } catch (const Error& e) {
    cell.note = e.what();
  }
  return cell;
}

std::string failure_of(const WeekScores& s, const std::string& key) {
  auto it = s.failures.find(key);
  return it == s.failures.end() ? std::string() : it->second;
}

json cell_json(const MetricCell& c) {
  if (c.value) return json(*c.value);
  return json{{"undefined", c.note}};
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

double auc(std::span<const double> scores, const std::vector<bool>& labels) {
  std::size_t P = 0, N = 0;
  check_inputs(scores, labels, P, N);
  const auto order = order_by_score(scores);
  // Sum of (1-based, tie-averaged) ranks of the positives, kept in half units
  // so it stays exact.
  double pos_rank_sum = 0.0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    std::size_t pos_in_group = 0;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      pos_in_group += labels[order[j]] ? 1 : 0;
      ++j;
    }
    pos_rank_sum += static_cast<double>(pos_in_group) * static_cast<double>(i + 1 + j) * 0.5;
    i = j;
  }
  const double u = pos_rank_sum - static_cast<double>(P) * static_cast<double>(P + 1) * 0.5;
  return 100.0 * u / (static_cast<double>(P) * static_cast<double>(N));
}

std::vector<RocPoint> roc_curve(std::span<const double> scores, const std::vector<bool>& labels) {
  std::size_t P = 0, N = 0;
  check_inputs(scores, labels, P, N);
  auto order = order_by_score(scores);
  std::reverse(order.begin(), order.end());
  std::vector<RocPoint> curve{{std::numeric_limits<double>::infinity(), 0.0, 0.0}};
  std::size_t tp = 0, fp = 0;
  for (std::size_t i = 0; i < order.size();) {
    const double thr = scores[order[i]];
    while (i < order.size() && scores[order[i]] == thr) {
      (labels[order[i]] ? tp : fp) += 1;
      ++i;
    }
    curve.push_back({thr, static_cast<double>(fp) / static_cast<double>(N),
                     static_cast<double>(tp) / static_cast<double>(P)});
  }
  return curve;
}

double trapezoid_auc(const std::vector<RocPoint>& curve) {
  double area = 0.0;
  for (std::size_t i = 1; i < curve.size(); ++i) {
    area += (curve[i].fpr - curve[i - 1].fpr) * (curve[i].tpr + curve[i - 1].tpr) * 0.5;
  }
  return 100.0 * area;
}

std::optional<double> arr(double unsup_auc, double baseline_auc, double oracle_auc) {
  const double denom = oracle_auc - baseline_auc;
  if (!(std::abs(denom) >= kArrGuard)) return std::nullopt;
  return (unsup_auc - baseline_auc) / denom;
}

std::vector<std::vector<std::size_t>> stratified_kfold(const std::vector<bool>& labels,
                                                       std::size_t k, std::uint64_t seed) {
  if (k < 2) throw ArgumentError("stratified_kfold needs k >= 2");
  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < labels.size(); ++i) (labels[i] ? pos : neg).push_back(i);
  if (pos.size() < k || neg.size() < k) {
    throw ArgumentError("stratified_kfold: each class needs at least k=" + std::to_string(k) +
                        " members (have " + std::to_string(pos.size()) + " positive, " +
                        std::to_string(neg.size()) + " negative)");
  }
  Rng rng(seed);
  rng.shuffle(pos);
  rng.shuffle(neg);
  std::vector<std::vector<std::size_t>> folds(k);
  for (std::size_t n = 0; n < pos.size(); ++n) folds[n % k].push_back(pos[n]);
  // Negatives continue the deal so fold sizes stay within one of each other.
  for (std::size_t n = 0; n < neg.size(); ++n) folds[(pos.size() + n) % k].push_back(neg[n]);
  for (auto& f : folds) std::sort(f.begin(), f.end());
  return folds;
}

WeekRow evaluate_week(const WeekScores& s, const std::vector<double>& thetas) {
  WeekRow row;
  row.week = s.week;
  row.vanilla = auc_cell(s.vanilla, s.labels, failure_of(s, "vanilla"));
  row.gritnet = auc_cell(s.gritnet, s.labels, failure_of(s, "gritnet"));
  row.oracle = auc_cell(s.oracle, s.labels, failure_of(s, "oracle"));
  for (double theta : thetas) {
    auto it = s.adapted.find(theta);
    std::optional<std::vector<double>> scores;
    if (it != s.adapted.end()) scores = it->second;
    MetricCell adapted = auc_cell(scores, s.labels, failure_of(s, "adapted@" + format_double(theta)));
    MetricCell recovery;
    if (adapted.value && row.gritnet.value && row.oracle.value) {
      recovery.value = arr(*adapted.value, *row.gritnet.value, *row.oracle.value);
      if (!recovery.value) recovery.note = "oracle and baseline AUC within guard";
    } else {
      recovery.note = "input AUC undefined";
    }
    row.adapted.emplace(theta, std::move(adapted));
    row.arr.emplace(theta, std::move(recovery));
  }
  return row;
}

WeeklyReport weekly_evaluation(const std::vector<WeekScores>& weeks,
                               const std::vector<double>& thetas) {
  WeeklyReport report;
  report.thetas = thetas;
  for (const auto& w : weeks) report.rows.push_back(evaluate_week(w, thetas));
  std::sort(report.rows.begin(), report.rows.end(),
            [](const WeekRow& a, const WeekRow& b) { return a.week < b.week; });
  return report;
}

std::map<double, std::optional<double>> mean_arr(const WeeklyReport& report, int first_week,
                                                 int last_week) {
  std::map<double, std::optional<double>> out;
  for (double theta : report.thetas) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& row : report.rows) {
      if (row.week < first_week || row.week > last_week) continue;
      auto it = row.arr.find(theta);
      if (it != row.arr.end() && it->second.value) {
        sum += *it->second.value;
        ++n;
      }
    }
    out[theta] = n ? std::optional<double>(sum / static_cast<double>(n)) : std::nullopt;
  }
  return out;
}

std::string report_to_csv(const WeeklyReport& report) {
  std::string out = "week,setup,theta,auc,arr\n";
  const auto v = [](const MetricCell& c) { return c.value ? format_double(*c.value) : std::string(); };
  for (const auto& row : report.rows) {
    const std::string w = std::to_string(row.week);
    out += w + ",vanilla,," + v(row.vanilla) + ",\n";
    out += w + ",gritnet,," + v(row.gritnet) + ",\n";
    for (double theta : report.thetas) {
      out += w + ",adapted," + format_double(theta) + "," + v(row.adapted.at(theta)) + "," +
             v(row.arr.at(theta)) + "\n";
    }
    out += w + ",oracle,," + v(row.oracle) + ",\n";
  }
  return out;
}

json report_to_json(const WeeklyReport& report, int arr_first_week, int arr_last_week) {
  json rows = json::array();
  for (const auto& row : report.rows) {
    json adapted = json::object(), recov = json::object();
    for (double theta : report.thetas) {
      adapted[format_double(theta)] = cell_json(row.adapted.at(theta));
      recov[format_double(theta)] = cell_json(row.arr.at(theta));
    }
    rows.push_back(json{{"week", row.week},
                        {"vanilla_auc", cell_json(row.vanilla)},
                        {"gritnet_baseline_auc", cell_json(row.gritnet)},
                        {"adapted_auc", adapted},
                        {"oracle_auc", cell_json(row.oracle)},
                        {"arr", recov}});
  }
  json means = json::object();
  for (const auto& [theta, m] : mean_arr(report, arr_first_week, arr_last_week)) {
    means[format_double(theta)] = m ? json(*m) : json(nullptr);
  }
  return json{{"thetas", report.thetas},
              {"weeks", rows},
              {"mean_arr", {{"first_week", arr_first_week}, {"last_week", arr_last_week}, {"by_theta", means}}}};
}

std::string roc_to_csv(const std::vector<RocPoint>& curve) {
  std::string out = "threshold,fpr,tpr\n";
  for (const auto& p : curve) {
    out += (std::isinf(p.threshold) ? std::string("inf") : format_double(p.threshold)) + "," +
           format_double(p.fpr) + "," + format_double(p.tpr) + "\n";
  }
  return out;
}

}  // namespace gritnet
