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

#include "gritnet/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "gritnet/error.hpp"
#include "gritnet/layers.hpp"

namespace gritnet {

FeatureVector featurize(const StudentRecord& record) {
  FeatureVector f{};
  std::set<std::int64_t> days;
  for (const auto& ev : record.events) {
    switch (ev.kind) {
      case EventKind::kContent: f[0] += 1; break;
      case EventKind::kQuizCorrect: f[1] += 1; break;
      case EventKind::kQuizIncorrect: f[2] += 1; break;
      case EventKind::kProjectPassed: f[3] += 1; break;
      case EventKind::kProjectFailed: f[4] += 1; break;
    }
    days.insert(ev.ts.seconds / kSecondsPerDay);
  }
  f[5] = static_cast<double>(days.size());
  f[6] = static_cast<double>(record.events.size());
  return f;
}

std::vector<FeatureVector> featurize(const Dataset& dataset) {
  std::vector<FeatureVector> out;
  out.reserve(dataset.students.size());
  for (const auto& r : dataset.students) out.push_back(featurize(r));
  return out;
}

std::vector<double> standardize(const LogRegModel& model, const FeatureVector& raw) {
  std::vector<double> x(kNumFeatures);
  for (std::size_t f = 0; f < kNumFeatures; ++f) x[f] = (raw[f] - model.means[f]) / model.stds[f];
  return x;
}

double logreg_objective(std::span<const double> weights, double bias,
                        const std::vector<std::vector<double>>& x, const std::vector<bool>& y,
                        double l2, std::vector<double>* grad) {
  const std::size_t d = weights.size();
  const double n = static_cast<double>(x.size());
  if (grad) grad->assign(d + 1, 0.0);
  double loss = 0.0;
  for (std::size_t r = 0; r < x.size(); ++r) {
    double z = bias;
    for (std::size_t f = 0; f < d; ++f) z += weights[f] * x[r][f];
    const double p = sigmoid(z);
    loss += bce_single(p, y[r]);
    if (grad) {
      const double dz = (p - (y[r] ? 1.0 : 0.0)) / n;
      for (std::size_t f = 0; f < d; ++f) (*grad)[f] += dz * x[r][f];
      (*grad)[d] += dz;
    }
  }
  double reg = 0.0;
  for (std::size_t f = 0; f < d; ++f) {
    reg += weights[f] * weights[f];
    if (grad) (*grad)[f] += l2 * weights[f];
  }
  return loss / n + 0.5 * l2 * reg;
}

LogRegModel train_logreg(const std::vector<FeatureVector>& features, const std::vector<bool>& labels,
                         const LogRegConfig& config) {
  if (features.size() != labels.size()) throw ArgumentError("features/labels size mismatch");
  const auto pos = std::count(labels.begin(), labels.end(), true);
  if (pos == 0 || pos == static_cast<std::ptrdiff_t>(labels.size())) {
    throw DataError("logistic regression needs both classes in the training labels");
  }
  LogRegModel m;
  m.feature_names.assign(kFeatureNames.begin(), kFeatureNames.end());
  m.means.assign(kNumFeatures, 0.0);
  m.stds.assign(kNumFeatures, 0.0);
  const double n = static_cast<double>(features.size());
  for (const auto& row : features) {
    for (std::size_t f = 0; f < kNumFeatures; ++f) m.means[f] += row[f] / n;
  }
  for (const auto& row : features) {
    for (std::size_t f = 0; f < kNumFeatures; ++f) {
      m.stds[f] += (row[f] - m.means[f]) * (row[f] - m.means[f]) / n;
    }
  }
  for (double& s : m.stds) s = s > 1e-24 ? std::sqrt(s) : 1.0;

  std::vector<std::vector<double>> x;
  x.reserve(features.size());
  for (const auto& row : features) x.push_back(standardize(m, row));
  m.weights.assign(kNumFeatures, 0.0);
  std::vector<double> grad;
  for (int it = 0; it < config.iterations; ++it) {
    logreg_objective(m.weights, m.bias, x, labels, config.l2, &grad);
    for (std::size_t f = 0; f < kNumFeatures; ++f) m.weights[f] -= config.learning_rate * grad[f];
    m.bias -= config.learning_rate * grad[kNumFeatures];
  }
  return m;
}

std::vector<double> predict_logreg(const LogRegModel& model, const std::vector<FeatureVector>& features) {
  std::vector<double> p;
  p.reserve(features.size());
  for (const auto& row : features) {
    const auto x = standardize(model, row);
    double z = model.bias;
    for (std::size_t f = 0; f < kNumFeatures; ++f) z += model.weights[f] * x[f];
    p.push_back(sigmoid(z));
  }
  return p;
}

nlohmann::json logreg_to_json(const LogRegModel& model) {
  return nlohmann::json{{"model", "logreg"},
                        {"weights", model.weights},
                        {"bias", model.bias},
                        {"means", model.means},
                        {"stds", model.stds},
                        {"feature_names", model.feature_names}};
}

LogRegModel logreg_from_json(const nlohmann::json& j) {
  LogRegModel m;
  try {
    if (j.at("model").get<std::string>() != "logreg") throw DataError("not a logistic-regression model");
    m.weights = j.at("weights").get<std::vector<double>>();
    m.bias = j.at("bias").get<double>();
    m.means = j.at("means").get<std::vector<double>>();
    m.stds = j.at("stds").get<std::vector<double>>();
    m.feature_names = j.at("feature_names").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed logistic-regression model: ") + e.what());
  }
  if (m.weights.size() != kNumFeatures || m.means.size() != kNumFeatures ||
      m.stds.size() != kNumFeatures) {
    throw DataError("logistic-regression model has the wrong number of features");
  }
  return m;
}

}  // namespace gritnet
