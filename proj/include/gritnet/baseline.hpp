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

// Comparison arm: logistic regression over category-level event counts.
// The features do not depend on item identities, so a model fitted on one
// course applies to another unchanged.

#include <array>
#include <span>
#include <string>
#include <vector>

#include "gritnet/events.hpp"
#include "json.hpp"

namespace gritnet {

inline constexpr std::size_t kNumFeatures = 7;
inline constexpr std::array<const char*, kNumFeatures> kFeatureNames = {
    "content_views", "quiz_correct", "quiz_incorrect", "project_passed",
    "project_failed", "active_days", "sequence_length"};

using FeatureVector = std::array<double, kNumFeatures>;

/// Raw (unstandardized) counts; active days are distinct UTC calendar days.
FeatureVector featurize(const StudentRecord& record);
std::vector<FeatureVector> featurize(const Dataset& dataset);

struct LogRegConfig {
  double l2 = 1e-2;
  double learning_rate = 0.5;
  int iterations = 500;
};

struct LogRegModel {
  std::vector<double> weights;  // per standardized feature
  double bias = 0.0;
  std::vector<double> means;
  std::vector<double> stds;
  std::vector<std::string> feature_names;
};

/// Standardization statistics come from `features` only. Throws DataError
/// if the labels hold a single class.
LogRegModel train_logreg(const std::vector<FeatureVector>& features,
                         const std::vector<bool>& labels, const LogRegConfig& config = {});
std::vector<double> predict_logreg(const LogRegModel& model,
                                   const std::vector<FeatureVector>& features);

/// Standardizes with the model's stored statistics.
std::vector<double> standardize(const LogRegModel& model, const FeatureVector& raw);

/// Mean BCE + l2/2 |w|^2 on standardized rows; fills the gradient
/// (weights then bias) when non-null.
double logreg_objective(std::span<const double> weights, double bias,
                        const std::vector<std::vector<double>>& x, const std::vector<bool>& y,
                        double l2, std::vector<double>* grad);

nlohmann::json logreg_to_json(const LogRegModel& model);
LogRegModel logreg_from_json(const nlohmann::json& j);

}  // namespace gritnet
