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

#include "gritnet/adapt.hpp"

#include <algorithm>
#include <cmath>

#include "gritnet/error.hpp"
#include "gritnet/eval.hpp"

namespace gritnet {
namespace {

void check_theta(double theta) {
  if (!(theta > 0.0 && theta < 1.0)) {
    throw ArgumentError("theta must lie in (0, 1), got " + format_double(theta));
  }
}

void prepare_fine_tune(GritNetModel& model) {
  model.params.freeze_all_except("fc");
  model.params.reset_optimizer_state();
}

void check_features(const PooledFeatures* features, std::size_t n) {
  if (features && features->size() != n) {
    throw ArgumentError("target features cover " + std::to_string(features->size()) +
                        " sequences, expected " + std::to_string(n));
  }
}

}  // namespace

std::size_t PseudoLabeledSet::positives() const noexcept {
  return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), true));
}

double PseudoLabeledSet::positive_rate() const noexcept {
  return labels.empty() ? 0.0 : static_cast<double>(positives()) / static_cast<double>(labels.size());
}

PseudoLabeledSet assign_pseudo_labels(const GritNetModel& source,
                                      std::span<const EncodedSequence> target, double theta,
                                      PseudoLabelMode mode) {
  return assign_pseudo_labels(predict(source, target), target, theta, mode);
}

PseudoLabeledSet assign_pseudo_labels(std::span<const double> probs,
                                      std::span<const EncodedSequence> target, double theta,
                                      PseudoLabelMode mode) {
  check_theta(theta);
  if (probs.size() != target.size()) {
    throw ArgumentError("assign_pseudo_labels: " + std::to_string(probs.size()) +
                        " probabilities for " + std::to_string(target.size()) + " sequences");
  }
  PseudoLabeledSet out;
  out.theta = theta;
  for (std::size_t n = 0; n < target.size(); ++n) {
    const double p = probs[n];
    bool label;
    if (mode == PseudoLabelMode::kBinarize) {
      label = p >= theta;
    } else {
      if (std::max(p, 1.0 - p) < 1.0 - theta) continue;
      label = p >= 0.5;
    }
    EncodedSequence s = target[n];
    s.label = label;
    out.sequences.push_back(std::move(s));
    out.labels.push_back(label);
    out.probabilities.push_back(p);
    out.target_index.push_back(n);
  }
  return out;
}

AdaptResult domain_adapt(const GritNetModel& source, std::span<const EncodedSequence> target,
                         double theta, const AdaptConfig& config,
                         const PooledFeatures* target_features) {
  check_features(target_features, target.size());
  AdaptResult result;
  result.pseudo = target_features
                      ? assign_pseudo_labels(predict_from_features(source, *target_features),
                                             target, theta, config.mode)
                      : assign_pseudo_labels(source, target, theta, config.mode);
  const std::size_t pos = result.pseudo.positives();
  if (pos == 0 || pos == result.pseudo.labels.size()) {
    throw DataError("pseudo-labels at theta=" + format_double(theta) + " are all " +
                    (pos == 0 ? "negative" : "positive") + " (" +
                    std::to_string(result.pseudo.labels.size()) +
                    " examples); try a different theta");
  }
  result.model = source;
  prepare_fine_tune(result.model);
  if (target_features) {
    // Keep only the rows the pseudo-labelling kept (all of them when
    // binarizing).
    PooledFeatures kept;
    kept.reserve(result.pseudo.target_index.size());
    for (std::size_t n : result.pseudo.target_index) kept.push_back((*target_features)[n]);
    result.history = train_fc(result.model, kept, result.pseudo.labels, config.train);
  } else {
    result.history = train(result.model, result.pseudo.sequences, config.train);
  }
  return result;
}

std::vector<AdaptResult> domain_adapt_sweep(const GritNetModel& source,
                                            std::span<const EncodedSequence> target,
                                            const std::vector<double>& thetas,
                                            const AdaptConfig& config) {
  std::vector<AdaptResult> out;
  out.reserve(thetas.size());
  for (double theta : thetas) out.push_back(domain_adapt(source, target, theta, config));
  return out;
}

OracleResult oracle_adapt(const GritNetModel& source, std::span<const EncodedSequence> target,
                          const std::vector<bool>& true_labels, const AdaptConfig& config,
                          const PooledFeatures* target_features) {
  if (true_labels.size() != target.size()) {
    throw ArgumentError("oracle_adapt: " + std::to_string(true_labels.size()) + " labels for " +
                        std::to_string(target.size()) + " sequences");
  }
  check_features(target_features, target.size());
  OracleResult result;
  result.model = source;
  prepare_fine_tune(result.model);
  if (target_features) {
    result.history = train_fc(result.model, *target_features, true_labels, config.train);
    return result;
  }
  std::vector<EncodedSequence> data(target.begin(), target.end());
  for (std::size_t n = 0; n < data.size(); ++n) data[n].label = true_labels[n];
  result.history = train(result.model, data, config.train);
  return result;
}

}  // namespace gritnet
