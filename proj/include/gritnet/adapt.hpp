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

// Unsupervised transfer of a trained model to a new course:
//   1-2. train on the labeled source course (gritnet::train)
//   3.   score the unlabeled target course with the source model
//   4.   pseudo-label: y = 1[p >= theta]
//   5.   use (target, pseudo-labels) as the new training set
//   6.   freeze every parameter group except the final fc layer
//   7.   continue training
// The oracle variant skips 3-4 and uses the true target labels.

#include <span>
#include <vector>

#include "gritnet/model.hpp"
#include "gritnet/train.hpp"

namespace gritnet {

enum class PseudoLabelMode {
  /// Every example gets the hard label 1[p >= theta].
  kBinarize,
  /// Only examples with max(p, 1-p) >= 1 - theta are kept, labelled
  /// 1[p >= 0.5]. Comparison variant, off by default.
  kConfidenceFilter,
};

struct PseudoLabeledSet {
  std::vector<EncodedSequence> sequences;  // labels overwritten with pseudo-labels
  std::vector<bool> labels;
  std::vector<double> probabilities;       // source-model scores used for labelling
  std::vector<std::size_t> target_index;   // position of each kept example in the target
  double theta = 0.5;
  std::size_t positives() const noexcept;
  double positive_rate() const noexcept;
};

PseudoLabeledSet assign_pseudo_labels(const GritNetModel& source,
                                      std::span<const EncodedSequence> target, double theta,
                                      PseudoLabelMode mode = PseudoLabelMode::kBinarize);
/// Same, from source-model probabilities already computed for `target`.
PseudoLabeledSet assign_pseudo_labels(std::span<const double> probabilities,
                                      std::span<const EncodedSequence> target, double theta,
                                      PseudoLabelMode mode = PseudoLabelMode::kBinarize);

struct AdaptConfig {
  TrainConfig train;
  PseudoLabelMode mode = PseudoLabelMode::kBinarize;
  AdaptConfig() { train.epochs = 5; }
};

struct AdaptResult {
  GritNetModel model;
  PseudoLabeledSet pseudo;
  TrainHistory history;
};

/// Fine-tunes a copy of `source` on pseudo-labeled target data with only
/// the fc group trainable and fresh optimizer state. Throws DataError
/// (suggesting another theta) when every pseudo-label is the same.
///
/// `target_features`, if given, must be pooled_features(source, target);
/// the result is identical but the target is not re-encoded per call.
AdaptResult domain_adapt(const GritNetModel& source, std::span<const EncodedSequence> target,
                         double theta, const AdaptConfig& config,
                         const PooledFeatures* target_features = nullptr);

std::vector<AdaptResult> domain_adapt_sweep(const GritNetModel& source,
                                            std::span<const EncodedSequence> target,
                                            const std::vector<double>& thetas,
                                            const AdaptConfig& config);

struct OracleResult {
  GritNetModel model;
  TrainHistory history;
};

/// Same fine-tuning on the true target labels.
OracleResult oracle_adapt(const GritNetModel& source, std::span<const EncodedSequence> target,
                          const std::vector<bool>& true_labels, const AdaptConfig& config,
                          const PooledFeatures* target_features = nullptr);

}  // namespace gritnet
