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
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "gritnet/model.hpp"
#include "gritnet/params.hpp"

namespace gritnet {

struct TrainConfig {
  std::size_t batch_size = 16;
  int epochs = 20;
  /// Epochs without validation-loss improvement before stopping; 0 disables.
  int patience = 5;
  std::uint64_t seed = 0;
  RmsPropConfig optimizer;
  /// Upper bound on the padded length; 0 means the longest training sequence.
  std::size_t max_sequence_length = 0;
  /// JSON-lines progress sink (one object per epoch), optional.
  std::ostream* progress = nullptr;

  void validate() const;
};

struct TrainHistory {
  std::vector<double> train_loss;
  std::vector<double> val_loss;
  std::vector<std::optional<double>> val_auc;
  /// Epoch (0-based) whose parameters were kept.
  int best_epoch = -1;
  bool early_stopped = false;
  std::size_t epochs_completed() const noexcept { return train_loss.size(); }
};

/// Mini-batch RMSProp on mean BCE. Frozen parameters are left untouched.
/// Each epoch visits the data in a seeded shuffled order. With a validation
/// set the parameters with the lowest validation loss are kept, otherwise
/// the final ones. Sets model.t_max on the first call (longest training
/// sequence, capped by max_sequence_length).
///
/// Throws ArgumentError for bad configs, DataError if the labels hold a
/// single class and NumericError on a non-finite loss.
TrainHistory train(GritNetModel& model, std::span<const EncodedSequence> train_set,
                   const TrainConfig& config,
                   std::span<const EncodedSequence> validation = {});

/// fc-only training on pooled features precomputed with the model's frozen
/// extractor (see pooled_features); same result as train() on the
/// sequences themselves. No validation set.
TrainHistory train_fc(GritNetModel& model, const PooledFeatures& features,
                      const std::vector<bool>& labels, const TrainConfig& config);

}  // namespace gritnet
