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
#include <span>
#include <string>
#include <vector>

#include "gritnet/encoding.hpp"
#include "gritnet/layers.hpp"
#include "gritnet/params.hpp"

namespace gritnet {

/// Event embedding -> bidirectional LSTM -> max pooling over time ->
/// fully-connected -> sigmoid.
///
/// Parameter groups: "embedding" (|O| x E), "lstm_fwd" and "lstm_bwd"
/// (wx 4H x E, wh 4H x H, b 4H), "fc" (w 1 x 2H, b 1).
struct GritNetModel {
  LayerConfig layers;
  OrdinalMap map;
  /// Length every input is pre-padded to; 0 until the first training run.
  std::size_t t_max = 0;
  ParamStore params;

  std::size_t num_actions() const noexcept { return map.num_actions(); }
  LstmWeights lstm_weights(bool backward_direction) const;
};

inline constexpr const char* kParamGroups[] = {"embedding", "lstm_fwd", "lstm_bwd", "fc"};

/// Uniform(-r, r) init with r = 1/sqrt(fan_in) per matrix, zero biases except
/// the forget gate (1.0). `layers.vocab_size` is derived from the map.
GritNetModel build_model(LayerConfig layers, const OrdinalMap& map, std::uint64_t seed);

/// wx applied to every embedding row, per direction (|O| x 4H each). The
/// LSTM input term of an event is then proj[action] + proj[L + delta].
/// Stale once the embedding or either wx changes.
struct InputProjection {
  std::vector<double> fwd;
  std::vector<double> bwd;
};
InputProjection project_inputs(const GritNetModel& model);

/// Gradients w.r.t. the projected rows, summed over a batch and folded into
/// the embedding and wx gradients by flush_input_gradients.
struct InputGradients {
  std::vector<double> fwd;  // |O| x 4H
  std::vector<double> bwd;
  std::vector<unsigned char> touched;
};
void flush_input_gradients(const GritNetModel& model, InputGradients& input, Gradients& grads);

/// Intermediate values of one forward pass, reused across sequences.
struct SequenceWorkspace {
  std::vector<EncodedEvent> row;
  std::vector<bool> zero_input;
  std::vector<double> x_fwd;  // T x 4H input terms
  std::vector<double> x_bwd;
  BiLstmTrace trace;
  std::vector<double> hidden;  // T x 2H
  std::vector<double> pooled;  // 2H
  std::vector<std::size_t> argmax;
  double logit = 0.0;
  double prob = 0.0;
  // backward scratch
  std::vector<double> d_hidden;
  std::vector<double> dx;  // T x 4H
};

/// Validates indices against the model vocabulary, keeps the most recent
/// t_max events and pre-pads. Throws ArgumentError on incompatible input.
std::vector<EncodedEvent> prepare_row(const GritNetModel& model,
                                      std::span<const EncodedEvent> events);

/// Forward pass over an already prepared row.
void forward_row(const GritNetModel& model, const InputProjection& proj,
                 std::span<const EncodedEvent> row, SequenceWorkspace& ws);

/// Accumulates d(loss)/d(params) given d(loss)/d(logit), for unfrozen
/// parameters only. Stops descending once no lower layer is trainable.
/// Embedding and wx gradients collect in `input` until flushed.
void backward_row(const GritNetModel& model, SequenceWorkspace& ws, double d_logit,
                  Gradients& grads, InputGradients& input);

/// fc gradient for one example; shared by the full and the cached path.
void fc_backward(std::span<const double> pooled, double d_logit, Gradients& grads);

/// Mean BCE over the sequences and its gradient (averaged over the batch).
double loss_and_gradients(const GritNetModel& model,
                          std::span<const std::vector<EncodedEvent>> rows,
                          const std::vector<bool>& labels, Gradients& grads);

/// Graduation probability per sequence, in input order.
std::vector<double> predict(const GritNetModel& model, std::span<const EncodedSequence> sequences);

/// Max-pooled BLSTM output (2H) of one sequence.
std::vector<double> pooled_features(const GritNetModel& model, const EncodedSequence& sequence);

/// One pooled vector per sequence. Models that differ only in the fc group
/// share these.
using PooledFeatures = std::vector<std::vector<double>>;
PooledFeatures pooled_features(const GritNetModel& model,
                               std::span<const EncodedSequence> sequences);
/// fc + sigmoid over precomputed features; equals predict() on the
/// sequences the features came from.
std::vector<double> predict_from_features(const GritNetModel& model,
                                          const PooledFeatures& features);

nlohmann::json model_config_json(const GritNetModel& model);
void save_model(const GritNetModel& model, const std::string& path);
/// Throws DataError if the file is not a complete GritNet checkpoint.
GritNetModel load_model(const std::string& path);
std::string model_hash(const GritNetModel& model);

}  // namespace gritnet
