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

#include "gritnet/train.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "gritnet/common.hpp"
#include "gritnet/error.hpp"
#include "gritnet/eval.hpp"
#include "json.hpp"

namespace gritnet {
namespace {

bool only_fc_trainable(const ParamStore& params) {
  for (const auto& [name, p] : params.all()) {
    if (!p.frozen && group_of(name) != "fc") return false;
  }
  return true;
}

// Either prepared rows, or (frozen extractor) pooled features; labels always.
struct Examples {
  std::vector<std::vector<EncodedEvent>> rows;
  const PooledFeatures* pooled = nullptr;
  std::vector<bool> labels;
  std::size_t size() const noexcept { return labels.size(); }
};

double logit_from_pooled(const GritNetModel& model, const std::vector<double>& pooled) {
  return fc_logit(pooled, model.params.value("fc.w").span(), model.params.value("fc.b").data[0]);
}

std::vector<double> eval_probs(const GritNetModel& model, const Examples& data) {
  std::vector<double> p(data.size());
  SequenceWorkspace ws;
  InputProjection proj;
  if (!data.pooled) proj = project_inputs(model);
  for (std::size_t n = 0; n < data.size(); ++n) {
    if (data.pooled) {
      p[n] = sigmoid(logit_from_pooled(model, (*data.pooled)[n]));
    } else {
      forward_row(model, proj, data.rows[n], ws);
      p[n] = ws.prob;
    }
  }
  return p;
}

void require_both_classes(const std::vector<bool>& labels) {
  const auto positives = std::count(labels.begin(), labels.end(), true);
  if (positives == 0 || positives == static_cast<std::ptrdiff_t>(labels.size())) {
    throw DataError("training set needs both classes (" + std::to_string(positives) + " of " +
                    std::to_string(labels.size()) + " positive)");
  }
}

TrainHistory fit(GritNetModel& model, const Examples& data, const Examples& val,
                 const TrainConfig& config) {
  TrainHistory history;
  double best_val = INFINITY;
  ParamStore best_params;
  int since_best = 0;
  SequenceWorkspace ws;
  InputGradients input;
  InputProjection proj;
  const std::size_t n = data.size();
  const bool any_trainable = !model.params.trainable_names().empty();

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    Rng rng(mix_seed(config.seed, static_cast<std::uint64_t>(epoch)));
    rng.shuffle(order);

    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < n; start += config.batch_size) {
      const std::size_t end = std::min(n, start + config.batch_size);
      const double scale = 1.0 / static_cast<double>(end - start);
      Gradients grads = make_gradients(model.params);
      if (!data.pooled) proj = project_inputs(model);
      double batch_loss = 0.0;
      for (std::size_t k = start; k < end; ++k) {
        const std::size_t i = order[k];
        const bool label = data.labels[i];
        const double y = label ? 1.0 : 0.0;
        double p;
        if (data.pooled) {
          const auto& pooled = (*data.pooled)[i];
          p = sigmoid(logit_from_pooled(model, pooled));
          if (any_trainable) fc_backward(pooled, (p - y) * scale, grads);
        } else {
          forward_row(model, proj, data.rows[i], ws);
          p = ws.prob;
          if (any_trainable) backward_row(model, ws, (p - y) * scale, grads, input);
        }
        batch_loss += bce_single(p, label);
      }
      if (!std::isfinite(batch_loss)) {
        throw NumericError("non-finite training loss at epoch " + std::to_string(epoch) +
                           ", batch starting at " + std::to_string(start));
      }
      epoch_loss += batch_loss;
      if (!data.pooled) flush_input_gradients(model, input, grads);
      if (any_trainable) rmsprop_step(model.params, grads, config.optimizer);
    }
    epoch_loss /= static_cast<double>(n);
    history.train_loss.push_back(epoch_loss);

    nlohmann::json line{{"epoch", epoch}, {"train_loss", epoch_loss}};
    if (val.size() > 0) {
      const auto probs = eval_probs(model, val);
      const double vloss = bce_loss(probs, val.labels);
      if (!std::isfinite(vloss)) {
        throw NumericError("non-finite validation loss at epoch " + std::to_string(epoch));
      }
      std::optional<double> vauc;
      try {
        vauc = auc(probs, val.labels);
      } catch (const UndefinedMetricError&) {
      }
      history.val_loss.push_back(vloss);
      history.val_auc.push_back(vauc);
      line["val_loss"] = vloss;
      line["val_auc"] = vauc ? nlohmann::json(*vauc) : nlohmann::json(nullptr);
      if (vloss < best_val) {
        best_val = vloss;
        best_params = model.params;
        history.best_epoch = epoch;
        since_best = 0;
      } else {
        ++since_best;
      }
    } else {
      history.best_epoch = epoch;
    }
    if (config.progress) *config.progress << line.dump() << '\n';
    if (val.size() > 0 && config.patience > 0 && since_best >= config.patience) {
      history.early_stopped = true;
      break;
    }
  }
  if (val.size() > 0 && history.best_epoch >= 0) model.params = std::move(best_params);
  return history;
}

}  // namespace

void TrainConfig::validate() const {
  if (batch_size < 1) throw ArgumentError("batch_size must be >= 1");
  if (epochs < 1) throw ArgumentError("epochs must be >= 1");
  if (patience < 0) throw ArgumentError("patience must be >= 0");
}

TrainHistory train(GritNetModel& model, std::span<const EncodedSequence> train_set,
                   const TrainConfig& config, std::span<const EncodedSequence> validation) {
  config.validate();
  Examples data, val;
  for (const auto& s : train_set) data.labels.push_back(s.label);
  for (const auto& s : validation) val.labels.push_back(s.label);
  require_both_classes(data.labels);
  if (model.t_max == 0) {
    std::size_t longest = 1;
    for (const auto& s : train_set) longest = std::max(longest, s.events.size());
    if (config.max_sequence_length > 0) longest = std::min(longest, config.max_sequence_length);
    model.t_max = longest;
  }

  if (only_fc_trainable(model.params)) {
    const PooledFeatures train_pooled = pooled_features(model, train_set);
    const PooledFeatures val_pooled = pooled_features(model, validation);
    data.pooled = &train_pooled;
    val.pooled = &val_pooled;
    return fit(model, data, val, config);
  }
  for (const auto& s : train_set) data.rows.push_back(prepare_row(model, s.events));
  for (const auto& s : validation) val.rows.push_back(prepare_row(model, s.events));
  return fit(model, data, val, config);
}

TrainHistory train_fc(GritNetModel& model, const PooledFeatures& features,
                      const std::vector<bool>& labels, const TrainConfig& config) {
  config.validate();
  if (features.size() != labels.size()) {
    throw ArgumentError("train_fc: " + std::to_string(labels.size()) + " labels for " +
                        std::to_string(features.size()) + " feature rows");
  }
  if (!only_fc_trainable(model.params)) {
    throw ArgumentError("train_fc: parameter groups other than fc are trainable");
  }
  const std::size_t width = 2 * model.layers.hidden_dim;
  for (const auto& f : features) {
    if (f.size() != width) throw ArgumentError("train_fc: feature width does not match the model");
  }
  require_both_classes(labels);
  Examples data;
  data.pooled = &features;
  data.labels = labels;
  return fit(model, data, Examples{}, config);
}

}  // namespace gritnet
