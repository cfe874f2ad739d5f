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

#include "gritnet/model.hpp"

#include <algorithm>
#include <cmath>

#include "gritnet/checkpoint.hpp"
#include "gritnet/common.hpp"
#include "gritnet/error.hpp"
#include "gritnet/kernels.hpp"

namespace gritnet {
namespace {

using nlohmann::json;

Tensor uniform_tensor(std::vector<std::size_t> shape, double r, Rng& rng) {
  Tensor t(std::move(shape));
  for (double& v : t.data) v = rng.uniform(-r, r);
  return t;
}

void add_lstm(ParamStore& store, const std::string& group, std::size_t E, std::size_t H,
              Rng& rng) {
  store.add(group + ".wx", uniform_tensor({4 * H, E}, 1.0 / std::sqrt(double(E)), rng));
  store.add(group + ".wh", uniform_tensor({4 * H, H}, 1.0 / std::sqrt(double(H)), rng));
  Tensor b({4 * H});
  std::fill(b.data.begin() + H, b.data.begin() + 2 * H, 1.0);
  store.add(group + ".b", std::move(b));
}

LstmGrads lstm_grads(Gradients& grads, const std::string& group) {
  LstmGrads g;
  if (auto it = grads.find(group + ".wx"); it != grads.end()) g.wx = it->second.ptr();
  if (auto it = grads.find(group + ".wh"); it != grads.end()) g.wh = it->second.ptr();
  if (auto it = grads.find(group + ".b"); it != grads.end()) g.b = it->second.ptr();
  return g;
}

void check_shapes(const GritNetModel& m) {
  const std::size_t E = m.layers.embed_dim, H = m.layers.hidden_dim;
  const auto expect = [&](const std::string& name, std::vector<std::size_t> shape) {
    if (!m.params.contains(name)) throw DataError("corrupt checkpoint: missing parameter '" + name + "'");
    if (m.params.value(name).shape != shape) {
      throw DataError("corrupt checkpoint: '" + name + "' has shape " +
                      shape_string(m.params.value(name).shape) + ", expected " + shape_string(shape));
    }
  };
  for (const char* group : kParamGroups) {
    const auto groups = m.params.groups();
    if (std::find(groups.begin(), groups.end(), group) == groups.end()) {
      throw DataError(std::string("corrupt checkpoint: missing parameter group '") + group + "'");
    }
  }
  if (m.params.groups().size() != std::size(kParamGroups)) {
    throw DataError("corrupt checkpoint: unexpected parameter groups");
  }
  expect("embedding", {m.layers.vocab_size, E});
  for (const char* g : {"lstm_fwd", "lstm_bwd"}) {
    expect(std::string(g) + ".wx", {4 * H, E});
    expect(std::string(g) + ".wh", {4 * H, H});
    expect(std::string(g) + ".b", {4 * H});
  }
  expect("fc.w", {1, 2 * H});
  expect("fc.b", {1});
}

}  // namespace

LstmWeights GritNetModel::lstm_weights(bool backward_direction) const {
  const std::string g = backward_direction ? "lstm_bwd" : "lstm_fwd";
  return LstmWeights{params.value(g + ".wx").ptr(), params.value(g + ".wh").ptr(),
                     params.value(g + ".b").ptr(), layers.embed_dim, layers.hidden_dim};
}

GritNetModel build_model(LayerConfig layers, const OrdinalMap& map, std::uint64_t seed) {
  if (map.num_actions() == 0) throw ArgumentError("ordinal map has an empty action vocabulary");
  layers.vocab_size = map.vocab_size();
  layers.validate();
  GritNetModel m;
  m.layers = layers;
  m.map = map;
  Rng rng(seed);
  const std::size_t E = layers.embed_dim, H = layers.hidden_dim;
  m.params.add("embedding",
               uniform_tensor({layers.vocab_size, E}, 1.0 / std::sqrt(double(layers.vocab_size)), rng));
  add_lstm(m.params, "lstm_fwd", E, H, rng);
  add_lstm(m.params, "lstm_bwd", E, H, rng);
  m.params.add("fc.w", uniform_tensor({1, 2 * H}, 1.0 / std::sqrt(double(2 * H)), rng));
  m.params.add("fc.b", Tensor({1}));
  return m;
}

std::vector<EncodedEvent> prepare_row(const GritNetModel& model,
                                      std::span<const EncodedEvent> events) {
  const auto L = static_cast<std::int32_t>(model.num_actions());
  const std::int32_t d_cap = model.map.delta_cap();
  for (const auto& ev : events) {
    if (ev.action < 0 || ev.action >= L || ev.delta < 0 || ev.delta > d_cap) {
      throw ArgumentError("incompatible vocabulary: event (" + std::to_string(ev.action) + ", " +
                          std::to_string(ev.delta) + ") outside model range (L=" +
                          std::to_string(L) + ", d_cap=" + std::to_string(d_cap) + ")");
    }
  }
  if (model.t_max == 0) return pre_pad(events, std::max<std::size_t>(events.size(), 1));
  const auto recent = take_recent(events, model.t_max);
  return pre_pad(recent, model.t_max);
}

InputProjection project_inputs(const GritNetModel& model) {
  const std::size_t V = model.layers.vocab_size;
  const std::size_t E = model.layers.embed_dim, H = model.layers.hidden_dim;
  const double* emb = model.params.value("embedding").ptr();
  InputProjection proj;
  for (bool backward : {false, true}) {
    auto& out = backward ? proj.bwd : proj.fwd;
    out.assign(V * 4 * H, 0.0);
    const double* wx = model.params.value(backward ? "lstm_bwd.wx" : "lstm_fwd.wx").ptr();
    for (std::size_t v = 0; v < V; ++v) kernels::gemv_acc(wx, 4 * H, E, emb + v * E, &out[v * 4 * H]);
  }
  return proj;
}

void forward_row(const GritNetModel& model, const InputProjection& proj,
                 std::span<const EncodedEvent> row, SequenceWorkspace& ws) {
  const std::size_t T = row.size();
  const std::size_t H = model.layers.hidden_dim;
  const std::size_t G = 4 * H;
  const auto L = static_cast<std::size_t>(model.num_actions());
  if (T == 0) throw ArgumentError("forward_row needs T >= 1");
  if (proj.fwd.size() != model.layers.vocab_size * G || proj.bwd.size() != proj.fwd.size()) {
    throw ArgumentError("input projection does not match the model");
  }
  ws.row.assign(row.begin(), row.end());
  ws.zero_input.resize(T);
  ws.x_fwd.resize(T * G);
  ws.x_bwd.resize(T * G);
  for (std::size_t t = 0; t < T; ++t) {
    const EncodedEvent ev = row[t];
    ws.zero_input[t] = ev.is_padding();
    if (ev.is_padding()) continue;
    const std::size_t a = static_cast<std::size_t>(ev.action) * G;
    const std::size_t d = (L + static_cast<std::size_t>(ev.delta)) * G;
    for (std::size_t r = 0; r < G; ++r) {
      ws.x_fwd[t * G + r] = proj.fwd[a + r] + proj.fwd[d + r];
      ws.x_bwd[t * G + r] = proj.bwd[a + r] + proj.bwd[d + r];
    }
  }
  lstm_sequence_forward_projected(ws.x_fwd, ws.zero_input, model.lstm_weights(false), false,
                                  ws.trace.fwd);
  lstm_sequence_forward_projected(ws.x_bwd, ws.zero_input, model.lstm_weights(true), true,
                                  ws.trace.bwd);
  ws.hidden.resize(T * 2 * H);
  for (std::size_t t = 0; t < T; ++t) {
    std::copy_n(ws.trace.fwd.h.data() + t * H, H, ws.hidden.data() + t * 2 * H);
    std::copy_n(ws.trace.bwd.h.data() + t * H, H, ws.hidden.data() + t * 2 * H + H);
  }
  ws.pooled.resize(2 * H);
  global_max_pool(ws.hidden, T, 2 * H, ws.pooled, ws.argmax);
  ws.logit = fc_logit(ws.pooled, model.params.value("fc.w").span(), model.params.value("fc.b").data[0]);
  ws.prob = sigmoid(ws.logit);
}

void fc_backward(std::span<const double> pooled, double d_logit, Gradients& grads) {
  auto w = grads.find("fc.w");
  if (w != grads.end()) {
    kernels::active().axpy(d_logit, pooled.data(), w->second.ptr(), pooled.size());
  }
  auto b = grads.find("fc.b");
  if (b != grads.end()) b->second.data[0] += d_logit;
}

void backward_row(const GritNetModel& model, SequenceWorkspace& ws, double d_logit,
                  Gradients& grads, InputGradients& input) {
  fc_backward(ws.pooled, d_logit, grads);
  const bool emb = grads.count("embedding") != 0;
  const bool fwd_wx = grads.count("lstm_fwd.wx") != 0, bwd_wx = grads.count("lstm_bwd.wx") != 0;
  const bool fwd = fwd_wx || grads.count("lstm_fwd.wh") || grads.count("lstm_fwd.b");
  const bool bwd = bwd_wx || grads.count("lstm_bwd.wh") || grads.count("lstm_bwd.b");
  if (!emb && !fwd && !bwd) return;

  const std::size_t T = ws.row.size();
  const std::size_t H = model.layers.hidden_dim;
  const std::size_t G = 4 * H;
  const std::size_t V = model.layers.vocab_size;
  const auto L = static_cast<std::size_t>(model.num_actions());
  const Tensor& fc_w = model.params.value("fc.w");
  std::vector<double> d_pooled(2 * H);
  for (std::size_t f = 0; f < 2 * H; ++f) d_pooled[f] = d_logit * fc_w.data[f];
  ws.d_hidden.assign(T * 2 * H, 0.0);
  global_max_pool_backward(ws.argmax, d_pooled, 2 * H, ws.d_hidden);

  if (input.fwd.size() != V * G) {
    input.fwd.assign(V * G, 0.0);
    input.bwd.assign(V * G, 0.0);
    input.touched.assign(V, 0);
  }
  std::vector<double> dh(T * H);
  for (bool backward : {false, true}) {
    const bool needed = backward ? (bwd || emb) : (fwd || emb);
    if (!needed) continue;
    const bool want_input = emb || (backward ? bwd_wx : fwd_wx);
    const std::size_t offset = backward ? H : 0;
    for (std::size_t t = 0; t < T; ++t) {
      std::copy_n(ws.d_hidden.data() + t * 2 * H + offset, H, dh.data() + t * H);
    }
    const char* g = backward ? "lstm_bwd" : "lstm_fwd";
    std::span<double> dx;
    if (want_input) {
      ws.dx.assign(T * G, 0.0);
      dx = ws.dx;
    }
    lstm_sequence_backward_projected(ws.zero_input, backward ? ws.trace.bwd : ws.trace.fwd, dh,
                                     model.lstm_weights(backward), lstm_grads(grads, g), dx);
    if (!want_input) continue;
    auto& acc = backward ? input.bwd : input.fwd;
    for (std::size_t t = 0; t < T; ++t) {
      const EncodedEvent ev = ws.row[t];
      if (ev.is_padding()) continue;
      const std::size_t a = static_cast<std::size_t>(ev.action);
      const std::size_t d = L + static_cast<std::size_t>(ev.delta);
      const double* src = ws.dx.data() + t * G;
      for (std::size_t r = 0; r < G; ++r) {
        acc[a * G + r] += src[r];
        acc[d * G + r] += src[r];
      }
      input.touched[a] = 1;
      input.touched[d] = 1;
    }
  }
}

void flush_input_gradients(const GritNetModel& model, InputGradients& input, Gradients& grads) {
  if (input.touched.empty()) return;
  const std::size_t E = model.layers.embed_dim, H = model.layers.hidden_dim;
  const std::size_t G = 4 * H;
  const double* emb = model.params.value("embedding").ptr();
  auto d_emb = grads.find("embedding");
  std::vector<std::size_t> rows;
  for (std::size_t v = 0; v < input.touched.size(); ++v) {
    if (input.touched[v]) rows.push_back(v);
  }
  // Gather touched rows so the wx gradient is one reduction over them.
  std::vector<double> emb_rows(rows.size() * E), d_rows(rows.size() * G);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::copy_n(emb + rows[i] * E, E, emb_rows.data() + i * E);
  }
  for (bool backward : {false, true}) {
    const char* g = backward ? "lstm_bwd.wx" : "lstm_fwd.wx";
    const double* wx = model.params.value(g).ptr();
    auto d_wx = grads.find(g);
    auto& acc = backward ? input.bwd : input.fwd;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      double* row = acc.data() + rows[i] * G;
      std::copy_n(row, G, d_rows.data() + i * G);
      std::fill_n(row, G, 0.0);
    }
    if (d_wx != grads.end()) {
      kernels::outer_sum(d_rows.data(), G, emb_rows.data(), E, rows.size(), G, E,
                         d_wx->second.ptr());
    }
    if (d_emb != grads.end()) {
      for (std::size_t i = 0; i < rows.size(); ++i) {
        kernels::gemv_t_acc(wx, G, E, d_rows.data() + i * G, d_emb->second.ptr() + rows[i] * E);
      }
    }
  }
  std::fill(input.touched.begin(), input.touched.end(), 0);
}

double loss_and_gradients(const GritNetModel& model,
                          std::span<const std::vector<EncodedEvent>> rows,
                          const std::vector<bool>& labels, Gradients& grads) {
  if (rows.size() != labels.size()) throw ArgumentError("rows/labels size mismatch");
  if (rows.empty()) return 0.0;
  const double scale = 1.0 / static_cast<double>(rows.size());
  const InputProjection proj = project_inputs(model);
  SequenceWorkspace ws;
  InputGradients input;
  double loss = 0.0;
  for (std::size_t n = 0; n < rows.size(); ++n) {
    forward_row(model, proj, rows[n], ws);
    loss += bce_single(ws.prob, labels[n]);
    // d(BCE)/d(logit) = p - y for the unclamped loss.
    backward_row(model, ws, (ws.prob - (labels[n] ? 1.0 : 0.0)) * scale, grads, input);
  }
  flush_input_gradients(model, input, grads);
  return loss * scale;
}

std::vector<double> predict(const GritNetModel& model, std::span<const EncodedSequence> sequences) {
  std::vector<double> out;
  out.reserve(sequences.size());
  const InputProjection proj = project_inputs(model);
  SequenceWorkspace ws;
  for (const auto& s : sequences) {
    const auto row = prepare_row(model, s.events);
    forward_row(model, proj, row, ws);
    out.push_back(ws.prob);
  }
  return out;
}

std::vector<double> pooled_features(const GritNetModel& model, const EncodedSequence& sequence) {
  SequenceWorkspace ws;
  forward_row(model, project_inputs(model), prepare_row(model, sequence.events), ws);
  return ws.pooled;
}

PooledFeatures pooled_features(const GritNetModel& model,
                               std::span<const EncodedSequence> sequences) {
  PooledFeatures out;
  out.reserve(sequences.size());
  const InputProjection proj = project_inputs(model);
  SequenceWorkspace ws;
  for (const auto& s : sequences) {
    forward_row(model, proj, prepare_row(model, s.events), ws);
    out.push_back(ws.pooled);
  }
  return out;
}

std::vector<double> predict_from_features(const GritNetModel& model,
                                          const PooledFeatures& features) {
  const auto w = model.params.value("fc.w").span();
  const double b = model.params.value("fc.b").data[0];
  std::vector<double> out;
  out.reserve(features.size());
  for (const auto& f : features) {
    if (f.size() != w.size()) throw ArgumentError("feature width does not match the model");
    out.push_back(sigmoid(fc_logit(f, w, b)));
  }
  return out;
}

json model_config_json(const GritNetModel& model) {
  return json{{"model", "gritnet"},
              {"embed_dim", model.layers.embed_dim},
              {"hidden_dim", model.layers.hidden_dim},
              {"vocab_size", model.layers.vocab_size},
              {"t_max", model.t_max},
              {"ordinal_map", model.map.to_json()}};
}

void save_model(const GritNetModel& model, const std::string& path) {
  save_checkpoint(model.params, model_config_json(model), path);
}

GritNetModel load_model(const std::string& path) {
  auto [store, config] = load_checkpoint(path);
  GritNetModel m;
  try {
    if (config.at("model").get<std::string>() != "gritnet") {
      throw DataError("checkpoint does not hold a GritNet model");
    }
    m.layers.embed_dim = config.at("embed_dim").get<std::size_t>();
    m.layers.hidden_dim = config.at("hidden_dim").get<std::size_t>();
    m.layers.vocab_size = config.at("vocab_size").get<std::size_t>();
    m.t_max = config.at("t_max").get<std::size_t>();
    m.map = OrdinalMap::from_json(config.at("ordinal_map"));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("corrupt checkpoint config: ") + e.what());
  }
  if (m.map.vocab_size() != m.layers.vocab_size) {
    throw DataError("corrupt checkpoint: vocabulary size disagrees with ordinal map");
  }
  m.params = std::move(store);
  check_shapes(m);
  return m;
}

std::string model_hash(const GritNetModel& model) {
  return hex64(fnv1a64(serialize_checkpoint(model.params, model_config_json(model))));
}

}  // namespace gritnet
