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

#include "gritnet/layers.hpp"

#include <algorithm>
#include <cmath>

#include "gritnet/error.hpp"
#include "gritnet/kernels.hpp"

namespace gritnet {

void LayerConfig::validate() const {
  if (embed_dim == 0 || hidden_dim == 0) throw ArgumentError("layer dimensions must be >= 1");
  if (vocab_size == 0) throw ArgumentError("vocabulary size must be >= 1");
}

void embedding_forward(std::span<const EncodedEvent> row, const Tensor& table,
                       std::size_t num_actions, std::span<double> out) {
  if (table.shape.size() != 2) throw ArgumentError("embedding table must be 2-D");
  const std::size_t vocab = table.shape[0];
  const std::size_t E = table.shape[1];
  if (out.size() != row.size() * E) throw ArgumentError("embedding output has wrong size");
  for (std::size_t t = 0; t < row.size(); ++t) {
    double* dst = out.data() + t * E;
    const EncodedEvent& ev = row[t];
    if (ev.is_padding()) {
      std::fill(dst, dst + E, 0.0);
      continue;
    }
    const std::size_t a = static_cast<std::size_t>(ev.action);
    const std::size_t d = num_actions + static_cast<std::size_t>(ev.delta);
    if (ev.delta < 0 || a >= num_actions || d >= vocab) {
      throw ArgumentError("embedding index out of range (action " + std::to_string(ev.action) +
                          ", delta " + std::to_string(ev.delta) + ")");
    }
    const double* ra = table.ptr() + a * E;
    const double* rd = table.ptr() + d * E;
    for (std::size_t e = 0; e < E; ++e) dst[e] = ra[e] + rd[e];
  }
}

void embedding_backward(std::span<const EncodedEvent> row, std::span<const double> d_out,
                        std::size_t num_actions, std::size_t embed_dim,
                        std::span<double> d_table) {
  const auto axpy = kernels::active().axpy;
  for (std::size_t t = 0; t < row.size(); ++t) {
    const EncodedEvent& ev = row[t];
    if (ev.is_padding()) continue;
    const double* g = d_out.data() + t * embed_dim;
    const std::size_t a = static_cast<std::size_t>(ev.action);
    const std::size_t d = num_actions + static_cast<std::size_t>(ev.delta);
    axpy(1.0, g, d_table.data() + a * embed_dim, embed_dim);
    axpy(1.0, g, d_table.data() + d * embed_dim, embed_dim);
  }
}

Tensor embedding_forward(const std::vector<std::vector<EncodedEvent>>& rows, const Tensor& table,
                         std::size_t num_actions) {
  const std::size_t B = rows.size();
  const std::size_t T = B ? rows[0].size() : 0;
  const std::size_t E = table.shape.at(1);
  Tensor out({B, T, E});
  for (std::size_t b = 0; b < B; ++b) {
    if (rows[b].size() != T) throw ArgumentError("embedding batch rows differ in length");
    embedding_forward(rows[b], table, num_actions,
                      std::span<double>(out.ptr() + b * T * E, T * E));
  }
  return out;
}

namespace {

// gates = b + x_in + wh h_prev, then the cell update. x_in is the input
// pre-activation (wx x, or a projected table row) or null for zero input.
void step_forward_core(const double* x_in, const double* h_prev, const double* c_prev,
                       const LstmWeights& w, double* gates, double* c, double* tanh_c,
                       double* h) {
  const std::size_t H = w.hidden_dim;
  if (x_in != nullptr) {
    for (std::size_t r = 0; r < 4 * H; ++r) gates[r] = w.b[r] + x_in[r];
  } else {
    std::copy(w.b, w.b + 4 * H, gates);
  }
  kernels::gemv_acc(w.wh, 4 * H, H, h_prev, gates);
  kernels::lstm_activate(gates, c_prev, c, tanh_c, h, H);
}

// Fills dpre (4H) and dc_prev, accumulates b and wh gradients, writes dh_prev.
void step_backward_core(const double* h_prev, const double* c_prev, const double* gates,
                        const double* tanh_c, const double* dh, const double* dc,
                        const LstmWeights& w, const LstmGrads& grads, double* dpre,
                        double* dh_prev, double* dc_prev) {
  const std::size_t H = w.hidden_dim;
  for (std::size_t k = 0; k < H; ++k) {
    const double ig = gates[k];
    const double fg = gates[H + k];
    const double gg = gates[2 * H + k];
    const double og = gates[3 * H + k];
    const double tc = tanh_c[k];
    const double d_o = dh[k] * tc;
    const double d_c = dc[k] + dh[k] * og * (1.0 - tc * tc);
    dpre[k] = d_c * gg * ig * (1.0 - ig);
    dpre[H + k] = d_c * c_prev[k] * fg * (1.0 - fg);
    dpre[2 * H + k] = d_c * ig * (1.0 - gg * gg);
    dpre[3 * H + k] = d_o * og * (1.0 - og);
    dc_prev[k] = d_c * fg;
  }
  if (grads.b != nullptr) {
    for (std::size_t r = 0; r < 4 * H; ++r) grads.b[r] += dpre[r];
  }
  if (grads.wh != nullptr) kernels::outer_acc(dpre, 4 * H, h_prev, H, grads.wh);
  std::fill(dh_prev, dh_prev + H, 0.0);
  kernels::gemv_t_acc(w.wh, 4 * H, H, dpre, dh_prev);
}

}  // namespace

void lstm_step_forward(const double* x, const double* h_prev, const double* c_prev,
                       const LstmWeights& w, double* gates, double* c, double* tanh_c,
                       double* h) {
  const std::size_t H = w.hidden_dim;
  thread_local std::vector<double> x_in;
  if (x != nullptr) {
    x_in.assign(4 * H, 0.0);
    kernels::gemv_acc(w.wx, 4 * H, w.input_dim, x, x_in.data());
  }
  step_forward_core(x != nullptr ? x_in.data() : nullptr, h_prev, c_prev, w, gates, c, tanh_c, h);
}

void lstm_step_backward(const double* x, const double* h_prev, const double* c_prev,
                        const double* gates, const double* tanh_c, const double* dh,
                        const double* dc, const LstmWeights& w, const LstmGrads& grads,
                        double* dx, double* dh_prev, double* dc_prev) {
  const std::size_t H = w.hidden_dim;
  thread_local std::vector<double> dpre;
  dpre.resize(4 * H);
  step_backward_core(h_prev, c_prev, gates, tanh_c, dh, dc, w, grads, dpre.data(), dh_prev,
                     dc_prev);
  if (grads.wx != nullptr && x != nullptr) {
    kernels::outer_acc(dpre.data(), 4 * H, x, w.input_dim, grads.wx);
  }
  if (dx != nullptr && x != nullptr) {
    kernels::gemv_t_acc(w.wx, 4 * H, w.input_dim, dpre.data(), dx);
  }
}

LstmCellOutput lstm_cell_forward(std::span<const double> x, std::span<const double> h_prev,
                                 std::span<const double> c_prev, const LstmWeights& w) {
  const std::size_t H = w.hidden_dim;
  if (x.size() != w.input_dim || h_prev.size() != H || c_prev.size() != H) {
    throw ArgumentError("lstm_cell_forward: shape mismatch");
  }
  std::vector<double> gates(4 * H), tanh_c(H);
  LstmCellOutput out{std::vector<double>(H), std::vector<double>(H)};
  lstm_step_forward(x.data(), h_prev.data(), c_prev.data(), w, gates.data(), out.c.data(),
                    tanh_c.data(), out.h.data());
  return out;
}

void lstm_sequence_forward(std::span<const double> x, const std::vector<bool>& zero_input,
                           const LstmWeights& w, bool reverse, LstmTrace& trace) {
  const std::size_t H = w.hidden_dim;
  const std::size_t In = w.input_dim;
  const std::size_t T = zero_input.size();
  if (x.size() != T * In) throw ArgumentError("lstm input has wrong size");
  trace.steps = T;
  trace.hidden = H;
  trace.reverse = reverse;
  trace.gates.resize(T * 4 * H);
  trace.c.resize(T * H);
  trace.tanh_c.resize(T * H);
  trace.h.resize(T * H);
  const std::vector<double> zeros(H, 0.0);
  for (std::size_t n = 0; n < T; ++n) {
    const std::size_t t = reverse ? T - 1 - n : n;
    const double* h_prev = n == 0 ? zeros.data() : trace.h.data() + (reverse ? t + 1 : t - 1) * H;
    const double* c_prev = n == 0 ? zeros.data() : trace.c.data() + (reverse ? t + 1 : t - 1) * H;
    const double* xt = zero_input[t] ? nullptr : x.data() + t * In;
    lstm_step_forward(xt, h_prev, c_prev, w, trace.gates.data() + t * 4 * H,
                      trace.c.data() + t * H, trace.tanh_c.data() + t * H, trace.h.data() + t * H);
  }
}

void lstm_sequence_backward(std::span<const double> x, const std::vector<bool>& zero_input,
                            const LstmTrace& trace, std::span<const double> dh_out,
                            const LstmWeights& w, const LstmGrads& grads, std::span<double> dx) {
  const std::size_t H = w.hidden_dim;
  const std::size_t In = w.input_dim;
  const std::size_t T = trace.steps;
  const bool reverse = trace.reverse;
  std::vector<double> dh(H), dh_next(H, 0.0), dc_next(H, 0.0), dc_prev(H);
  const std::vector<double> zeros(H, 0.0);
  for (std::size_t n = T; n-- > 0;) {
    const std::size_t t = reverse ? T - 1 - n : n;
    const double* h_prev = n == 0 ? zeros.data() : trace.h.data() + (reverse ? t + 1 : t - 1) * H;
    const double* c_prev = n == 0 ? zeros.data() : trace.c.data() + (reverse ? t + 1 : t - 1) * H;
    for (std::size_t k = 0; k < H; ++k) dh[k] = dh_out[t * H + k] + dh_next[k];
    const double* xt = zero_input[t] ? nullptr : x.data() + t * In;
    double* dxt = dx.empty() ? nullptr : dx.data() + t * In;
    lstm_step_backward(xt, h_prev, c_prev, trace.gates.data() + t * 4 * H,
                       trace.tanh_c.data() + t * H, dh.data(), dc_next.data(), w, grads, dxt,
                       dh_next.data(), dc_prev.data());
    dc_next.swap(dc_prev);
  }
}

void lstm_sequence_forward_projected(std::span<const double> x_in,
                                     const std::vector<bool>& zero_input, const LstmWeights& w,
                                     bool reverse, LstmTrace& trace) {
  const std::size_t H = w.hidden_dim;
  const std::size_t T = zero_input.size();
  if (x_in.size() != T * 4 * H) throw ArgumentError("projected lstm input has wrong size");
  trace.steps = T;
  trace.hidden = H;
  trace.reverse = reverse;
  trace.gates.resize(T * 4 * H);
  trace.c.resize(T * H);
  trace.tanh_c.resize(T * H);
  trace.h.resize(T * H);
  const std::vector<double> zeros(H, 0.0);
  for (std::size_t n = 0; n < T; ++n) {
    const std::size_t t = reverse ? T - 1 - n : n;
    const double* h_prev = n == 0 ? zeros.data() : trace.h.data() + (reverse ? t + 1 : t - 1) * H;
    const double* c_prev = n == 0 ? zeros.data() : trace.c.data() + (reverse ? t + 1 : t - 1) * H;
    const double* xt = zero_input[t] ? nullptr : x_in.data() + t * 4 * H;
    step_forward_core(xt, h_prev, c_prev, w, trace.gates.data() + t * 4 * H,
                      trace.c.data() + t * H, trace.tanh_c.data() + t * H, trace.h.data() + t * H);
  }
}

void lstm_sequence_backward_projected(const std::vector<bool>& zero_input, const LstmTrace& trace,
                                      std::span<const double> dh_out, const LstmWeights& w,
                                      const LstmGrads& grads, std::span<double> d_x_in) {
  const std::size_t H = w.hidden_dim;
  const std::size_t T = trace.steps;
  const bool reverse = trace.reverse;
  if (!d_x_in.empty() && d_x_in.size() != T * 4 * H) {
    throw ArgumentError("projected lstm gradient has wrong size");
  }
  std::vector<double> dh(H), dh_next(H, 0.0), dc_next(H, 0.0), dc_prev(H);
  thread_local std::vector<double> dpre;
  dpre.resize(T * 4 * H);
  const std::vector<double> zeros(H, 0.0);
  // b and wh gradients are reduced over time after the loop.
  const LstmGrads no_param_grads{};
  for (std::size_t n = T; n-- > 0;) {
    const std::size_t t = reverse ? T - 1 - n : n;
    const double* h_prev = n == 0 ? zeros.data() : trace.h.data() + (reverse ? t + 1 : t - 1) * H;
    const double* c_prev = n == 0 ? zeros.data() : trace.c.data() + (reverse ? t + 1 : t - 1) * H;
    for (std::size_t k = 0; k < H; ++k) dh[k] = dh_out[t * H + k] + dh_next[k];
    double* dp = dpre.data() + t * 4 * H;
    step_backward_core(h_prev, c_prev, trace.gates.data() + t * 4 * H,
                       trace.tanh_c.data() + t * H, dh.data(), dc_next.data(), w,
                       no_param_grads, dp, dh_next.data(), dc_prev.data());
    if (!d_x_in.empty() && !zero_input[t]) {
      std::copy(dp, dp + 4 * H, d_x_in.begin() + static_cast<std::ptrdiff_t>(t * 4 * H));
    }
    dc_next.swap(dc_prev);
  }
  if (grads.b != nullptr) {
    for (std::size_t t = 0; t < T; ++t) {
      const double* dp = dpre.data() + t * 4 * H;
      for (std::size_t r = 0; r < 4 * H; ++r) grads.b[r] += dp[r];
    }
  }
  // The first processed step has h_prev = 0 and contributes nothing to wh.
  if (grads.wh != nullptr && T > 1) {
    const double* g = dpre.data() + (reverse ? 0 : 4 * H);
    const double* hp = trace.h.data() + (reverse ? H : 0);
    kernels::outer_sum(g, 4 * H, hp, H, T - 1, 4 * H, H, grads.wh);
  }
}

void bilstm_forward(std::span<const double> x, const std::vector<bool>& zero_input,
                    const LstmWeights& fwd, const LstmWeights& bwd, BiLstmTrace& trace,
                    std::span<double> out) {
  const std::size_t T = zero_input.size();
  if (T == 0) throw ArgumentError("bilstm_forward needs T >= 1");
  if (fwd.input_dim != bwd.input_dim || fwd.hidden_dim != bwd.hidden_dim) {
    throw ArgumentError("bilstm directions disagree on shape");
  }
  const std::size_t H = fwd.hidden_dim;
  if (out.size() != T * 2 * H) throw ArgumentError("bilstm output has wrong size");
  lstm_sequence_forward(x, zero_input, fwd, false, trace.fwd);
  lstm_sequence_forward(x, zero_input, bwd, true, trace.bwd);
  for (std::size_t t = 0; t < T; ++t) {
    std::copy_n(trace.fwd.h.data() + t * H, H, out.data() + t * 2 * H);
    std::copy_n(trace.bwd.h.data() + t * H, H, out.data() + t * 2 * H + H);
  }
}

void bilstm_backward(std::span<const double> x, const std::vector<bool>& zero_input,
                     const BiLstmTrace& trace, std::span<const double> d_out,
                     const LstmWeights& fwd, const LstmWeights& bwd, const LstmGrads& d_fwd,
                     const LstmGrads& d_bwd, std::span<double> dx) {
  const std::size_t T = trace.fwd.steps;
  const std::size_t H = fwd.hidden_dim;
  std::vector<double> dh_f(T * H), dh_b(T * H);
  for (std::size_t t = 0; t < T; ++t) {
    std::copy_n(d_out.data() + t * 2 * H, H, dh_f.data() + t * H);
    std::copy_n(d_out.data() + t * 2 * H + H, H, dh_b.data() + t * H);
  }
  lstm_sequence_backward(x, zero_input, trace.fwd, dh_f, fwd, d_fwd, dx);
  lstm_sequence_backward(x, zero_input, trace.bwd, dh_b, bwd, d_bwd, dx);
}

void global_max_pool(std::span<const double> x, std::size_t steps, std::size_t features,
                     std::span<double> out, std::vector<std::size_t>& argmax) {
  if (steps == 0) throw ArgumentError("global_max_pool needs T >= 1");
  std::copy_n(x.data(), features, out.data());
  argmax.assign(features, 0);
  for (std::size_t t = 1; t < steps; ++t) {
    const double* row = x.data() + t * features;
    for (std::size_t f = 0; f < features; ++f) {
      if (row[f] > out[f]) {
        out[f] = row[f];
        argmax[f] = t;
      }
    }
  }
}

void global_max_pool_backward(const std::vector<std::size_t>& argmax,
                              std::span<const double> d_out, std::size_t features,
                              std::span<double> dx) {
  for (std::size_t f = 0; f < features; ++f) dx[argmax[f] * features + f] += d_out[f];
}

double fc_logit(std::span<const double> v, std::span<const double> w, double b) {
  if (v.size() != w.size()) throw ArgumentError("fc input/weight size mismatch");
  return kernels::dot(w, v) + b;
}

std::vector<double> fc_sigmoid_forward(const Tensor& v, const Tensor& w, double b) {
  if (v.shape.size() != 2 || w.size() != v.shape[1]) {
    throw ArgumentError("fc_sigmoid_forward: shape mismatch");
  }
  const std::size_t F = v.shape[1];
  std::vector<double> p(v.shape[0]);
  for (std::size_t r = 0; r < p.size(); ++r) {
    p[r] = sigmoid(fc_logit(std::span<const double>(v.ptr() + r * F, F), w.span(), b));
  }
  return p;
}

double bce_single(double p, bool y) noexcept {
  const double q = std::clamp(p, kBceClamp, 1.0 - kBceClamp);
  return y ? -std::log(q) : -std::log1p(-q);
}

double bce_loss(std::span<const double> p, const std::vector<bool>& y) {
  if (p.size() != y.size()) throw ArgumentError("bce_loss: size mismatch");
  if (p.empty()) return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) total += bce_single(p[i], y[i]);
  return total / static_cast<double>(p.size());
}

}  // namespace gritnet
