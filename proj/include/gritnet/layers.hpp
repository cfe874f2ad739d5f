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

// Forward and reverse passes for the layers of the sequence classifier:
// embedding, LSTM, bidirectional LSTM, global max pooling over time, a
// single-output fully-connected layer with sigmoid, and binary cross-entropy.
//
// Everything works on one sequence at a time (T x features, row-major).
// Batches are loops over sequences, so a sequence's result never depends on
// what else is in its batch.

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "gritnet/encoding.hpp"
#include "gritnet/tensor.hpp"

namespace gritnet {

struct LayerConfig {
  std::size_t embed_dim = 512;   // E
  std::size_t hidden_dim = 256;  // H, per direction
  std::size_t vocab_size = 0;    // |O|
  void validate() const;
  bool operator==(const LayerConfig&) const = default;
};


// ---------------------------------------------------------------- embedding

/// out[t] = table[action] + table[num_actions + delta]; padding rows are 0.
/// `table` is |O| x E. Throws ArgumentError on out-of-range indices.
void embedding_forward(std::span<const EncodedEvent> row, const Tensor& table,
                       std::size_t num_actions, std::span<double> out);
/// Adds d_out[t] into the two referenced rows of d_table.
void embedding_backward(std::span<const EncodedEvent> row, std::span<const double> d_out,
                        std::size_t num_actions, std::size_t embed_dim,
                        std::span<double> d_table);
/// Batched convenience wrapper: B x T x E.
Tensor embedding_forward(const std::vector<std::vector<EncodedEvent>>& rows,
                         const Tensor& table, std::size_t num_actions);

// --------------------------------------------------------------------- LSTM

/// Gate order in the 4H axis: input, forget, cell candidate, output.
struct LstmWeights {
  const double* wx = nullptr;  // 4H x In
  const double* wh = nullptr;  // 4H x H
  const double* b = nullptr;   // 4H
  std::size_t input_dim = 0;
  std::size_t hidden_dim = 0;
};

/// Null members mean "frozen, skip".
struct LstmGrads {
  double* wx = nullptr;
  double* wh = nullptr;
  double* b = nullptr;
};

/// Activated gates (4H), cell state and tanh(cell) of one step.
struct LstmStepState {
  std::vector<double> gates;
  std::vector<double> c;
  std::vector<double> tanh_c;
  std::vector<double> h;
};

/// One cell step. `x` may be empty to mean an all-zero input (the input
/// projection is skipped). h_prev/c_prev have H entries.
void lstm_step_forward(const double* x, const double* h_prev, const double* c_prev,
                       const LstmWeights& w, double* gates, double* c, double* tanh_c,
                       double* h);

/// Reverse of lstm_step_forward. dh is the total gradient reaching h_t,
/// dc the gradient reaching c_t from step t+1. Writes dx (if non-null),
/// dh_prev and dc_prev; accumulates into the non-null members of `grads`.
void lstm_step_backward(const double* x, const double* h_prev, const double* c_prev,
                        const double* gates, const double* tanh_c, const double* dh,
                        const double* dc, const LstmWeights& w, const LstmGrads& grads,
                        double* dx, double* dh_prev, double* dc_prev);

struct LstmCellOutput {
  std::vector<double> h;
  std::vector<double> c;
};

LstmCellOutput lstm_cell_forward(std::span<const double> x, std::span<const double> h_prev,
                                 std::span<const double> c_prev, const LstmWeights& w);

/// Activations of one direction over a whole sequence, indexed by timestep.
struct LstmTrace {
  std::size_t steps = 0;
  std::size_t hidden = 0;
  bool reverse = false;
  std::vector<double> gates;   // T x 4H
  std::vector<double> c;       // T x H
  std::vector<double> tanh_c;  // T x H
  std::vector<double> h;       // T x H
};

/// Runs the cell over x (T x In) from a zero state, right-to-left when
/// `reverse`. zero_input[t] marks timesteps whose input is known to be zero.
void lstm_sequence_forward(std::span<const double> x, const std::vector<bool>& zero_input,
                           const LstmWeights& w, bool reverse, LstmTrace& trace);
/// dh_out is T x H (gradient w.r.t. each emitted h_t). dx (T x In) is
/// accumulated into when non-empty.
void lstm_sequence_backward(std::span<const double> x, const std::vector<bool>& zero_input,
                            const LstmTrace& trace, std::span<const double> dh_out,
                            const LstmWeights& w, const LstmGrads& grads, std::span<double> dx);

/// Variant whose input pre-activations (T x 4H, standing in for wx x_t) are
/// supplied by the caller; wx is not read. Steps flagged in zero_input get
/// no input term.
void lstm_sequence_forward_projected(std::span<const double> x_in,
                                     const std::vector<bool>& zero_input, const LstmWeights& w,
                                     bool reverse, LstmTrace& trace);
/// Writes d(loss)/d(x_in) (T x 4H, zero-input rows untouched) when d_x_in is
/// non-empty; accumulates wh and b gradients. grads.wx is ignored.
void lstm_sequence_backward_projected(const std::vector<bool>& zero_input, const LstmTrace& trace,
                                      std::span<const double> dh_out, const LstmWeights& w,
                                      const LstmGrads& grads, std::span<double> d_x_in);

struct BiLstmTrace {
  LstmTrace fwd;
  LstmTrace bwd;
};

/// out (T x 2H) holds [h_fwd(t); h_bwd(t)] per timestep.
void bilstm_forward(std::span<const double> x, const std::vector<bool>& zero_input,
                    const LstmWeights& fwd, const LstmWeights& bwd, BiLstmTrace& trace,
                    std::span<double> out);
void bilstm_backward(std::span<const double> x, const std::vector<bool>& zero_input,
                     const BiLstmTrace& trace, std::span<const double> d_out,
                     const LstmWeights& fwd, const LstmWeights& bwd, const LstmGrads& d_fwd,
                     const LstmGrads& d_bwd, std::span<double> dx);

// ------------------------------------------------------------- max pooling

/// out[f] = max_t x[t][f]; argmax keeps the earliest timestep on ties.
void global_max_pool(std::span<const double> x, std::size_t steps, std::size_t features,
                     std::span<double> out, std::vector<std::size_t>& argmax);
void global_max_pool_backward(const std::vector<std::size_t>& argmax,
                              std::span<const double> d_out, std::size_t features,
                              std::span<double> dx);

// ------------------------------------------------------------ FC + sigmoid

double fc_logit(std::span<const double> v, std::span<const double> w, double b);
/// p = sigmoid(w . v + b) per row of a B x F matrix.
std::vector<double> fc_sigmoid_forward(const Tensor& v, const Tensor& w, double b);

// --------------------------------------------------------------------- BCE

inline constexpr double kBceClamp = 1e-12;

/// -mean(y log p + (1-y) log(1-p)) with p clamped to [eps, 1-eps].
double bce_loss(std::span<const double> p, const std::vector<bool>& y);
double bce_single(double p, bool y) noexcept;

inline double sigmoid(double z) noexcept {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace gritnet
