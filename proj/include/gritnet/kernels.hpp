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

// Dense f64 inner loops used by the recurrent layers and the optimizer.
//
// Every kernel has a portable scalar reference and, on x86-64, an AVX2
// variant compiled into its own translation unit. The active table is chosen
// once at startup from CPUID (override with GRITNET_KERNELS=scalar|avx2).
// Elementwise kernels (axpy, rmsprop, gemv_t_acc, outer_acc, lstm_activate)
// are bit-identical across variants; the reductions (dot, gemv_acc, outer_sum)
// reassociate and use FMA, so variants agree to rounding only.

#include <cstddef>
#include <span>
#include <string_view>

namespace gritnet::kernels {

enum class Isa { kScalar, kAvx2 };

struct KernelTable {
  Isa isa;
  std::string_view name;
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // s = rho*s + (1-rho)*g*g; theta -= lr*g/(sqrt(s)+eps)
  void (*rmsprop)(double* theta, double* mean_sq, const double* grad,
                  std::size_t n, double lr, double rho, double eps);
  // Matrix forms; see the free functions below.
  void (*gemv_acc)(const double* w, std::size_t rows, std::size_t cols,
                   const double* x, double* y);
  void (*gemv_t_acc)(const double* w, std::size_t rows, std::size_t cols,
                     const double* g, double* out);
  void (*outer_acc)(const double* g, std::size_t rows, const double* x,
                    std::size_t cols, double* dw);
  void (*outer_sum)(const double* g, std::size_t g_stride, const double* x,
                    std::size_t x_stride, std::size_t n, std::size_t rows,
                    std::size_t cols, double* dw);
  void (*lstm_activate)(double* gates, const double* c_prev, double* c,
                        double* tanh_c, double* h, std::size_t hidden);
};

const KernelTable& scalar_table() noexcept;
/// nullptr when the build or the CPU lacks AVX2+FMA.
const KernelTable* avx2_table() noexcept;

const KernelTable& active() noexcept;
/// Switch the process-wide table; throws ArgumentError if unavailable.
void select(Isa isa);

inline double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a.data(), b.data(), a.size());
}

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  active().axpy(alpha, x.data(), y.data(), x.size());
}

/// y[r] += W[r,:] . x for a row-major rows x cols matrix.
inline void gemv_acc(const double* w, std::size_t rows, std::size_t cols,
                     const double* x, double* y) {
  active().gemv_acc(w, rows, cols, x, y);
}
/// out += W^T g, accumulated row by row in ascending order.
inline void gemv_t_acc(const double* w, std::size_t rows, std::size_t cols,
                       const double* g, double* out) {
  active().gemv_t_acc(w, rows, cols, g, out);
}
/// dW += g x^T.
inline void outer_acc(const double* g, std::size_t rows, const double* x,
                      std::size_t cols, double* dw) {
  active().outer_acc(g, rows, x, cols, dw);
}
/// dW += sum_t g_t x_t^T over n strided rows; each entry's sum is formed in
/// ascending t before it is added to dW.
inline void outer_sum(const double* g, std::size_t g_stride, const double* x,
                      std::size_t x_stride, std::size_t n, std::size_t rows,
                      std::size_t cols, double* dw) {
  active().outer_sum(g, g_stride, x, x_stride, n, rows, cols, dw);
}

/// LSTM cell nonlinearity. `gates` holds the i, f, g, o pre-activations
/// (4 x hidden) and is overwritten with the activated gates; then
/// c = f*c_prev + i*g, tanh_c = tanh(c), h = o*tanh_c. Uses its own exp
/// (within a few ulp of libm) so that both variants round identically.
inline void lstm_activate(double* gates, const double* c_prev, double* c, double* tanh_c,
                          double* h, std::size_t hidden) {
  active().lstm_activate(gates, c_prev, c, tanh_c, h, hidden);
}

}  // namespace gritnet::kernels
