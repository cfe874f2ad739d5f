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

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <vector>

#include "kernels_internal.hpp"

namespace gritnet::kernels::detail {
namespace {

double exp_ref(double x) {
  x = std::min(std::max(x, -kExpClamp), kExpClamp);
  const double n = std::nearbyint(x * kLog2e);
  const double r = (x - n * kLn2Hi) - n * kLn2Lo;
  double p = kExpCoef[13];
  for (int k = 12; k >= 0; --k) p = p * r + kExpCoef[k];
  const auto bits = static_cast<std::uint64_t>(static_cast<std::int64_t>(n) + 1023) << 52;
  return p * std::bit_cast<double>(bits);
}

double sigmoid_ref(double x) { return 1.0 / (1.0 + exp_ref(-x)); }

double tanh_ref(double x) {
  const double e = exp_ref(-2.0 * std::fabs(x));
  return std::copysign((1.0 - e) / (1.0 + e), x);
}

}  // namespace

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void rmsprop_scalar(double* theta, double* mean_sq, const double* grad,
                    std::size_t n, double lr, double rho, double eps) {
  const double one_minus_rho = 1.0 - rho;
  for (std::size_t i = 0; i < n; ++i) {
    const double g = grad[i];
    const double s = rho * mean_sq[i] + one_minus_rho * (g * g);
    mean_sq[i] = s;
    theta[i] -= (lr * g) / (std::sqrt(s) + eps);
  }
}

void gemv_acc_scalar(const double* w, std::size_t rows, std::size_t cols,
                 const double* x, double* y) {
  for (std::size_t r = 0; r < rows; ++r) y[r] += dot_scalar(w + r * cols, x, cols);
}

void gemv_t_acc_scalar(const double* w, std::size_t rows, std::size_t cols,
                   const double* g, double* out) {
  for (std::size_t r = 0; r < rows; ++r) {
    if (g[r] != 0.0) axpy_scalar(g[r], w + r * cols, out, cols);
  }
}

void outer_acc_scalar(const double* g, std::size_t rows, const double* x,
                  std::size_t cols, double* dw) {
  for (std::size_t r = 0; r < rows; ++r) {
    if (g[r] != 0.0) axpy_scalar(g[r], x, dw + r * cols, cols);
  }
}

void outer_sum_scalar(const double* g, std::size_t g_stride, const double* x,
                      std::size_t x_stride, std::size_t n, std::size_t rows,
                      std::size_t cols, double* dw) {
  std::vector<double> acc(cols);
  for (std::size_t r = 0; r < rows; ++r) {
    std::fill(acc.begin(), acc.end(), 0.0);
    for (std::size_t t = 0; t < n; ++t) {
      const double gr = g[t * g_stride + r];
      const double* xt = x + t * x_stride;
      for (std::size_t c = 0; c < cols; ++c) acc[c] += gr * xt[c];
    }
    for (std::size_t c = 0; c < cols; ++c) dw[r * cols + c] += acc[c];
  }
}

void lstm_activate_scalar(double* gates, const double* c_prev, double* c, double* tanh_c,
                          double* h, std::size_t hidden) {
  const std::size_t H = hidden;
  for (std::size_t k = 0; k < H; ++k) {
    const double ig = sigmoid_ref(gates[k]);
    const double fg = sigmoid_ref(gates[H + k]);
    const double gg = tanh_ref(gates[2 * H + k]);
    const double og = sigmoid_ref(gates[3 * H + k]);
    gates[k] = ig;
    gates[H + k] = fg;
    gates[2 * H + k] = gg;
    gates[3 * H + k] = og;
    c[k] = fg * c_prev[k] + ig * gg;
    tanh_c[k] = tanh_ref(c[k]);
    h[k] = og * tanh_c[k];
  }
}

}  // namespace gritnet::kernels::detail
