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

#include "gritnet/kernels.hpp"

namespace gritnet::kernels::detail {

// exp(x) = 2^n * e^r with r = x - n ln2, |r| <= ln2/2; e^r by a degree-13
// Taylor polynomial. Input is clamped so 2^n stays a normal number.
inline constexpr double kExpClamp = 708.0;
inline constexpr double kLog2e = 1.4426950408889634;
inline constexpr double kLn2Hi = 6.93147180369123816490e-01;
inline constexpr double kLn2Lo = 1.90821492927058770002e-10;
inline constexpr double kExpCoef[14] = {
    1.0, 1.0, 1.0 / 2, 1.0 / 6, 1.0 / 24, 1.0 / 120, 1.0 / 720, 1.0 / 5040,
    1.0 / 40320, 1.0 / 362880, 1.0 / 3628800, 1.0 / 39916800, 1.0 / 479001600,
    1.0 / 6227020800};

double dot_scalar(const double* a, const double* b, std::size_t n);
void axpy_scalar(double alpha, const double* x, double* y, std::size_t n);
void rmsprop_scalar(double* theta, double* mean_sq, const double* grad,
                    std::size_t n, double lr, double rho, double eps);
void gemv_acc_scalar(const double* w, std::size_t rows, std::size_t cols,
                 const double* x, double* y);
void gemv_t_acc_scalar(const double* w, std::size_t rows, std::size_t cols,
                   const double* g, double* out);
void outer_acc_scalar(const double* g, std::size_t rows, const double* x,
                  std::size_t cols, double* dw);
void outer_sum_scalar(const double* g, std::size_t g_stride, const double* x,
                  std::size_t x_stride, std::size_t n, std::size_t rows,
                  std::size_t cols, double* dw);
void lstm_activate_scalar(double* gates, const double* c_prev, double* c,
                      double* tanh_c, double* h, std::size_t hidden);

#ifdef GRITNET_HAVE_AVX2
double dot_avx2(const double* a, const double* b, std::size_t n);
void axpy_avx2(double alpha, const double* x, double* y, std::size_t n);
void rmsprop_avx2(double* theta, double* mean_sq, const double* grad,
                  std::size_t n, double lr, double rho, double eps);
void gemv_acc_avx2(const double* w, std::size_t rows, std::size_t cols,
                 const double* x, double* y);
void gemv_t_acc_avx2(const double* w, std::size_t rows, std::size_t cols,
                   const double* g, double* out);
void outer_acc_avx2(const double* g, std::size_t rows, const double* x,
                  std::size_t cols, double* dw);
void outer_sum_avx2(const double* g, std::size_t g_stride, const double* x,
                  std::size_t x_stride, std::size_t n, std::size_t rows,
                  std::size_t cols, double* dw);
void lstm_activate_avx2(double* gates, const double* c_prev, double* c,
                      double* tanh_c, double* h, std::size_t hidden);
#endif

}  // namespace gritnet::kernels::detail
