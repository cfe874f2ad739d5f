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

#include <immintrin.h>

#include <cmath>

#include "kernels_internal.hpp"

namespace gritnet::kernels::detail {

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4),
                           _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  }
  acc0 = _mm256_add_pd(acc0, acc1);
  __m128d lo = _mm256_castpd256_pd128(acc0);
  __m128d hi = _mm256_extractf128_pd(acc0, 1);
  lo = _mm_add_pd(lo, hi);
  double acc = _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

// No FMA below: mul-then-add keeps these bit-identical to the scalar path.
void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vy = _mm256_loadu_pd(y + i);
    vy = _mm256_add_pd(vy, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
    _mm256_storeu_pd(y + i, vy);
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void rmsprop_avx2(double* theta, double* mean_sq, const double* grad,
                  std::size_t n, double lr, double rho, double eps) {
  const double one_minus_rho = 1.0 - rho;
  const __m256d vrho = _mm256_set1_pd(rho);
  const __m256d vomr = _mm256_set1_pd(one_minus_rho);
  const __m256d vlr = _mm256_set1_pd(lr);
  const __m256d veps = _mm256_set1_pd(eps);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d g = _mm256_loadu_pd(grad + i);
    __m256d s = _mm256_add_pd(_mm256_mul_pd(vrho, _mm256_loadu_pd(mean_sq + i)),
                              _mm256_mul_pd(vomr, _mm256_mul_pd(g, g)));
    _mm256_storeu_pd(mean_sq + i, s);
    const __m256d step = _mm256_div_pd(_mm256_mul_pd(vlr, g),
                                       _mm256_add_pd(_mm256_sqrt_pd(s), veps));
    _mm256_storeu_pd(theta + i, _mm256_sub_pd(_mm256_loadu_pd(theta + i), step));
  }
  for (; i < n; ++i) {
    const double gi = grad[i];
    const double s = rho * mean_sq[i] + one_minus_rho * (gi * gi);
    mean_sq[i] = s;
    theta[i] -= (lr * gi) / (std::sqrt(s) + eps);
  }
}

namespace {

// Sum of the four lanes of each argument, packed as {a, b, c, d}.
inline __m256d hsum4(__m256d a, __m256d b, __m256d c, __m256d d) {
  const __m256d ab = _mm256_hadd_pd(a, b);  // a0+a1 b0+b1 a2+a3 b2+b3
  const __m256d cd = _mm256_hadd_pd(c, d);
  const __m256d lo = _mm256_permute2f128_pd(ab, cd, 0x20);
  const __m256d hi = _mm256_permute2f128_pd(ab, cd, 0x31);
  return _mm256_add_pd(lo, hi);
}

__m256d exp4(__m256d x) {
  x = _mm256_min_pd(_mm256_max_pd(x, _mm256_set1_pd(-kExpClamp)), _mm256_set1_pd(kExpClamp));
  const __m256d n = _mm256_round_pd(_mm256_mul_pd(x, _mm256_set1_pd(kLog2e)),
                                    _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  const __m256d r = _mm256_sub_pd(_mm256_sub_pd(x, _mm256_mul_pd(n, _mm256_set1_pd(kLn2Hi))),
                                  _mm256_mul_pd(n, _mm256_set1_pd(kLn2Lo)));
  __m256d p = _mm256_set1_pd(kExpCoef[13]);
  for (int k = 12; k >= 0; --k) {
    p = _mm256_add_pd(_mm256_mul_pd(p, r), _mm256_set1_pd(kExpCoef[k]));
  }
  // n + 1023 lands in the low mantissa bits of magic + n; shift it into the
  // exponent field.
  const __m256d biased = _mm256_add_pd(n, _mm256_set1_pd(6755399441055744.0 + 1023.0));
  const __m256i bits = _mm256_slli_epi64(_mm256_castpd_si256(biased), 52);
  return _mm256_mul_pd(p, _mm256_castsi256_pd(bits));
}

__m256d sigmoid4(__m256d x) {
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d e = exp4(_mm256_sub_pd(_mm256_setzero_pd(), x));
  return _mm256_div_pd(one, _mm256_add_pd(one, e));
}

__m256d tanh4(__m256d x) {
  const __m256d sign = _mm256_set1_pd(-0.0);
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d ax = _mm256_andnot_pd(sign, x);
  const __m256d e = exp4(_mm256_mul_pd(_mm256_set1_pd(-2.0), ax));
  const __m256d t = _mm256_div_pd(_mm256_sub_pd(one, e), _mm256_add_pd(one, e));
  return _mm256_or_pd(t, _mm256_and_pd(sign, x));
}

}  // namespace

void gemv_acc_avx2(const double* w, std::size_t rows, std::size_t cols,
                   const double* x, double* y) {
  std::size_t r = 0;
  const std::size_t cv = cols & ~std::size_t{3};
  for (; r + 4 <= rows; r += 4) {
    const double* w0 = w + r * cols;
    const double* w1 = w0 + cols;
    const double* w2 = w1 + cols;
    const double* w3 = w2 + cols;
    __m256d a0 = _mm256_setzero_pd(), a1 = _mm256_setzero_pd();
    __m256d a2 = _mm256_setzero_pd(), a3 = _mm256_setzero_pd();
    for (std::size_t c = 0; c < cv; c += 4) {
      const __m256d xv = _mm256_loadu_pd(x + c);
      a0 = _mm256_fmadd_pd(_mm256_loadu_pd(w0 + c), xv, a0);
      a1 = _mm256_fmadd_pd(_mm256_loadu_pd(w1 + c), xv, a1);
      a2 = _mm256_fmadd_pd(_mm256_loadu_pd(w2 + c), xv, a2);
      a3 = _mm256_fmadd_pd(_mm256_loadu_pd(w3 + c), xv, a3);
    }
    __m256d sums = hsum4(a0, a1, a2, a3);
    if (cv < cols) {
      alignas(32) double tail[4] = {0.0, 0.0, 0.0, 0.0};
      for (std::size_t c = cv; c < cols; ++c) {
        tail[0] += w0[c] * x[c];
        tail[1] += w1[c] * x[c];
        tail[2] += w2[c] * x[c];
        tail[3] += w3[c] * x[c];
      }
      sums = _mm256_add_pd(sums, _mm256_load_pd(tail));
    }
    _mm256_storeu_pd(y + r, _mm256_add_pd(_mm256_loadu_pd(y + r), sums));
  }
  for (; r < rows; ++r) y[r] += dot_avx2(w + r * cols, x, cols);
}

// The output chunk stays in registers across rows; per element this is the
// same mul-then-add sequence as the scalar loop.
void gemv_t_acc_avx2(const double* w, std::size_t rows, std::size_t cols,
                     const double* g, double* out) {
  std::size_t c = 0;
  for (; c + 16 <= cols; c += 16) {
    __m256d o0 = _mm256_loadu_pd(out + c), o1 = _mm256_loadu_pd(out + c + 4);
    __m256d o2 = _mm256_loadu_pd(out + c + 8), o3 = _mm256_loadu_pd(out + c + 12);
    for (std::size_t r = 0; r < rows; ++r) {
      if (g[r] == 0.0) continue;
      const __m256d gv = _mm256_set1_pd(g[r]);
      const double* wr = w + r * cols + c;
      o0 = _mm256_add_pd(o0, _mm256_mul_pd(gv, _mm256_loadu_pd(wr)));
      o1 = _mm256_add_pd(o1, _mm256_mul_pd(gv, _mm256_loadu_pd(wr + 4)));
      o2 = _mm256_add_pd(o2, _mm256_mul_pd(gv, _mm256_loadu_pd(wr + 8)));
      o3 = _mm256_add_pd(o3, _mm256_mul_pd(gv, _mm256_loadu_pd(wr + 12)));
    }
    _mm256_storeu_pd(out + c, o0);
    _mm256_storeu_pd(out + c + 4, o1);
    _mm256_storeu_pd(out + c + 8, o2);
    _mm256_storeu_pd(out + c + 12, o3);
  }
  for (; c + 4 <= cols; c += 4) {
    __m256d o = _mm256_loadu_pd(out + c);
    for (std::size_t r = 0; r < rows; ++r) {
      if (g[r] == 0.0) continue;
      o = _mm256_add_pd(o, _mm256_mul_pd(_mm256_set1_pd(g[r]),
                                         _mm256_loadu_pd(w + r * cols + c)));
    }
    _mm256_storeu_pd(out + c, o);
  }
  for (; c < cols; ++c) {
    double o = out[c];
    for (std::size_t r = 0; r < rows; ++r) {
      if (g[r] != 0.0) o += g[r] * w[r * cols + c];
    }
    out[c] = o;
  }
}

void outer_acc_avx2(const double* g, std::size_t rows, const double* x,
                    std::size_t cols, double* dw) {
  for (std::size_t r = 0; r < rows; ++r) {
    if (g[r] != 0.0) axpy_avx2(g[r], x, dw + r * cols, cols);
  }
}

void outer_sum_avx2(const double* g, std::size_t g_stride, const double* x,
                    std::size_t x_stride, std::size_t n, std::size_t rows,
                    std::size_t cols, double* dw) {
  const std::size_t cv = cols & ~std::size_t{7};
  std::size_t r = 0;
  // 4 rows x 8 columns of accumulators per pass over t.
  for (; r + 4 <= rows; r += 4) {
    for (std::size_t c = 0; c < cv; c += 8) {
      __m256d a[4][2];
      for (auto& row : a) row[0] = row[1] = _mm256_setzero_pd();
      for (std::size_t t = 0; t < n; ++t) {
        const double* gt = g + t * g_stride + r;
        const __m256d x0 = _mm256_loadu_pd(x + t * x_stride + c);
        const __m256d x1 = _mm256_loadu_pd(x + t * x_stride + c + 4);
        for (int k = 0; k < 4; ++k) {
          const __m256d gv = _mm256_broadcast_sd(gt + k);
          a[k][0] = _mm256_fmadd_pd(gv, x0, a[k][0]);
          a[k][1] = _mm256_fmadd_pd(gv, x1, a[k][1]);
        }
      }
      for (int k = 0; k < 4; ++k) {
        double* d = dw + (r + k) * cols + c;
        _mm256_storeu_pd(d, _mm256_add_pd(_mm256_loadu_pd(d), a[k][0]));
        _mm256_storeu_pd(d + 4, _mm256_add_pd(_mm256_loadu_pd(d + 4), a[k][1]));
      }
    }
  }
  // Leftover rows and columns.
  for (std::size_t rr = 0; rr < rows; ++rr) {
    const std::size_t c0 = rr < r ? cv : 0;
    for (std::size_t c = c0; c < cols; ++c) {
      double acc = 0.0;
      for (std::size_t t = 0; t < n; ++t) acc += g[t * g_stride + rr] * x[t * x_stride + c];
      dw[rr * cols + c] += acc;
    }
  }
}

void lstm_activate_avx2(double* gates, const double* c_prev, double* c, double* tanh_c,
                        double* h, std::size_t hidden) {
  const std::size_t H = hidden;
  std::size_t k = 0;
  for (; k + 4 <= H; k += 4) {
    const __m256d ig = sigmoid4(_mm256_loadu_pd(gates + k));
    const __m256d fg = sigmoid4(_mm256_loadu_pd(gates + H + k));
    const __m256d gg = tanh4(_mm256_loadu_pd(gates + 2 * H + k));
    const __m256d og = sigmoid4(_mm256_loadu_pd(gates + 3 * H + k));
    _mm256_storeu_pd(gates + k, ig);
    _mm256_storeu_pd(gates + H + k, fg);
    _mm256_storeu_pd(gates + 2 * H + k, gg);
    _mm256_storeu_pd(gates + 3 * H + k, og);
    const __m256d cv = _mm256_add_pd(_mm256_mul_pd(fg, _mm256_loadu_pd(c_prev + k)),
                                     _mm256_mul_pd(ig, gg));
    const __m256d tc = tanh4(cv);
    _mm256_storeu_pd(c + k, cv);
    _mm256_storeu_pd(tanh_c + k, tc);
    _mm256_storeu_pd(h + k, _mm256_mul_pd(og, tc));
  }
  if (k < H) {
    // Tail lanes go through the same vector code on a padded copy.
    alignas(32) double g4[4][4] = {}, cp[4] = {}, cv[4], tc[4], hv[4];
    const std::size_t m = H - k;
    for (std::size_t q = 0; q < 4; ++q) {
      for (std::size_t j = 0; j < m; ++j) g4[q][j] = gates[q * H + k + j];
    }
    for (std::size_t j = 0; j < m; ++j) cp[j] = c_prev[k + j];
    lstm_activate_avx2(&g4[0][0], cp, cv, tc, hv, 4);
    for (std::size_t q = 0; q < 4; ++q) {
      for (std::size_t j = 0; j < m; ++j) gates[q * H + k + j] = g4[q][j];
    }
    for (std::size_t j = 0; j < m; ++j) {
      c[k + j] = cv[j];
      tanh_c[k + j] = tc[j];
      h[k + j] = hv[j];
    }
  }
}

}  // namespace gritnet::kernels::detail
