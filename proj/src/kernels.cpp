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

#include <atomic>
#include <cstdlib>
#include <string>

#include "gritnet/error.hpp"
#include "kernels_internal.hpp"

namespace gritnet::kernels {
namespace {

const KernelTable kScalar{Isa::kScalar, "scalar", &detail::dot_scalar,
                          &detail::axpy_scalar, &detail::rmsprop_scalar,
                          &detail::gemv_acc_scalar, &detail::gemv_t_acc_scalar,
                          &detail::outer_acc_scalar, &detail::outer_sum_scalar,
                          &detail::lstm_activate_scalar};

#ifdef GRITNET_HAVE_AVX2
const KernelTable kAvx2{Isa::kAvx2, "avx2", &detail::dot_avx2,
                        &detail::axpy_avx2, &detail::rmsprop_avx2,
                        &detail::gemv_acc_avx2, &detail::gemv_t_acc_avx2,
                        &detail::outer_acc_avx2, &detail::outer_sum_avx2,
                        &detail::lstm_activate_avx2};

bool cpu_has_avx2() {
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}
#endif

const KernelTable* initial_table() {
  const KernelTable* best = &kScalar;
  if (const KernelTable* t = avx2_table()) best = t;
  if (const char* env = std::getenv("GRITNET_KERNELS")) {
    const std::string want(env);
    if (want == "scalar") return &kScalar;
    if (want == "avx2" && avx2_table() != nullptr) return avx2_table();
  }
  return best;
}

std::atomic<const KernelTable*>& current() {
  static std::atomic<const KernelTable*> table{initial_table()};
  return table;
}

}  // namespace

const KernelTable& scalar_table() noexcept { return kScalar; }

const KernelTable* avx2_table() noexcept {
#ifdef GRITNET_HAVE_AVX2
  static const bool ok = cpu_has_avx2();
  return ok ? &kAvx2 : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& active() noexcept {
  return *current().load(std::memory_order_relaxed);
}

void select(Isa isa) {
  if (isa == Isa::kScalar) {
    current().store(&kScalar);
    return;
  }
  const KernelTable* t = avx2_table();
  if (t == nullptr) throw ArgumentError("AVX2 kernels unavailable on this CPU/build");
  current().store(t);
}

}  // namespace gritnet::kernels
