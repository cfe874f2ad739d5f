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

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gritnet {

/// splitmix64 finalizer; used to derive independent sub-seeds from a parent
/// seed and a stream tag.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

/// Seeded PRNG with platform-independent draws. std::mt19937_64 output is
/// fully specified by the standard; the distributions in <random> are not, so
/// every draw used for shuffles, initialization and synthesis goes through
/// this class.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer on [0, n); n must be positive.
  std::uint64_t below(std::uint64_t n);
  bool bernoulli(double p) { return uniform() < p; }
  double normal();
  double lognormal_with_mean(double mean, double cv);

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::span<const unsigned char> bytes,
                      std::uint64_t state = 0xcbf29ce484222325ULL) noexcept;
std::uint64_t fnv1a64(std::string_view text) noexcept;
std::string hex64(std::uint64_t value);
/// FNV-1a of a file's bytes, hex encoded. Throws DataError if unreadable.
std::string file_hash(const std::string& path);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

}  // namespace gritnet
