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
#include <span>
#include <string>
#include <vector>

namespace gritnet {

/// Row-major f64 tensor.
struct Tensor {
  std::vector<std::size_t> shape;
  std::vector<double> data;

  Tensor() = default;
  explicit Tensor(std::vector<std::size_t> dims);
  Tensor(std::vector<std::size_t> dims, std::vector<double> values);

  std::size_t size() const noexcept { return data.size(); }
  std::span<double> span() noexcept { return data; }
  std::span<const double> span() const noexcept { return data; }
  double* ptr() noexcept { return data.data(); }
  const double* ptr() const noexcept { return data.data(); }

  void fill(double value);
  bool all_finite() const noexcept;
  /// Throws NumericError naming `what` on the first NaN/Inf.
  void require_finite(const std::string& what) const;

  bool operator==(const Tensor&) const = default;
};

std::size_t shape_size(const std::vector<std::size_t>& dims) noexcept;
std::string shape_string(const std::vector<std::size_t>& dims);

}  // namespace gritnet
