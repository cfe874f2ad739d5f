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

#include "gritnet/tensor.hpp"

#include <algorithm>
#include <cmath>

#include "gritnet/error.hpp"

namespace gritnet {

std::size_t shape_size(const std::vector<std::size_t>& dims) noexcept {
  std::size_t n = 1;
  for (auto d : dims) n *= d;
  return n;
}

std::string shape_string(const std::vector<std::size_t>& dims) {
  std::string s = "[";
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (i) s += "x";
    s += std::to_string(dims[i]);
  }
  return s + "]";
}

Tensor::Tensor(std::vector<std::size_t> dims)
    : shape(std::move(dims)), data(shape_size(shape), 0.0) {}

Tensor::Tensor(std::vector<std::size_t> dims, std::vector<double> values)
    : shape(std::move(dims)), data(std::move(values)) {
  if (data.size() != shape_size(shape)) {
    throw ArgumentError("tensor data length " + std::to_string(data.size()) +
                        " does not match shape " + shape_string(shape));
  }
}

void Tensor::fill(double value) { std::fill(data.begin(), data.end(), value); }

bool Tensor::all_finite() const noexcept {
  return std::all_of(data.begin(), data.end(), [](double v) { return std::isfinite(v); });
}

void Tensor::require_finite(const std::string& what) const {
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (!std::isfinite(data[i])) {
      throw NumericError("non-finite value in " + what + " at flat index " + std::to_string(i));
    }
  }
}

}  // namespace gritnet
