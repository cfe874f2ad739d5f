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

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "gritnet/tensor.hpp"

namespace gritnet {

struct Parameter {
  Tensor value;
  Tensor mean_sq;  // RMSProp accumulator, same shape as value
  bool frozen = false;
};

/// Named parameters with freeze flags and optimizer state. Names have the
/// form "<group>.<tensor>" (or just "<group>"); freezing works per group.
class ParamStore {
 public:
  void add(const std::string& name, Tensor value);
  bool contains(const std::string& name) const { return params_.count(name) != 0; }
  Parameter& at(const std::string& name);
  const Parameter& at(const std::string& name) const;
  Tensor& value(const std::string& name) { return at(name).value; }
  const Tensor& value(const std::string& name) const { return at(name).value; }

  const std::map<std::string, Parameter>& all() const noexcept { return params_; }
  std::vector<std::string> names() const;
  std::vector<std::string> groups() const;
  std::vector<std::string> trainable_names() const;

  void set_frozen(const std::string& name, bool frozen) { at(name).frozen = frozen; }
  /// Throws ArgumentError if no parameter belongs to `group`.
  void set_group_frozen(std::string_view group, bool frozen);
  void freeze_all_except(std::string_view group);
  void unfreeze_all();
  bool group_trainable(std::string_view group) const;

  /// Zeros every RMSProp accumulator.
  void reset_optimizer_state();

  bool operator==(const ParamStore& other) const;

 private:
  std::map<std::string, Parameter> params_;
};

std::string_view group_of(std::string_view name) noexcept;

/// Gradients keyed by parameter name.
using Gradients = std::map<std::string, Tensor>;

/// Zero gradients for every unfrozen parameter (frozen ones are absent).
Gradients make_gradients(const ParamStore& store);

struct RmsPropConfig {
  double lr = 1e-3;
  double rho = 0.9;
  double eps = 1e-8;
};

/// s <- rho*s + (1-rho)*g^2; theta <- theta - lr*g/(sqrt(s)+eps).
/// Every unfrozen parameter needs a gradient; a nonzero gradient for a frozen
/// parameter is rejected. Non-finite gradients raise NumericError before any
/// parameter is touched.
void rmsprop_step(ParamStore& store, const Gradients& grads, const RmsPropConfig& config);

}  // namespace gritnet
