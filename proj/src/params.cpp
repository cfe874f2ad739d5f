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

#include "gritnet/params.hpp"

#include <algorithm>

#include "gritnet/error.hpp"
#include "gritnet/kernels.hpp"

namespace gritnet {

std::string_view group_of(std::string_view name) noexcept {
  const auto dot = name.find('.');
  return dot == std::string_view::npos ? name : name.substr(0, dot);
}

void ParamStore::add(const std::string& name, Tensor value) {
  if (params_.count(name)) throw ArgumentError("duplicate parameter '" + name + "'");
  Parameter p;
  p.mean_sq = Tensor(value.shape);
  p.value = std::move(value);
  params_.emplace(name, std::move(p));
}

Parameter& ParamStore::at(const std::string& name) {
  auto it = params_.find(name);
  if (it == params_.end()) throw ArgumentError("unknown parameter '" + name + "'");
  return it->second;
}

const Parameter& ParamStore::at(const std::string& name) const {
  auto it = params_.find(name);
  if (it == params_.end()) throw ArgumentError("unknown parameter '" + name + "'");
  return it->second;
}

std::vector<std::string> ParamStore::names() const {
  std::vector<std::string> out;
  for (const auto& [name, _] : params_) out.push_back(name);
  return out;
}

std::vector<std::string> ParamStore::groups() const {
  std::vector<std::string> out;
  for (const auto& [name, _] : params_) {
    std::string g(group_of(name));
    if (out.empty() || out.back() != g) out.push_back(std::move(g));
  }
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<std::string> ParamStore::trainable_names() const {
  std::vector<std::string> out;
  for (const auto& [name, p] : params_) {
    if (!p.frozen) out.push_back(name);
  }
  return out;
}

void ParamStore::set_group_frozen(std::string_view group, bool frozen) {
  bool any = false;
  for (auto& [name, p] : params_) {
    if (group_of(name) == group) {
      p.frozen = frozen;
      any = true;
    }
  }
  if (!any) throw ArgumentError("no parameter group '" + std::string(group) + "'");
}

void ParamStore::freeze_all_except(std::string_view group) {
  bool any = false;
  for (auto& [name, p] : params_) {
    p.frozen = group_of(name) != group;
    any = any || !p.frozen;
  }
  if (!any) throw ArgumentError("no parameter group '" + std::string(group) + "'");
}

void ParamStore::unfreeze_all() {
  for (auto& [_, p] : params_) p.frozen = false;
}

bool ParamStore::group_trainable(std::string_view group) const {
  for (const auto& [name, p] : params_) {
    if (group_of(name) == group && !p.frozen) return true;
  }
  return false;
}

void ParamStore::reset_optimizer_state() {
  for (auto& [_, p] : params_) p.mean_sq.fill(0.0);
}

bool ParamStore::operator==(const ParamStore& other) const {
  if (params_.size() != other.params_.size()) return false;
  for (const auto& [name, p] : params_) {
    auto it = other.params_.find(name);
    if (it == other.params_.end()) return false;
    const Parameter& q = it->second;
    if (p.frozen != q.frozen || !(p.value == q.value) || !(p.mean_sq == q.mean_sq)) return false;
  }
  return true;
}

Gradients make_gradients(const ParamStore& store) {
  Gradients g;
  for (const auto& [name, p] : store.all()) {
    if (!p.frozen) g.emplace(name, Tensor(p.value.shape));
  }
  return g;
}

void rmsprop_step(ParamStore& store, const Gradients& grads, const RmsPropConfig& config) {
  if (!(config.lr > 0.0) || !(config.rho >= 0.0 && config.rho < 1.0) || !(config.eps >= 0.0)) {
    throw ArgumentError("invalid RMSProp hyperparameters");
  }
  for (const auto& [name, g] : grads) {
    const Parameter& p = store.at(name);
    if (g.shape != p.value.shape) {
      throw ArgumentError("gradient for '" + name + "' has shape " + shape_string(g.shape) +
                          ", parameter has " + shape_string(p.value.shape));
    }
    if (p.frozen && std::any_of(g.data.begin(), g.data.end(), [](double v) { return v != 0.0; })) {
      throw ArgumentError("nonzero gradient supplied for frozen parameter '" + name + "'");
    }
    g.require_finite("gradient of '" + name + "'");
  }
  for (const auto& [name, p] : store.all()) {
    if (!p.frozen && !grads.count(name)) {
      throw ArgumentError("missing gradient for trainable parameter '" + name + "'");
    }
  }
  const auto update = kernels::active().rmsprop;
  for (const auto& [name, g] : grads) {
    Parameter& p = store.at(name);
    if (p.frozen) continue;
    update(p.value.ptr(), p.mean_sq.ptr(), g.ptr(), g.size(), config.lr, config.rho, config.eps);
  }
}

}  // namespace gritnet
