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

#include <cstdint>
#include <string>
#include <utility>

#include "gritnet/params.hpp"
#include "json.hpp"

namespace gritnet {

inline constexpr std::uint32_t kCheckpointVersion = 1;

/// Binary layout:
///   "GRIT" | u32 version | u64 header length | JSON header | payload
/// The header holds the caller's config object and a tensor manifest
/// (name, shape, byte offset of the value, byte offset of the RMSProp
/// accumulator, freeze flag). The payload is little-endian f64 data in
/// manifest order. All integers are little-endian.
std::string serialize_checkpoint(const ParamStore& store, const nlohmann::json& config);
std::pair<ParamStore, nlohmann::json> deserialize_checkpoint(const std::string& bytes);

void save_checkpoint(const ParamStore& store, const nlohmann::json& config,
                     const std::string& path);
/// Throws DataError on a bad magic, version mismatch, truncation or a
/// manifest that disagrees with the payload.
std::pair<ParamStore, nlohmann::json> load_checkpoint(const std::string& path);

}  // namespace gritnet
