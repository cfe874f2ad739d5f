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

#include "gritnet/checkpoint.hpp"

#include <bit>
#include <cstring>

#include "gritnet/common.hpp"
#include "gritnet/error.hpp"

namespace gritnet {
namespace {

using nlohmann::json;

constexpr char kMagic[4] = {'G', 'R', 'I', 'T'};

template <typename T>
void put_le(std::string& out, T value) {
  static_assert(std::is_integral_v<T>);
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<char>((static_cast<std::uint64_t>(value) >> (8 * i)) & 0xff));
  }
}

template <typename T>
T get_le(const std::string& in, std::size_t pos) {
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[pos + i])) << (8 * i);
  }
  return static_cast<T>(v);
}

void put_doubles(std::string& out, const std::vector<double>& values) {
  for (double d : values) put_le(out, std::bit_cast<std::uint64_t>(d));
}

void get_doubles(const std::string& in, std::size_t pos, std::vector<double>& values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    values[i] = std::bit_cast<double>(get_le<std::uint64_t>(in, pos + 8 * i));
  }
}

}  // namespace

std::string serialize_checkpoint(const ParamStore& store, const json& config) {
  json manifest = json::array();
  std::uint64_t offset = 0;
  for (const auto& [name, p] : store.all()) {
    const std::uint64_t bytes = 8 * p.value.size();
    manifest.push_back(json{{"name", name},
                            {"shape", p.value.shape},
                            {"offset", offset},
                            {"mean_sq_offset", offset + bytes},
                            {"frozen", p.frozen}});
    offset += 2 * bytes;
  }
  const json header{{"config", config}, {"tensors", manifest}, {"payload_bytes", offset}};
  const std::string header_text = header.dump();

  std::string out(kMagic, 4);
  put_le<std::uint32_t>(out, kCheckpointVersion);
  put_le<std::uint64_t>(out, header_text.size());
  out += header_text;
  out.reserve(out.size() + offset);
  for (const auto& [_, p] : store.all()) {
    put_doubles(out, p.value.data);
    put_doubles(out, p.mean_sq.data);
  }
  return out;
}

std::pair<ParamStore, json> deserialize_checkpoint(const std::string& bytes) {
  if (bytes.size() < 16 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw DataError("not a checkpoint (bad magic or too short)");
  }
  const auto version = get_le<std::uint32_t>(bytes, 4);
  if (version != kCheckpointVersion) {
    throw DataError("checkpoint format version " + std::to_string(version) + " unsupported (want " +
                    std::to_string(kCheckpointVersion) + ")");
  }
  const auto header_len = get_le<std::uint64_t>(bytes, 8);
  if (header_len > bytes.size() - 16) throw DataError("checkpoint truncated inside header");
  json header;
  try {
    header = json::parse(bytes.substr(16, header_len));
  } catch (const json::exception& e) {
    throw DataError(std::string("checkpoint header is not valid JSON: ") + e.what());
  }
  const std::size_t base = 16 + header_len;
  ParamStore store;
  try {
    const auto payload = header.at("payload_bytes").get<std::uint64_t>();
    if (bytes.size() - base != payload) {
      throw DataError("checkpoint payload is " + std::to_string(bytes.size() - base) +
                      " bytes, header declares " + std::to_string(payload));
    }
    std::uint64_t expected = 0;
    for (const auto& entry : header.at("tensors")) {
      const auto name = entry.at("name").get<std::string>();
      const auto shape = entry.at("shape").get<std::vector<std::size_t>>();
      const auto off = entry.at("offset").get<std::uint64_t>();
      const auto ms_off = entry.at("mean_sq_offset").get<std::uint64_t>();
      const std::uint64_t n = shape_size(shape);
      if (off != expected || ms_off != off + 8 * n || ms_off + 8 * n > payload) {
        throw DataError("checkpoint manifest offsets inconsistent at '" + name + "'");
      }
      expected = ms_off + 8 * n;
      Tensor value(shape);
      get_doubles(bytes, base + off, value.data);
      store.add(name, std::move(value));
      Parameter& p = store.at(name);
      get_doubles(bytes, base + ms_off, p.mean_sq.data);
      p.frozen = entry.at("frozen").get<bool>();
    }
    if (expected != payload) throw DataError("checkpoint payload has trailing bytes");
  } catch (const json::exception& e) {
    throw DataError(std::string("checkpoint manifest malformed: ") + e.what());
  } catch (const ArgumentError& e) {
    throw DataError(std::string("checkpoint manifest invalid: ") + e.what());
  }
  return {std::move(store), header.value("config", json::object())};
}

void save_checkpoint(const ParamStore& store, const json& config, const std::string& path) {
  write_file(path, serialize_checkpoint(store, config));
}

std::pair<ParamStore, json> load_checkpoint(const std::string& path) {
  return deserialize_checkpoint(read_file(path));
}

}  // namespace gritnet
