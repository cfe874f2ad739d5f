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
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "gritnet/events.hpp"
#include "json.hpp"

namespace gritnet {

inline constexpr int kDefaultDeltaCap = 28;
inline constexpr int kOrdinalLayoutVersion = 1;

struct ItemCounts {
  std::size_t contents = 0;  // i
  std::size_t quizzes = 0;   // j
  std::size_t projects = 0;  // k
  bool operator==(const ItemCounts&) const = default;
};

/// Number of distinct actions: i + 2j + 2k (quizzes and projects each have
/// two outcomes).
constexpr std::size_t action_count(const ItemCounts& c) noexcept {
  return c.contents + 2 * c.quizzes + 2 * c.projects;
}

/// Maps (raw id, kind) to an ordinal action id in [0, L).
///
/// Layout: content items occupy [0, i) in curriculum order, quiz q occupies
/// i+2q (correct) and i+2q+1 (incorrect), project p occupies i+2j+2p (passed)
/// and i+2j+2p+1 (failed). Because ids depend only on category and position,
/// two courses with different inventories still share a coordinate system.
class OrdinalMap {
 public:
  struct Entry {
    std::string raw_id;
    EventKind kind;
    int index;
    bool operator==(const Entry&) const = default;
  };

  OrdinalMap() = default;

  const ItemCounts& counts() const noexcept { return counts_; }
  /// L.
  std::size_t num_actions() const noexcept { return action_count(counts_); }
  int delta_cap() const noexcept { return d_cap_; }
  /// |O| = L + D_cap + 1: action rows followed by one row per delta bucket.
  std::size_t vocab_size() const noexcept {
    return num_actions() + static_cast<std::size_t>(d_cap_) + 1;
  }
  /// True when built by build_aligned_map (ids of one course projected onto
  /// another's action space).
  bool aligned() const noexcept { return aligned_; }

  std::optional<int> find(const std::string& raw_id, EventKind kind) const;
  /// Entries ordered by (index, raw_id).
  std::vector<Entry> entries() const;

  nlohmann::json to_json() const;
  static OrdinalMap from_json(const nlohmann::json& j);

  bool operator==(const OrdinalMap& other) const;

 private:
  friend OrdinalMap build_ordinal_map(const CourseSchema&, int);
  friend OrdinalMap build_aligned_map(const CourseSchema&, const OrdinalMap&);

  struct Slot {
    ItemCategory category;
    int base;  // index of content / correct / passed variant
  };

  ItemCounts counts_;
  int d_cap_ = kDefaultDeltaCap;
  bool aligned_ = false;
  std::unordered_map<std::string, Slot> slots_;
};

OrdinalMap build_ordinal_map(const CourseSchema& schema,
                             int d_cap = kDefaultDeltaCap);

/// Projects `target` ids onto `source`'s action space: the n-th item of a
/// category maps to the source's n-th item of the same category, clamped to
/// the source's last item. Throws ArgumentError when the target uses a
/// category the source has no items for.
OrdinalMap build_aligned_map(const CourseSchema& target, const OrdinalMap& source);

struct EncodedEvent {
  std::int32_t action = -1;
  std::int32_t delta = -1;
  bool is_padding() const noexcept { return action < 0; }
  bool operator==(const EncodedEvent&) const = default;
};

/// Pre-padding entry; maps to an all-zero embedding.
inline constexpr EncodedEvent kPadding{-1, -1};

struct EncodedSequence {
  std::string student_id;
  std::vector<EncodedEvent> events;
  bool label = false;
  bool operator==(const EncodedSequence&) const = default;
};

/// Whole elapsed days between the two instants, clamped to [0, cap].
/// Throws ArgumentError if current precedes previous.
int discretize_delta(Timestamp current, Timestamp previous, int cap);

/// The first event's delta is measured from enrollment.
EncodedSequence encode_student(const StudentRecord& record, const OrdinalMap& map,
                               int d_cap);
std::vector<EncodedSequence> encode_dataset(const Dataset& dataset,
                                            const OrdinalMap& map);

/// Keeps the most recent `t_max` events.
std::vector<EncodedEvent> take_recent(std::span<const EncodedEvent> events,
                                      std::size_t t_max);
/// Prepends padding up to `t_max`; throws ArgumentError if longer.
std::vector<EncodedEvent> pre_pad(std::span<const EncodedEvent> events,
                                  std::size_t t_max);

struct Batch {
  std::vector<std::size_t> source_index;  // position in the input list
  std::vector<std::vector<EncodedEvent>> rows;  // each exactly t_max long
  std::vector<std::size_t> padding;  // leading sentinels per row
  std::vector<bool> labels;
  std::size_t size() const noexcept { return rows.size(); }
};

/// Pre-pads every sequence to t_max and groups them into batches. With a
/// shuffle seed the order is a seeded permutation, otherwise input order.
std::vector<Batch> pad_and_batch(std::span<const EncodedSequence> sequences,
                                 std::size_t t_max, std::size_t batch_size,
                                 std::optional<std::uint64_t> shuffle_seed = {});

/// Archive written by `gritnet encode`.
struct EncodedArchive {
  OrdinalMap map;
  int week = 0;  // 0: untruncated
  std::vector<EncodedSequence> sequences;
};

nlohmann::json archive_to_json(const EncodedArchive& archive);
EncodedArchive archive_from_json(const nlohmann::json& j);

}  // namespace gritnet
