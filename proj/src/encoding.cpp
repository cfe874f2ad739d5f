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

#include "gritnet/encoding.hpp"

#include <algorithm>
#include <numeric>

#include "gritnet/common.hpp"

namespace gritnet {
namespace {

using nlohmann::json;

int variant_offset(ItemCategory category, EventKind kind) {
  switch (category) {
    case ItemCategory::kContent:
      return kind == EventKind::kContent ? 0 : -1;
    case ItemCategory::kQuiz:
      if (kind == EventKind::kQuizCorrect) return 0;
      if (kind == EventKind::kQuizIncorrect) return 1;
      return -1;
    case ItemCategory::kProject:
      if (kind == EventKind::kProjectPassed) return 0;
      if (kind == EventKind::kProjectFailed) return 1;
      return -1;
  }
  return -1;
}

ItemCategory category_of(EventKind kind) {
  switch (kind) {
    case EventKind::kContent: return ItemCategory::kContent;
    case EventKind::kQuizCorrect:
    case EventKind::kQuizIncorrect: return ItemCategory::kQuiz;
    default: return ItemCategory::kProject;
  }
}

EventKind kind_for(ItemCategory category, int offset) {
  switch (category) {
    case ItemCategory::kContent: return EventKind::kContent;
    case ItemCategory::kQuiz:
      return offset == 0 ? EventKind::kQuizCorrect : EventKind::kQuizIncorrect;
    case ItemCategory::kProject:
      return offset == 0 ? EventKind::kProjectPassed : EventKind::kProjectFailed;
  }
  return EventKind::kContent;
}

void check_d_cap(int d_cap) {
  if (d_cap < 0) throw ArgumentError("delta cap must be >= 0");
}

}  // namespace

std::optional<int> OrdinalMap::find(const std::string& raw_id, EventKind kind) const {
  auto it = slots_.find(raw_id);
  if (it == slots_.end()) return std::nullopt;
  const int off = variant_offset(it->second.category, kind);
  if (off < 0) return std::nullopt;
  return it->second.base + off;
}

std::vector<OrdinalMap::Entry> OrdinalMap::entries() const {
  std::vector<Entry> out;
  out.reserve(slots_.size() * 2);
  for (const auto& [id, slot] : slots_) {
    const int variants = slot.category == ItemCategory::kContent ? 1 : 2;
    for (int v = 0; v < variants; ++v) {
      out.push_back(Entry{id, kind_for(slot.category, v), slot.base + v});
    }
  }
  std::sort(out.begin(), out.end(), [](const Entry& a, const Entry& b) {
    if (a.index != b.index) return a.index < b.index;
    if (a.raw_id != b.raw_id) return a.raw_id < b.raw_id;
    return a.kind < b.kind;
  });
  return out;
}

bool OrdinalMap::operator==(const OrdinalMap& other) const {
  return counts_ == other.counts_ && d_cap_ == other.d_cap_ &&
         aligned_ == other.aligned_ && entries() == other.entries();
}

json OrdinalMap::to_json() const {
  json entries_json = json::array();
  for (const auto& e : entries()) {
    entries_json.push_back(json::array({e.raw_id, std::string(to_string(e.kind)), e.index}));
  }
  return json{{"layout_version", kOrdinalLayoutVersion},
              {"entries", std::move(entries_json)},
              {"L", num_actions()},
              {"d_cap", d_cap_},
              {"counts", json::array({counts_.contents, counts_.quizzes, counts_.projects})},
              {"aligned", aligned_}};
}

OrdinalMap OrdinalMap::from_json(const json& j) {
  OrdinalMap map;
  try {
    if (j.at("layout_version").get<int>() != kOrdinalLayoutVersion) {
      throw DataError("unsupported ordinal map layout_version");
    }
    map.d_cap_ = j.at("d_cap").get<int>();
    check_d_cap(map.d_cap_);
    map.aligned_ = j.value("aligned", false);
    const std::size_t L = j.at("L").get<std::size_t>();
    std::size_t n_content = 0, n_quiz_rows = 0, n_project_rows = 0;
    for (const auto& row : j.at("entries")) {
      const auto id = row.at(0).get<std::string>();
      const EventKind kind = parse_event_kind(row.at(1).get<std::string>());
      const int index = row.at(2).get<int>();
      if (index < 0 || static_cast<std::size_t>(index) >= L) {
        throw DataError("ordinal map entry index out of range for '" + id + "'");
      }
      const ItemCategory cat = category_of(kind);
      const int off = variant_offset(cat, kind);
      auto [it, inserted] = map.slots_.emplace(id, Slot{cat, index - off});
      if (!inserted && (it->second.category != cat || it->second.base != index - off)) {
        throw DataError("inconsistent ordinal map entries for '" + id + "'");
      }
      if (cat == ItemCategory::kContent) ++n_content;
      if (cat == ItemCategory::kQuiz) ++n_quiz_rows;
      if (cat == ItemCategory::kProject) ++n_project_rows;
    }
    if (j.contains("counts")) {
      const auto c = j.at("counts").get<std::vector<std::size_t>>();
      if (c.size() != 3) throw DataError("ordinal map 'counts' must have 3 entries");
      map.counts_ = ItemCounts{c[0], c[1], c[2]};
    } else {
      map.counts_ = ItemCounts{n_content, n_quiz_rows / 2, n_project_rows / 2};
    }
    if (map.num_actions() != L) throw DataError("ordinal map 'L' disagrees with its counts");
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed ordinal map: ") + e.what());
  }
  return map;
}

OrdinalMap build_ordinal_map(const CourseSchema& schema, int d_cap) {
  schema.validate();
  check_d_cap(d_cap);
  OrdinalMap map;
  map.d_cap_ = d_cap;
  map.counts_ = ItemCounts{schema.content_ids.size(), schema.quiz_ids.size(),
                           schema.project_ids.size()};
  const int i = static_cast<int>(schema.content_ids.size());
  const int j = static_cast<int>(schema.quiz_ids.size());
  for (int n = 0; n < i; ++n) {
    map.slots_.emplace(schema.content_ids[n], OrdinalMap::Slot{ItemCategory::kContent, n});
  }
  for (int n = 0; n < j; ++n) {
    map.slots_.emplace(schema.quiz_ids[n], OrdinalMap::Slot{ItemCategory::kQuiz, i + 2 * n});
  }
  for (int n = 0; n < static_cast<int>(schema.project_ids.size()); ++n) {
    map.slots_.emplace(schema.project_ids[n],
                       OrdinalMap::Slot{ItemCategory::kProject, i + 2 * j + 2 * n});
  }
  return map;
}

OrdinalMap build_aligned_map(const CourseSchema& target, const OrdinalMap& source) {
  target.validate();
  const ItemCounts& src = source.counts();
  if (!target.quiz_ids.empty() && src.quizzes == 0) {
    throw ArgumentError("vocabulary incompatibility: target course has quizzes, source has none");
  }
  OrdinalMap map;
  map.d_cap_ = source.delta_cap();
  map.counts_ = src;
  map.aligned_ = true;
  const int i = static_cast<int>(src.contents);
  const int j = static_cast<int>(src.quizzes);
  auto clamp_pos = [](std::size_t n, std::size_t count) {
    return static_cast<int>(std::min(n, count - 1));
  };
  for (std::size_t n = 0; n < target.content_ids.size(); ++n) {
    map.slots_.emplace(target.content_ids[n],
                       OrdinalMap::Slot{ItemCategory::kContent, clamp_pos(n, src.contents)});
  }
  for (std::size_t n = 0; n < target.quiz_ids.size(); ++n) {
    map.slots_.emplace(target.quiz_ids[n],
                       OrdinalMap::Slot{ItemCategory::kQuiz, i + 2 * clamp_pos(n, src.quizzes)});
  }
  for (std::size_t n = 0; n < target.project_ids.size(); ++n) {
    map.slots_.emplace(
        target.project_ids[n],
        OrdinalMap::Slot{ItemCategory::kProject, i + 2 * j + 2 * clamp_pos(n, src.projects)});
  }
  return map;
}

int discretize_delta(Timestamp current, Timestamp previous, int cap) {
  if (cap < 0) throw ArgumentError("delta cap must be >= 0");
  const std::int64_t elapsed = current.seconds - previous.seconds;
  if (elapsed < 0) {
    throw ArgumentError("negative time delta (" + format_rfc3339(previous) + " -> " +
                        format_rfc3339(current) + ")");
  }
  return static_cast<int>(std::min<std::int64_t>(elapsed / kSecondsPerDay, cap));
}

EncodedSequence encode_student(const StudentRecord& record, const OrdinalMap& map,
                               int d_cap) {
  EncodedSequence seq;
  seq.student_id = record.student_id;
  seq.label = record.graduated;
  seq.events.reserve(record.events.size());
  Timestamp previous = record.enrolled_at;
  for (std::size_t t = 0; t < record.events.size(); ++t) {
    const RawEvent& ev = record.events[t];
    const auto action = map.find(ev.raw_id, ev.kind);
    if (!action) {
      throw DataError("cannot encode event " + std::to_string(t) + " of student '" +
                      record.student_id + "': (" + ev.raw_id + ", " +
                      std::string(to_string(ev.kind)) + ") not in ordinal map");
    }
    seq.events.push_back(EncodedEvent{*action, discretize_delta(ev.ts, previous, d_cap)});
    previous = ev.ts;
  }
  return seq;
}

std::vector<EncodedSequence> encode_dataset(const Dataset& dataset, const OrdinalMap& map) {
  std::vector<EncodedSequence> out;
  out.reserve(dataset.students.size());
  for (const auto& r : dataset.students) out.push_back(encode_student(r, map, map.delta_cap()));
  return out;
}

std::vector<EncodedEvent> take_recent(std::span<const EncodedEvent> events, std::size_t t_max) {
  if (events.size() <= t_max) return {events.begin(), events.end()};
  return {events.end() - static_cast<std::ptrdiff_t>(t_max), events.end()};
}

std::vector<EncodedEvent> pre_pad(std::span<const EncodedEvent> events, std::size_t t_max) {
  if (events.size() > t_max) {
    throw ArgumentError("sequence of length " + std::to_string(events.size()) +
                        " exceeds t_max " + std::to_string(t_max));
  }
  std::vector<EncodedEvent> out(t_max - events.size(), kPadding);
  out.insert(out.end(), events.begin(), events.end());
  return out;
}

std::vector<Batch> pad_and_batch(std::span<const EncodedSequence> sequences, std::size_t t_max,
                                 std::size_t batch_size,
                                 std::optional<std::uint64_t> shuffle_seed) {
  if (batch_size == 0) throw ArgumentError("batch_size must be >= 1");
  for (const auto& s : sequences) {
    if (s.events.size() > t_max) {
      throw ArgumentError("t_max " + std::to_string(t_max) + " is shorter than sequence '" +
                          s.student_id + "' (" + std::to_string(s.events.size()) + ")");
    }
  }
  std::vector<std::size_t> order(sequences.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (shuffle_seed) {
    Rng rng(*shuffle_seed);
    rng.shuffle(order);
  }
  std::vector<Batch> batches;
  for (std::size_t start = 0; start < order.size(); start += batch_size) {
    Batch b;
    const std::size_t end = std::min(order.size(), start + batch_size);
    for (std::size_t n = start; n < end; ++n) {
      const auto& s = sequences[order[n]];
      b.source_index.push_back(order[n]);
      b.padding.push_back(t_max - s.events.size());
      b.rows.push_back(pre_pad(s.events, t_max));
      b.labels.push_back(s.label);
    }
    batches.push_back(std::move(b));
  }
  return batches;
}

json archive_to_json(const EncodedArchive& archive) {
  json seqs = json::array();
  for (const auto& s : archive.sequences) {
    json ev = json::array();
    for (const auto& e : s.events) ev.push_back(json::array({e.action, e.delta}));
    seqs.push_back(json{{"student_id", s.student_id}, {"label", s.label}, {"events", std::move(ev)}});
  }
  return json{{"format", "gritnet-encoded"},
              {"version", 1},
              {"week", archive.week},
              {"ordinal_map", archive.map.to_json()},
              {"sequences", std::move(seqs)}};
}

EncodedArchive archive_from_json(const json& j) {
  EncodedArchive a;
  try {
    if (j.at("format").get<std::string>() != "gritnet-encoded" || j.at("version").get<int>() != 1) {
      throw DataError("not a version-1 encoded archive");
    }
    a.week = j.at("week").get<int>();
    a.map = OrdinalMap::from_json(j.at("ordinal_map"));
    const auto L = static_cast<std::int32_t>(a.map.num_actions());
    for (const auto& s : j.at("sequences")) {
      EncodedSequence seq;
      seq.student_id = s.at("student_id").get<std::string>();
      seq.label = s.at("label").get<bool>();
      for (const auto& e : s.at("events")) {
        EncodedEvent ev{e.at(0).get<std::int32_t>(), e.at(1).get<std::int32_t>()};
        if (ev.action < 0 || ev.action >= L || ev.delta < 0 || ev.delta > a.map.delta_cap()) {
          throw DataError("encoded event out of vocabulary in '" + seq.student_id + "'");
        }
        seq.events.push_back(ev);
      }
      a.sequences.push_back(std::move(seq));
    }
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed encoded archive: ") + e.what());
  }
  return a;
}

}  // namespace gritnet
