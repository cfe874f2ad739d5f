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

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "gritnet/error.hpp"
#include "json.hpp"

namespace gritnet {

/// UTC instant at second resolution.
struct Timestamp {
  std::int64_t seconds = 0;
  auto operator<=>(const Timestamp&) const = default;
};

inline constexpr std::int64_t kSecondsPerDay = 86400;

/// Accepts "YYYY-MM-DDTHH:MM:SS[.fff](Z|±HH:MM)"; fractional seconds are
/// floored. Throws DataError on anything else.
Timestamp parse_rfc3339(std::string_view text);
/// Always emits the "YYYY-MM-DDTHH:MM:SSZ" form.
std::string format_rfc3339(Timestamp ts);

enum class EventKind {
  kContent,
  kQuizCorrect,
  kQuizIncorrect,
  kProjectPassed,
  kProjectFailed,
};

std::string_view to_string(EventKind kind) noexcept;
/// Parses the wire names ("content", "quiz_correct", ...).
EventKind parse_event_kind(std::string_view name);

struct RawEvent {
  std::string raw_id;
  EventKind kind = EventKind::kContent;
  Timestamp ts;
  bool operator==(const RawEvent&) const = default;
};

struct StudentRecord {
  std::string student_id;
  Timestamp enrolled_at;
  std::vector<RawEvent> events;  // non-decreasing ts, all >= enrolled_at
  bool graduated = false;
  bool operator==(const StudentRecord&) const = default;
};

enum class ItemCategory { kContent, kQuiz, kProject };

/// A course's content inventory, each list in curriculum order.
struct CourseSchema {
  std::vector<std::string> content_ids;
  std::vector<std::string> quiz_ids;
  std::vector<std::string> project_ids;

  /// Throws ConfigError unless the lists are disjoint, duplicate-free and
  /// have at least one content item and one project.
  void validate() const;
  bool operator==(const CourseSchema&) const = default;
};

nlohmann::json schema_to_json(const CourseSchema& schema);
CourseSchema schema_from_json(const nlohmann::json& j);

struct Dataset {
  std::string course_id;
  CourseSchema schema;
  std::vector<StudentRecord> students;
};

/// Raised when events reference ids the schema does not know (or use a kind
/// that does not fit the item's category).
class SchemaMismatchError : public DataError {
 public:
  SchemaMismatchError(const std::string& what, std::vector<std::string> ids)
      : DataError(what), ids_(std::move(ids)) {}
  const std::vector<std::string>& ids() const noexcept { return ids_; }

 private:
  std::vector<std::string> ids_;
};

/// Reads the line-delimited JSON event log. Events earlier than the
/// student's enrollment are dropped; events up to one second out of order
/// are re-sorted, anything worse is rejected.
Dataset parse_event_log(std::istream& in, const CourseSchema& schema,
                        std::string course_id = {});
void write_event_log(std::ostream& out, const Dataset& dataset);

nlohmann::json record_to_json(const StudentRecord& record);

/// Keeps events with ts < enrolled_at + 7*week days.
StudentRecord truncate_to_week(const StudentRecord& record, int week);
Dataset truncate_to_week(const Dataset& dataset, int week);

}  // namespace gritnet
