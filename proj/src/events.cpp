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

#include "gritnet/events.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <istream>
#include <ostream>
#include <set>
#include <unordered_map>
#include <unordered_set>

namespace gritnet {
namespace {

using nlohmann::json;

int parse_digits(std::string_view s, std::size_t pos, std::size_t count,
                 std::string_view whole) {
  if (pos + count > s.size()) {
    throw DataError("truncated timestamp '" + std::string(whole) + "'");
  }
  int value = 0;
  for (std::size_t i = pos; i < pos + count; ++i) {
    if (s[i] < '0' || s[i] > '9') {
      throw DataError("bad timestamp '" + std::string(whole) + "'");
    }
    value = value * 10 + (s[i] - '0');
  }
  return value;
}

void expect_char(std::string_view s, std::size_t pos, char c,
                 std::string_view whole) {
  if (pos >= s.size() || (s[pos] != c && !(c == 'T' && s[pos] == 't'))) {
    throw DataError("bad timestamp '" + std::string(whole) + "'");
  }
}

}  // namespace

Timestamp parse_rfc3339(std::string_view text) {
  using namespace std::chrono;
  const int y = parse_digits(text, 0, 4, text);
  expect_char(text, 4, '-', text);
  const int mo = parse_digits(text, 5, 2, text);
  expect_char(text, 7, '-', text);
  const int d = parse_digits(text, 8, 2, text);
  expect_char(text, 10, 'T', text);
  const int hh = parse_digits(text, 11, 2, text);
  expect_char(text, 13, ':', text);
  const int mm = parse_digits(text, 14, 2, text);
  expect_char(text, 16, ':', text);
  const int ss = parse_digits(text, 17, 2, text);
  std::size_t pos = 19;
  if (pos < text.size() && text[pos] == '.') {
    ++pos;
    const std::size_t start = pos;
    while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') ++pos;
    if (pos == start) throw DataError("bad timestamp '" + std::string(text) + "'");
  }
  std::int64_t offset = 0;
  if (pos < text.size() && (text[pos] == 'Z' || text[pos] == 'z')) {
    ++pos;
  } else if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
    const int sign = text[pos] == '+' ? 1 : -1;
    const int oh = parse_digits(text, pos + 1, 2, text);
    expect_char(text, pos + 3, ':', text);
    const int om = parse_digits(text, pos + 4, 2, text);
    offset = sign * (oh * 3600 + om * 60);
    pos += 6;
  } else {
    throw DataError("timestamp without zone '" + std::string(text) + "'");
  }
  if (pos != text.size()) {
    throw DataError("trailing characters in timestamp '" + std::string(text) + "'");
  }
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)},
                           day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || hh > 23 || mm > 59 || ss > 60) {
    throw DataError("out-of-range timestamp '" + std::string(text) + "'");
  }
  const std::int64_t days = sys_days{ymd}.time_since_epoch().count();
  const std::int64_t secs =
      days * kSecondsPerDay + hh * 3600 + mm * 60 + ss - offset;
  if (secs < 0) {
    throw DataError("timestamp before the epoch '" + std::string(text) + "'");
  }
  return Timestamp{secs};
}

std::string format_rfc3339(Timestamp ts) {
  using namespace std::chrono;
  std::int64_t days = ts.seconds / kSecondsPerDay;
  std::int64_t rem = ts.seconds % kSecondsPerDay;
  if (rem < 0) {
    rem += kSecondsPerDay;
    --days;
  }
  const year_month_day ymd{sys_days{std::chrono::days{days}}};
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02d:%02d:%02dZ",
                static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day()), static_cast<int>(rem / 3600),
                static_cast<int>(rem / 60 % 60), static_cast<int>(rem % 60));
  return buf;
}

std::string_view to_string(EventKind kind) noexcept {
  switch (kind) {
    case EventKind::kContent: return "content";
    case EventKind::kQuizCorrect: return "quiz_correct";
    case EventKind::kQuizIncorrect: return "quiz_incorrect";
    case EventKind::kProjectPassed: return "project_passed";
    case EventKind::kProjectFailed: return "project_failed";
  }
  return "?";
}

EventKind parse_event_kind(std::string_view name) {
  if (name == "content") return EventKind::kContent;
  if (name == "quiz_correct") return EventKind::kQuizCorrect;
  if (name == "quiz_incorrect") return EventKind::kQuizIncorrect;
  if (name == "project_passed") return EventKind::kProjectPassed;
  if (name == "project_failed") return EventKind::kProjectFailed;
  throw DataError("unknown event kind '" + std::string(name) + "'");
}

void CourseSchema::validate() const {
  if (content_ids.empty()) throw ConfigError("schema needs at least one content id");
  if (project_ids.empty()) throw ConfigError("schema needs at least one project id");
  std::unordered_set<std::string> seen;
  for (const auto* list : {&content_ids, &quiz_ids, &project_ids}) {
    for (const auto& id : *list) {
      if (!seen.insert(id).second) {
        throw ConfigError("schema id '" + id + "' appears more than once");
      }
    }
  }
}

json schema_to_json(const CourseSchema& schema) {
  return json{{"content_ids", schema.content_ids},
              {"quiz_ids", schema.quiz_ids},
              {"project_ids", schema.project_ids}};
}

CourseSchema schema_from_json(const json& j) {
  CourseSchema schema;
  try {
    schema.content_ids = j.at("content_ids").get<std::vector<std::string>>();
    schema.quiz_ids = j.at("quiz_ids").get<std::vector<std::string>>();
    schema.project_ids = j.at("project_ids").get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed schema: ") + e.what());
  }
  schema.validate();
  return schema;
}

Dataset parse_event_log(std::istream& in, const CourseSchema& schema,
                        std::string course_id) {
  schema.validate();
  std::unordered_map<std::string, ItemCategory> category;
  for (const auto& id : schema.content_ids) category.emplace(id, ItemCategory::kContent);
  for (const auto& id : schema.quiz_ids) category.emplace(id, ItemCategory::kQuiz);
  for (const auto& id : schema.project_ids) category.emplace(id, ItemCategory::kProject);

  Dataset dataset;
  dataset.course_id = std::move(course_id);
  dataset.schema = schema;
  std::set<std::string> unknown;
  std::unordered_set<std::string> student_ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = "line " + std::to_string(line_no) + ": ";
    StudentRecord record;
    try {
      const json j = json::parse(line);
      record.student_id = j.at("student_id").get<std::string>();
      record.enrolled_at = parse_rfc3339(j.at("enrolled_at").get<std::string>());
      record.graduated = j.at("graduated").get<bool>();
      const auto& events = j.at("events");
      if (!events.is_array()) throw DataError("'events' is not an array");
      record.events.reserve(events.size());
      for (const auto& e : events) {
        RawEvent ev;
        ev.raw_id = e.at("id").get<std::string>();
        ev.kind = parse_event_kind(e.at("kind").get<std::string>());
        ev.ts = parse_rfc3339(e.at("ts").get<std::string>());
        record.events.push_back(std::move(ev));
      }
    } catch (const json::exception& e) {
      throw DataError(where + "malformed record: " + e.what());
    } catch (const DataError& e) {
      throw DataError(where + e.what());
    }

    if (!student_ids.insert(record.student_id).second) {
      throw DataError(where + "duplicate student_id '" + record.student_id + "'");
    }
    Timestamp latest{INT64_MIN};
    for (const auto& ev : record.events) {
      if (ev.ts.seconds + 1 < latest.seconds) {
        throw DataError(where + "events of '" + record.student_id +
                        "' out of order at " + format_rfc3339(ev.ts));
      }
      latest = std::max(latest, ev.ts);
      auto it = category.find(ev.raw_id);
      bool ok = it != category.end();
      if (ok) {
        switch (it->second) {
          case ItemCategory::kContent:
            ok = ev.kind == EventKind::kContent;
            break;
          case ItemCategory::kQuiz:
            ok = ev.kind == EventKind::kQuizCorrect ||
                 ev.kind == EventKind::kQuizIncorrect;
            break;
          case ItemCategory::kProject:
            ok = ev.kind == EventKind::kProjectPassed ||
                 ev.kind == EventKind::kProjectFailed;
            break;
        }
      }
      if (!ok) unknown.insert(ev.raw_id);
    }
    std::stable_sort(record.events.begin(), record.events.end(),
                     [](const RawEvent& a, const RawEvent& b) { return a.ts < b.ts; });
    std::erase_if(record.events,
                  [&](const RawEvent& ev) { return ev.ts < record.enrolled_at; });
    dataset.students.push_back(std::move(record));
  }
  if (!unknown.empty()) {
    std::string msg = "event ids not in schema (or wrong kind for their category):";
    for (const auto& id : unknown) msg += " " + id;
    throw SchemaMismatchError(msg, {unknown.begin(), unknown.end()});
  }
  return dataset;
}

json record_to_json(const StudentRecord& record) {
  json events = json::array();
  for (const auto& ev : record.events) {
    events.push_back(json{{"id", ev.raw_id},
                          {"kind", std::string(to_string(ev.kind))},
                          {"ts", format_rfc3339(ev.ts)}});
  }
  return json{{"student_id", record.student_id},
              {"enrolled_at", format_rfc3339(record.enrolled_at)},
              {"graduated", record.graduated},
              {"events", std::move(events)}};
}

void write_event_log(std::ostream& out, const Dataset& dataset) {
  for (const auto& record : dataset.students) {
    out << record_to_json(record).dump() << '\n';
  }
}

StudentRecord truncate_to_week(const StudentRecord& record, int week) {
  if (week < 1) throw ArgumentError("week must be >= 1, got " + std::to_string(week));
  const std::int64_t cutoff =
      record.enrolled_at.seconds + std::int64_t{7} * week * kSecondsPerDay;
  StudentRecord out;
  out.student_id = record.student_id;
  out.enrolled_at = record.enrolled_at;
  out.graduated = record.graduated;
  for (const auto& ev : record.events) {
    if (ev.ts.seconds < cutoff) out.events.push_back(ev);
  }
  return out;
}

Dataset truncate_to_week(const Dataset& dataset, int week) {
  Dataset out;
  out.course_id = dataset.course_id;
  out.schema = dataset.schema;
  out.students.reserve(dataset.students.size());
  for (const auto& r : dataset.students) out.students.push_back(truncate_to_week(r, week));
  return out;
}

}  // namespace gritnet
