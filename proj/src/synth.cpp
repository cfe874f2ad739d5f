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

#include "gritnet/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <unordered_set>
#include <type_traits>

#include "gritnet/common.hpp"
#include "gritnet/error.hpp"

namespace gritnet {
namespace {

constexpr int kPilotStudents = 1500;
constexpr double kRateTolerance = 0.005;
constexpr double kLengthTolerance = 2.0;
constexpr double kDefaultRevisitRate = 0.25;
constexpr int kMaxQuizAttempts = 3;

struct Item {
  ItemCategory category;
  std::uint32_t pos;
};

// Compact event; converted to RawEvent only for the final dataset.
struct SimEvent {
  EventKind kind;
  std::uint32_t pos;
  std::int64_t ts;
};

struct Course {
  CourseSchema schema;
  std::vector<Item> order;  // traversal order
  std::int64_t enrolled_from = 0;
};

std::string make_id(const std::string& prefix, char tag, std::size_t n) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%c%04zu", tag, n + 1);
  return prefix + buf;
}

// Each of the k segments is a run of contents with its quizzes spread
// evenly among them, closed by one project.
std::vector<Item> curriculum(const CourseProfile& p) {
  std::vector<Item> items;
  items.reserve(p.contents + p.quizzes + p.projects);
  const std::size_t k = p.projects;
  for (std::size_t s = 0; s < k; ++s) {
    std::size_t c0 = s * p.contents / k, c1 = (s + 1) * p.contents / k;
    std::size_t q0 = s * p.quizzes / k, q1 = (s + 1) * p.quizzes / k;
    std::size_t nc = c1 - c0, nq = q1 - q0;
    std::size_t q = 0;
    for (std::size_t c = 0; c < nc; ++c) {
      items.push_back({ItemCategory::kContent, static_cast<std::uint32_t>(c0 + c)});
      while (q < nq && (q + 1) * nc <= (c + 1) * nq) {
        items.push_back({ItemCategory::kQuiz, static_cast<std::uint32_t>(q0 + q)});
        ++q;
      }
    }
    for (; q < nq; ++q) items.push_back({ItemCategory::kQuiz, static_cast<std::uint32_t>(q0 + q)});
    items.push_back({ItemCategory::kProject, static_cast<std::uint32_t>(s)});
  }
  return items;
}

Course build_course(const CourseProfile& p, std::uint64_t seed) {
  Course course;
  course.schema = make_schema(p);
  course.order = curriculum(p);
  course.enrolled_from = parse_rfc3339(p.enrolled_from).seconds;
  if (p.reorder_fraction > 0.0) {
    Rng rng(mix_seed(seed, 0x5eedc0de));
    auto& order = course.order;
    for (std::size_t a = 0; a < order.size(); ++a) {
      if (order[a].category != ItemCategory::kContent || !rng.bernoulli(p.reorder_fraction)) {
        continue;
      }
      std::size_t b = a + 1 + static_cast<std::size_t>(rng.below(8));
      while (b < order.size() && order[b].category != ItemCategory::kContent) ++b;
      if (b < order.size()) std::swap(order[a], order[b]);
    }
  }
  return course;
}

struct Trajectory {
  std::int64_t enrolled_at = 0;
  std::vector<SimEvent> events;
  bool graduated = false;
};

Trajectory simulate(const Course& course, const CourseProfile& p, const CalibratedKnobs& knobs,
                    std::uint64_t student_seed) {
  Rng rng(student_seed);
  // Revisits draw from their own stream so the main trajectory does not
  // depend on the revisit rate.
  Rng rev(mix_seed(student_seed, 1));

  Trajectory out;
  const std::int64_t window = std::int64_t{p.enrollment_window_days} * kSecondsPerDay;
  out.enrolled_at = course.enrolled_from + static_cast<std::int64_t>(rng.below(window));
  const std::int64_t term_end = out.enrolled_at + std::int64_t{p.term_weeks} * 7 * kSecondsPerDay;

  const double ability = 1.0 / (1.0 + std::exp(-1.3 * rng.normal()));
  const double gap_mean =
      p.gap_mean_days * rng.lognormal_with_mean(1.0, p.gap_cv) * (1.6 - ability);
  const double items_mean = 4.0 + 14.0 * ability;
  const double quiz_p = 0.35 + 0.6 * ability;
  const double project_p = 0.3 + 0.65 * ability;
  const double frailty = (1.0 - ability) * (1.0 - ability) + 0.1;
  const double revisit_mean =
      knobs.revisit_rate * std::exp(p.revisit_struggle * (0.5 - ability));
  const double revisit_continue = revisit_mean / (1.0 + revisit_mean);

  std::int64_t t = out.enrolled_at +
                   static_cast<std::int64_t>(rng.lognormal_with_mean(0.5, 1.0) * kSecondsPerDay);
  std::size_t cursor = 0;
  std::size_t projects_passed = 0;
  int failures = 0;
  int weeks_survived = 0;
  std::uint32_t last_content = 0;
  bool seen_content = false;
  bool stop = false;
  bool fading = false;

  auto emit = [&](EventKind kind, std::uint32_t pos, std::int64_t step) {
    if (t >= term_end) {
      stop = true;
      return false;
    }
    out.events.push_back({kind, pos, t});
    t += step;
    return true;
  };

  while (!stop && cursor < course.order.size()) {
    if (t >= term_end) break;
    const double session_mean = fading ? 0.4 * items_mean : items_mean;
    const long budget = std::max(1L, std::lround(rng.lognormal_with_mean(session_mean, 0.5)));
    bool awaiting_review = false;
    bool dropped = false;
    for (long done = 0; done < budget && cursor < course.order.size() && !stop; ++done) {
      const Item item = course.order[cursor];
      switch (item.category) {
        case ItemCategory::kContent: {
          if (!emit(EventKind::kContent, item.pos, 60 + static_cast<std::int64_t>(rng.below(840)))) {
            break;
          }
          last_content = seen_content ? std::max(last_content, item.pos) : item.pos;
          seen_content = true;
          while (rev.bernoulli(revisit_continue)) {
            std::uint32_t lo = last_content > 20 ? last_content - 20 : 0;
            std::uint32_t back =
                lo + static_cast<std::uint32_t>(rev.below(last_content - lo + 1));
            if (!emit(EventKind::kContent, back, 30 + static_cast<std::int64_t>(rev.below(300)))) {
              break;
            }
          }
          ++cursor;
          break;
        }
        case ItemCategory::kQuiz: {
          for (int attempt = 0; attempt < kMaxQuizAttempts; ++attempt) {
            bool correct = rng.bernoulli(quiz_p);
            std::int64_t step = 30 + static_cast<std::int64_t>(rng.below(300));
            if (!emit(correct ? EventKind::kQuizCorrect : EventKind::kQuizIncorrect, item.pos,
                      step) ||
                correct) {
              break;
            }
          }
          ++cursor;
          break;
        }
        case ItemCategory::kProject: {
          bool pass = rng.bernoulli(project_p);
          if (!emit(pass ? EventKind::kProjectPassed : EventKind::kProjectFailed, item.pos, 600)) {
            break;
          }
          if (pass) {
            ++projects_passed;
            failures = 0;
            ++cursor;
          } else if (++failures >= 3 && rng.bernoulli(0.3)) {
            dropped = true;
          }
          awaiting_review = true;
          done = budget;  // a submission ends the session
          break;
        }
      }
    }
    if (stop || dropped || cursor >= course.order.size()) break;

    if (fading) {
      if (rng.bernoulli(0.5)) break;
      if (rng.bernoulli(0.1)) fading = false;
    }
    double gap_days = rng.lognormal_with_mean(fading ? 4.0 * gap_mean + 2.0 : gap_mean, 0.8);
    if (awaiting_review) gap_days = std::max(gap_days, rng.uniform(1.0, 3.0));
    t += static_cast<std::int64_t>(gap_days * kSecondsPerDay);

    const int week_now = static_cast<int>((t - out.enrolled_at) / (7 * kSecondsPerDay));
    while (weeks_survived < week_now) {
      ++weeks_survived;
      double h = knobs.hazard_scale * frailty * (1.0 + 2.0 * std::exp(-weeks_survived / 2.0));
      // Falling well behind the pace needed to finish raises the hazard.
      const double progress = static_cast<double>(cursor) / static_cast<double>(course.order.size());
      if (progress < 0.8 * weeks_survived / p.term_weeks) h *= 2.5;
      if (!fading && rng.bernoulli(std::min(0.95, h))) fading = true;
    }
  }
  out.graduated = projects_passed == course.schema.project_ids.size();
  return out;
}

StudentRecord to_record(const Trajectory& tr, const CourseSchema& schema, std::string student_id) {
  StudentRecord r;
  r.student_id = std::move(student_id);
  r.enrolled_at = Timestamp{tr.enrolled_at};
  r.graduated = tr.graduated;
  r.events.reserve(tr.events.size());
  for (const SimEvent& e : tr.events) {
    const std::vector<std::string>* ids = &schema.content_ids;
    if (e.kind == EventKind::kQuizCorrect || e.kind == EventKind::kQuizIncorrect) {
      ids = &schema.quiz_ids;
    } else if (e.kind == EventKind::kProjectPassed || e.kind == EventKind::kProjectFailed) {
      ids = &schema.project_ids;
    }
    r.events.push_back({(*ids)[e.pos], e.kind, Timestamp{e.ts}});
  }
  return r;
}

std::uint64_t student_seed(std::uint64_t seed, std::size_t index) {
  return mix_seed(seed, 0x100000000ULL + index);
}

struct PilotStats {
  double rate = 0.0;
  double mean_length = 0.0;
};

PilotStats pilot(const Course& course, const CourseProfile& p, const CalibratedKnobs& knobs,
                 std::uint64_t seed) {
  std::size_t grads = 0, events = 0;
  for (int s = 0; s < kPilotStudents; ++s) {
    Trajectory tr = simulate(course, p, knobs, mix_seed(seed, 0x9170700000ULL + s));
    grads += tr.graduated;
    events += tr.events.size();
  }
  return {static_cast<double>(grads) / kPilotStudents,
          static_cast<double>(events) / kPilotStudents};
}

std::string percent(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f%%", 100.0 * v);
  return buf;
}

}  // namespace

void CourseProfile::validate() const {
  if (contents < 1 || quizzes < 1 || projects < 1) {
    throw ConfigError("profile " + course_id + ": contents, quizzes and projects must be >= 1");
  }
  if (!(graduation_rate > 0.0 && graduation_rate < 1.0)) {
    throw ConfigError("profile " + course_id + ": graduation_rate must be in (0, 1)");
  }
  if (!(gap_mean_days > 0.0) || !(gap_cv > 0.0) || !std::isfinite(gap_mean_days) ||
      !std::isfinite(gap_cv)) {
    throw ConfigError("profile " + course_id + ": pacing parameters must be positive");
  }
  if (!(mean_sequence_length >= 0.0) || !std::isfinite(mean_sequence_length)) {
    throw ConfigError("profile " + course_id + ": mean_sequence_length must be >= 0");
  }
  if (term_weeks < 1) throw ConfigError("profile " + course_id + ": term_weeks must be >= 1");
  if (enrollment_window_days < 1) {
    throw ConfigError("profile " + course_id + ": enrollment_window_days must be >= 1");
  }
  if (!std::isfinite(revisit_struggle) || std::abs(revisit_struggle) > 10.0) {
    throw ConfigError("profile " + course_id + ": revisit_struggle must be in [-10, 10]");
  }
  if (!(reorder_fraction >= 0.0 && reorder_fraction <= 1.0)) {
    throw ConfigError("profile " + course_id + ": reorder_fraction must be in [0, 1]");
  }
  try {
    parse_rfc3339(enrolled_from);
  } catch (const DataError& e) {
    throw ConfigError("profile " + course_id + ": enrolled_from: " + e.what());
  }
}

namespace {

CourseProfile table_profile(const char* id, const char* prefix, const char* from,
                            std::size_t students, std::size_t i, std::size_t j, std::size_t k,
                            double length, double rate, double scale) {
  CourseProfile p;
  p.course_id = id;
  p.id_prefix = prefix;
  p.enrolled_from = from;
  p.n_students = static_cast<std::size_t>(std::lround(static_cast<double>(students) * scale));
  p.contents = i;
  p.quizzes = j;
  p.projects = k;
  p.mean_sequence_length = length;
  p.graduation_rate = rate;
  return p;
}

}  // namespace

CourseProfile profile_nd_a_v1(double s) {
  return table_profile("nd-a-v1", "A1-", "2015-02-03T00:00:00Z", 5626, 471, 168, 4, 421, 0.214, s);
}
CourseProfile profile_nd_a_v2(double s) {
  return table_profile("nd-a-v2", "A2-", "2015-04-01T00:00:00Z", 2230, 471, 168, 4, 881, 0.203, s);
}
CourseProfile profile_nd_b(double s) {
  return table_profile("nd-b", "B-", "2016-06-20T00:00:00Z", 13639, 514, 287, 10, 285, 0.160, s);
}
CourseProfile profile_nd_c(double s) {
  return table_profile("nd-c", "C-", "2017-03-22T00:00:00Z", 4377, 568, 84, 10, 675, 0.394, s);
}
CourseProfile profile_nd_d(double s) {
  return table_profile("nd-d", "D-", "2017-01-14T00:00:00Z", 4761, 346, 50, 5, 430, 0.462, s);
}

CourseProfile apply_shift(const CourseProfile& base, const ShiftSpec& shift) {
  auto resized = [](std::size_t n, long delta, const char* what) {
    long v = static_cast<long>(n) + delta;
    if (v < 1) throw ConfigError(std::string("shift leaves fewer than one ") + what);
    return static_cast<std::size_t>(v);
  };
  if (!(shift.pacing_scale > 0.0) || !(shift.mean_length_scale > 0.0)) {
    throw ConfigError("shift scales must be positive");
  }
  CourseProfile p = base;
  p.course_id = base.course_id + "-shifted";
  p.id_prefix = base.id_prefix + "T-";
  p.contents = resized(base.contents, shift.contents_delta, "content");
  p.quizzes = resized(base.quizzes, shift.quizzes_delta, "quiz");
  p.projects = resized(base.projects, shift.projects_delta, "project");
  p.gap_mean_days = base.gap_mean_days * shift.pacing_scale;
  p.graduation_rate = base.graduation_rate + shift.graduation_rate_delta;
  p.mean_sequence_length = base.mean_sequence_length * shift.mean_length_scale;
  p.reorder_fraction = std::clamp(base.reorder_fraction + shift.reorder_fraction, 0.0, 1.0);
  p.revisit_struggle = base.revisit_struggle + shift.revisit_struggle_delta;
  if (shift.n_students != 0) p.n_students = shift.n_students;
  p.validate();
  return p;
}

CourseSchema make_schema(const CourseProfile& p) {
  CourseSchema s;
  for (std::size_t n = 0; n < p.contents; ++n) s.content_ids.push_back(make_id(p.id_prefix, 'c', n));
  for (std::size_t n = 0; n < p.quizzes; ++n) s.quiz_ids.push_back(make_id(p.id_prefix, 'q', n));
  for (std::size_t n = 0; n < p.projects; ++n) s.project_ids.push_back(make_id(p.id_prefix, 'p', n));
  return s;
}

CalibratedKnobs calibrate(const CourseProfile& profile, std::uint64_t seed) {
  profile.validate();
  const Course course = build_course(profile, seed);
  const std::uint64_t pilot_seed = mix_seed(seed, 0xca1);
  CalibratedKnobs knobs;
  knobs.hazard_scale = 0.0;
  knobs.revisit_rate = 0.0;

  const double target = profile.graduation_rate;
  const double ceiling = pilot(course, profile, knobs, pilot_seed).rate;
  if (ceiling < target - kRateTolerance) {
    throw ConfigError("infeasible profile " + profile.course_id + ": graduation rate " +
                      percent(target) + " unreachable; at most " + percent(ceiling) +
                      " graduate with zero dropout hazard");
  }
  double lo = 0.0, hi = 1.0;
  for (knobs.hazard_scale = hi; pilot(course, profile, knobs, pilot_seed).rate > target;
       knobs.hazard_scale = hi) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1024.0) {
      throw ConfigError("infeasible profile " + profile.course_id + ": graduation rate " +
                        percent(target) + " not reachable by raising dropout hazard");
    }
  }
  for (int it = 0; it < 40; ++it) {
    knobs.hazard_scale = 0.5 * (lo + hi);
    double rate = pilot(course, profile, knobs, pilot_seed).rate;
    if (std::abs(rate - target) < 0.5 / kPilotStudents) break;
    (rate > target ? lo : hi) = knobs.hazard_scale;
  }

  if (profile.mean_sequence_length <= 0.0) {
    knobs.revisit_rate = kDefaultRevisitRate;
    return knobs;
  }
  const double want = profile.mean_sequence_length;
  double floor_len = pilot(course, profile, knobs, pilot_seed).mean_length;
  if (floor_len > want + kLengthTolerance) {
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "infeasible profile %s: mean sequence length %.0f below the %.0f events "
                  "produced without revisits",
                  profile.course_id.c_str(), want, floor_len);
    throw ConfigError(buf);
  }
  double rlo = 0.0, rhi = 1.0;
  for (knobs.revisit_rate = rhi; pilot(course, profile, knobs, pilot_seed).mean_length < want;
       knobs.revisit_rate = rhi) {
    rlo = rhi;
    rhi *= 2.0;
    if (rhi > 256.0) {
      throw ConfigError("infeasible profile " + profile.course_id +
                        ": mean sequence length unreachable");
    }
  }
  for (int it = 0; it < 30; ++it) {
    knobs.revisit_rate = 0.5 * (rlo + rhi);
    double len = pilot(course, profile, knobs, pilot_seed).mean_length;
    if (std::abs(len - want) < 0.5) break;
    (len < want ? rlo : rhi) = knobs.revisit_rate;
  }
  return knobs;
}

Dataset generate_course(const CourseProfile& profile, std::uint64_t seed) {
  profile.validate();
  if (profile.n_students == 0) {
    Dataset d;
    d.course_id = profile.course_id;
    d.schema = make_schema(profile);
    return d;
  }
  return generate_course(profile, calibrate(profile, seed), seed);
}

Dataset generate_course(const CourseProfile& profile, const CalibratedKnobs& knobs,
                        std::uint64_t seed) {
  profile.validate();
  const Course course = build_course(profile, seed);
  Dataset d;
  d.course_id = profile.course_id;
  d.schema = course.schema;
  d.students.reserve(profile.n_students);
  char buf[32];
  for (std::size_t n = 0; n < profile.n_students; ++n) {
    Trajectory tr = simulate(course, profile, knobs, student_seed(seed, n));
    std::snprintf(buf, sizeof buf, "s%06zu", n + 1);
    d.students.push_back(to_record(tr, course.schema, profile.id_prefix + buf));
  }
  return d;
}

std::pair<Dataset, Dataset> generate_shift_pair(const CourseProfile& base, const ShiftSpec& shift,
                                                std::uint64_t seed) {
  CourseProfile target = apply_shift(base, shift);
  return {generate_course(base, mix_seed(seed, 1)), generate_course(target, mix_seed(seed, 2))};
}

bool label_from_events(const StudentRecord& record, const CourseSchema& schema, int term_weeks) {
  const std::int64_t end = record.enrolled_at.seconds + std::int64_t{term_weeks} * 7 * kSecondsPerDay;
  std::unordered_set<std::string_view> passed;
  for (const RawEvent& e : record.events) {
    if (e.kind == EventKind::kProjectPassed && e.ts.seconds < end) passed.insert(e.raw_id);
  }
  for (const std::string& id : schema.project_ids) {
    if (!passed.contains(id)) return false;
  }
  return true;
}

nlohmann::json profile_to_json(const CourseProfile& p) {
  return {{"course_id", p.course_id},
          {"id_prefix", p.id_prefix},
          {"contents", p.contents},
          {"quizzes", p.quizzes},
          {"projects", p.projects},
          {"n_students", p.n_students},
          {"graduation_rate", p.graduation_rate},
          {"mean_sequence_length", p.mean_sequence_length},
          {"gap_mean_days", p.gap_mean_days},
          {"gap_cv", p.gap_cv},
          {"term_weeks", p.term_weeks},
          {"reorder_fraction", p.reorder_fraction},
          {"revisit_struggle", p.revisit_struggle},
          {"enrolled_from", p.enrolled_from},
          {"enrollment_window_days", p.enrollment_window_days}};
}

namespace {

template <typename T>
void read_opt(const nlohmann::json& j, const char* key, T& out, const char* what) {
  auto it = j.find(key);
  if (it == j.end()) return;
  if constexpr (std::is_unsigned_v<T> && !std::is_same_v<T, bool>) {
    // get<unsigned>() would wrap a negative number around
    if (!it->is_number_unsigned()) {
      throw ConfigError(std::string(what) + ": field '" + key + "' must be a non-negative integer");
    }
  }
  try {
    out = it->get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(std::string(what) + ": field '" + key + "' has the wrong type");
  }
}

const std::vector<std::string> kProfileKeys = {
    "preset",          "population_scale",     "course_id",    "id_prefix",
    "contents",        "quizzes",              "projects",     "n_students",
    "graduation_rate", "mean_sequence_length", "gap_mean_days", "gap_cv",
    "term_weeks",      "reorder_fraction",     "enrolled_from", "enrollment_window_days",
    "revisit_struggle"};

const std::vector<std::string> kShiftKeys = {
    "contents_delta",        "quizzes_delta",     "projects_delta",   "pacing_scale",
    "graduation_rate_delta", "mean_length_scale", "reorder_fraction", "n_students",
    "revisit_struggle_delta"};

void reject_unknown(const nlohmann::json& j, const std::vector<std::string>& keys,
                    const char* what) {
  if (!j.is_object()) throw ConfigError(std::string(what) + " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      throw ConfigError(std::string(what) + ": unknown field '" + key + "'");
    }
  }
}

}  // namespace

CourseProfile profile_from_json(const nlohmann::json& j) {
  reject_unknown(j, kProfileKeys, "profile");
  double scale = 1.0;
  read_opt(j, "population_scale", scale, "profile");
  if (!(scale >= 0.0)) throw ConfigError("profile: population_scale must be >= 0");
  CourseProfile p;
  if (auto it = j.find("preset"); it != j.end()) {
    std::string name = it->is_string() ? it->get<std::string>() : "";
    if (name == "nd-a-v1") p = profile_nd_a_v1(scale);
    else if (name == "nd-a-v2") p = profile_nd_a_v2(scale);
    else if (name == "nd-b") p = profile_nd_b(scale);
    else if (name == "nd-c") p = profile_nd_c(scale);
    else if (name == "nd-d") p = profile_nd_d(scale);
    else throw ConfigError("profile: unknown preset '" + name + "'");
  }
  read_opt(j, "course_id", p.course_id, "profile");
  read_opt(j, "id_prefix", p.id_prefix, "profile");
  read_opt(j, "contents", p.contents, "profile");
  read_opt(j, "quizzes", p.quizzes, "profile");
  read_opt(j, "projects", p.projects, "profile");
  read_opt(j, "n_students", p.n_students, "profile");
  read_opt(j, "graduation_rate", p.graduation_rate, "profile");
  read_opt(j, "mean_sequence_length", p.mean_sequence_length, "profile");
  read_opt(j, "gap_mean_days", p.gap_mean_days, "profile");
  read_opt(j, "gap_cv", p.gap_cv, "profile");
  read_opt(j, "term_weeks", p.term_weeks, "profile");
  read_opt(j, "reorder_fraction", p.reorder_fraction, "profile");
  read_opt(j, "revisit_struggle", p.revisit_struggle, "profile");
  read_opt(j, "enrolled_from", p.enrolled_from, "profile");
  read_opt(j, "enrollment_window_days", p.enrollment_window_days, "profile");
  p.validate();
  return p;
}

nlohmann::json shift_to_json(const ShiftSpec& s) {
  return {{"contents_delta", s.contents_delta},
          {"quizzes_delta", s.quizzes_delta},
          {"projects_delta", s.projects_delta},
          {"pacing_scale", s.pacing_scale},
          {"graduation_rate_delta", s.graduation_rate_delta},
          {"mean_length_scale", s.mean_length_scale},
          {"reorder_fraction", s.reorder_fraction},
          {"revisit_struggle_delta", s.revisit_struggle_delta},
          {"n_students", s.n_students}};
}

ShiftSpec shift_from_json(const nlohmann::json& j) {
  reject_unknown(j, kShiftKeys, "shift");
  ShiftSpec s;
  read_opt(j, "contents_delta", s.contents_delta, "shift");
  read_opt(j, "quizzes_delta", s.quizzes_delta, "shift");
  read_opt(j, "projects_delta", s.projects_delta, "shift");
  read_opt(j, "pacing_scale", s.pacing_scale, "shift");
  read_opt(j, "graduation_rate_delta", s.graduation_rate_delta, "shift");
  read_opt(j, "mean_length_scale", s.mean_length_scale, "shift");
  read_opt(j, "reorder_fraction", s.reorder_fraction, "shift");
  read_opt(j, "n_students", s.n_students, "shift");
  read_opt(j, "revisit_struggle_delta", s.revisit_struggle_delta, "shift");
  return s;
}

}  // namespace gritnet
