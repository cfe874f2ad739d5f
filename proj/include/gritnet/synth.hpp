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

// Seeded synthetic courses with a shared ability-driven behaviour model.
//
// Each student has a latent ability a in (0, 1). Ability sets study pace,
// items covered per session, quiz correctness and project pass rates, and
// lowers a per-week disengagement hazard. A disengaged student studies
// rarely and briefly and usually quits, occasionally recovering. Students
// walk the curriculum in order; a student graduates iff every project is
// passed before the term ends, so the label is a function of the generated
// events.
//
// Two course-level knobs are calibrated on a pilot cohort before
// generation: the hazard scale (to hit the target graduation rate) and the
// content revisit rate (to hit the target mean sequence length).

#include <cstdint>
#include <string>
#include <utility>

#include "gritnet/events.hpp"
#include "json.hpp"

namespace gritnet {

struct CourseProfile {
  std::string course_id = "course";
  /// Prefix for generated raw ids ("<prefix>c0001", "<prefix>q0001", ...).
  std::string id_prefix = "";
  std::size_t contents = 471;  // i
  std::size_t quizzes = 168;   // j
  std::size_t projects = 4;    // k
  std::size_t n_students = 1000;
  double graduation_rate = 0.214;
  /// Target mean events per student over the whole term; 0 disables the
  /// revisit calibration (revisit rate 0.25).
  double mean_sequence_length = 421.0;
  double gap_mean_days = 1.5;  // mean days between study sessions
  double gap_cv = 0.6;
  int term_weeks = 16;
  /// Fraction of content items the students visit out of curriculum order.
  double reorder_fraction = 0.0;
  /// Revisits scale with exp(revisit_struggle * (0.5 - ability)); positive
  /// values make weaker students re-view more content.
  double revisit_struggle = 0.0;
  std::string enrolled_from = "2015-02-03T00:00:00Z";
  int enrollment_window_days = 90;

  /// Throws ConfigError on out-of-range fields.
  void validate() const;
};

/// Table 1 rows as profiles, optionally at a fraction of the population.
CourseProfile profile_nd_a_v1(double population_scale = 1.0);
CourseProfile profile_nd_a_v2(double population_scale = 1.0);
CourseProfile profile_nd_b(double population_scale = 1.0);
CourseProfile profile_nd_c(double population_scale = 1.0);
CourseProfile profile_nd_d(double population_scale = 1.0);

struct ShiftSpec {
  long contents_delta = 0;
  long quizzes_delta = 0;
  long projects_delta = 0;
  double pacing_scale = 1.0;  // multiplies gap_mean_days
  double graduation_rate_delta = 0.0;
  double mean_length_scale = 1.0;
  double reorder_fraction = 0.0;
  double revisit_struggle_delta = 0.0;
  std::size_t n_students = 0;  // 0 keeps the base count
};

/// Throws ConfigError if the result is not a valid profile.
CourseProfile apply_shift(const CourseProfile& base, const ShiftSpec& shift);

/// Hazard scale and revisit rate found by calibration.
struct CalibratedKnobs {
  double hazard_scale = 0.0;
  double revisit_rate = 0.25;
};

/// Throws ConfigError when the targets are unreachable (e.g. a graduation
/// rate above what the pace allows with zero dropout hazard).
CalibratedKnobs calibrate(const CourseProfile& profile, std::uint64_t seed);

CourseSchema make_schema(const CourseProfile& profile);

Dataset generate_course(const CourseProfile& profile, std::uint64_t seed);
/// Same as generate_course with fixed knobs (no calibration).
Dataset generate_course(const CourseProfile& profile, const CalibratedKnobs& knobs,
                        std::uint64_t seed);

/// Source drawn from `base`, target from apply_shift(base, shift); the two
/// use different sub-seeds and the target gets a distinct id prefix.
std::pair<Dataset, Dataset> generate_shift_pair(const CourseProfile& base, const ShiftSpec& shift,
                                                std::uint64_t seed);

/// Recomputes the graduation label from events: every project passed
/// before enrolled_at + term_weeks.
bool label_from_events(const StudentRecord& record, const CourseSchema& schema, int term_weeks);

nlohmann::json profile_to_json(const CourseProfile& profile);
CourseProfile profile_from_json(const nlohmann::json& j);
nlohmann::json shift_to_json(const ShiftSpec& shift);
ShiftSpec shift_from_json(const nlohmann::json& j);

}  // namespace gritnet
