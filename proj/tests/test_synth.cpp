#include <sstream>

#include "doctest.h"
#include "gritnet/encoding.hpp"
#include "gritnet/error.hpp"
#include "gritnet/synth.hpp"
#include "test_util.hpp"

using namespace gritnet;

namespace {

std::string serialize(const Dataset& d) {
  std::ostringstream out;
  write_event_log(out, d);
  return schema_to_json(d.schema).dump() + "\n" + out.str();
}

double graduation_rate(const Dataset& d) {
  double g = 0;
  for (const auto& s : d.students) g += s.graduated;
  return g / static_cast<double>(d.students.size());
}

double mean_length(const Dataset& d) {
  double n = 0;
  for (const auto& s : d.students) n += static_cast<double>(s.events.size());
  return n / static_cast<double>(d.students.size());
}

}  // namespace

TEST_SUITE("synth") {

TEST_CASE("nd-a v1 profile hits its graduation rate and length") {
  const auto d = generate_course(profile_nd_a_v1(0.25), 11);
  REQUIRE(d.students.size() == 1407);
  CHECK(graduation_rate(d) >= 0.164);
  CHECK(graduation_rate(d) <= 0.264);
  CHECK(mean_length(d) >= 321.0);
  CHECK(mean_length(d) <= 521.0);
}

TEST_CASE("generation is deterministic and well formed") {
  auto p = profile_nd_d(0.05);
  const auto a = generate_course(p, 3), b = generate_course(p, 3), c = generate_course(p, 4);
  CHECK(serialize(a) == serialize(b));
  CHECK(serialize(a) != serialize(c));
  a.schema.validate();
  const auto map = build_ordinal_map(a.schema);
  CHECK(map.counts() == ItemCounts{346, 50, 5});
  for (const auto& s : a.students) {
    CAPTURE(s.student_id);
    CHECK(label_from_events(s, a.schema, p.term_weeks) == s.graduated);
    for (std::size_t k = 0; k < s.events.size(); ++k) {
      CHECK(s.events[k].ts >= s.enrolled_at);
      if (k) CHECK(s.events[k].ts >= s.events[k - 1].ts);
    }
  }
  // Round trip through the event log.
  std::ostringstream out;
  write_event_log(out, a);
  std::istringstream in(out.str());
  const auto back = parse_event_log(in, a.schema);
  REQUIRE(back.students.size() == a.students.size());
  for (std::size_t k = 0; k < a.students.size(); ++k) CHECK(back.students[k] == a.students[k]);
}

TEST_CASE("empty cohort") {
  auto p = profile_nd_d(0.05);
  p.n_students = 0;
  CHECK(generate_course(p, CalibratedKnobs{}, 1).students.empty());
}

TEST_CASE("shift pair") {
  const auto base = profile_nd_d(0.1);
  SUBCASE("identity shift keeps the profile") {
    auto shifted = profile_to_json(apply_shift(base, ShiftSpec{}));
    auto original = profile_to_json(base);
    // The target is renamed so its raw ids never collide with the source's.
    for (const char* key : {"course_id", "id_prefix"}) {
      CHECK(shifted[key] != original[key]);
      shifted.erase(key);
      original.erase(key);
    }
    CHECK(shifted == original);
    const auto [s, t] = generate_shift_pair(base, ShiftSpec{}, 5);
    CHECK(s.schema.content_ids.size() == t.schema.content_ids.size());
    CHECK(s.students.size() == t.students.size());
  }
  SUBCASE("resize grows L by the delta") {
    ShiftSpec sh;
    sh.contents_delta = 50;
    sh.n_students = 50;
    const auto [s, t] = generate_shift_pair(base, sh, 6);
    CHECK(build_ordinal_map(t.schema).num_actions() == build_ordinal_map(s.schema).num_actions() + 50);
  }
  SUBCASE("slower pacing halves weekly activity") {
    // A low graduation rate stays reachable at half the pace.
    ShiftSpec sh;
    sh.pacing_scale = 2.0;
    const auto [s, t] = generate_shift_pair(profile_nd_a_v1(0.05), sh, 7);
    for (int week : {1, 2}) {
      CAPTURE(week);
      const double ratio = mean_length(truncate_to_week(t, week)) / mean_length(truncate_to_week(s, week));
      CHECK(ratio >= 0.4);
      CHECK(ratio <= 0.6);
    }
  }
  SUBCASE("invalid shift") {
    ShiftSpec sh;
    sh.projects_delta = -100;
    CHECK_THROWS_AS(apply_shift(base, sh), ConfigError);
    sh = ShiftSpec{};
    sh.pacing_scale = 0.0;
    CHECK_THROWS_AS(apply_shift(base, sh), ConfigError);
  }
}

TEST_CASE("profile and shift json round trip") {
  auto p = profile_nd_b(0.3);
  p.reorder_fraction = 0.05;
  CHECK(profile_to_json(profile_from_json(profile_to_json(p))) == profile_to_json(p));
  ShiftSpec sh;
  sh.quizzes_delta = -3;
  sh.revisit_struggle_delta = 2.5;
  CHECK(shift_to_json(shift_from_json(shift_to_json(sh))) == shift_to_json(sh));
  CHECK_THROWS_AS(profile_from_json({{"contents", -4}}), ConfigError);
}

}  // TEST_SUITE
