#include <algorithm>
#include <map>
#include <numeric>
#include <random>

#include "doctest.h"
#include "gritnet/encoding.hpp"
#include "gritnet/error.hpp"
#include "test_util.hpp"

using namespace gritnet;
using testutil::ts;

TEST_SUITE("encoding") {

TEST_CASE("vocabulary size for the four course rows") {
  CHECK(build_ordinal_map(testutil::small_schema(471, 168, 4)).num_actions() == 815);
  CHECK(build_ordinal_map(testutil::small_schema(514, 287, 10)).num_actions() == 1108);
  CHECK(build_ordinal_map(testutil::small_schema(568, 84, 10)).num_actions() == 756);
  CHECK(build_ordinal_map(testutil::small_schema(346, 50, 5)).num_actions() == 456);
}

TEST_CASE("smallest schema layout") {
  const auto m = build_ordinal_map(testutil::small_schema(1, 0, 1));
  CHECK(m.num_actions() == 3);
  CHECK(m.find("c0", EventKind::kContent) == 0);
  CHECK(m.find("p0", EventKind::kProjectPassed) == 1);
  CHECK(m.find("p0", EventKind::kProjectFailed) == 2);
  CHECK_FALSE(m.find("p0", EventKind::kContent).has_value());
  CHECK(m.vocab_size() == 3 + 28 + 1);
}

TEST_CASE("random schemas: bijection onto [0, L) with the category layout") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t i = 1 + rng() % 40, j = rng() % 20, k = 1 + rng() % 8;
    const auto schema = testutil::small_schema(i, j, k);
    const auto m = build_ordinal_map(schema);
    std::size_t independent = schema.content_ids.size() + 2 * schema.quiz_ids.size() +
                              2 * schema.project_ids.size();
    REQUIRE(m.num_actions() == independent);
    std::vector<int> seen(independent, 0);
    for (std::size_t n = 0; n < i; ++n) {
      const int a = *m.find(schema.content_ids[n], EventKind::kContent);
      CHECK(a == static_cast<int>(n));
      ++seen[a];
    }
    for (std::size_t n = 0; n < j; ++n) {
      const int c = *m.find(schema.quiz_ids[n], EventKind::kQuizCorrect);
      const int x = *m.find(schema.quiz_ids[n], EventKind::kQuizIncorrect);
      CHECK(c == static_cast<int>(i + 2 * n));
      CHECK(x == c + 1);
      ++seen[c];
      ++seen[x];
    }
    for (std::size_t n = 0; n < k; ++n) {
      const int p = *m.find(schema.project_ids[n], EventKind::kProjectPassed);
      const int f = *m.find(schema.project_ids[n], EventKind::kProjectFailed);
      CHECK(p == static_cast<int>(i + 2 * j + 2 * n));
      CHECK(f == p + 1);
      ++seen[p];
      ++seen[f];
    }
    CHECK(std::all_of(seen.begin(), seen.end(), [](int s) { return s == 1; }));
    CHECK(build_ordinal_map(schema) == m);
    CHECK(OrdinalMap::from_json(m.to_json()) == m);
  }
}

TEST_CASE("ordinal map JSON carries the documented fields") {
  const auto j = build_ordinal_map(testutil::small_schema(2, 1, 1)).to_json();
  CHECK(j.at("layout_version") == 1);
  CHECK(j.at("L") == 6);
  CHECK(j.at("d_cap") == 28);
  CHECK(j.at("entries").size() == 6);
}

TEST_CASE("aligned map follows category position and clamps past the source") {
  const auto src = build_ordinal_map(testutil::small_schema(3, 2, 1));
  CourseSchema tgt;
  tgt.content_ids = {"x0", "x1", "x2", "x3", "x4"};
  tgt.quiz_ids = {"y0"};
  tgt.project_ids = {"z0", "z1"};
  const auto m = build_aligned_map(tgt, src);
  CHECK(m.aligned());
  CHECK(m.num_actions() == src.num_actions());
  CHECK(m.find("x1", EventKind::kContent) == 1);
  CHECK(m.find("x4", EventKind::kContent) == 2);
  CHECK(m.find("y0", EventKind::kQuizIncorrect) == src.find("q0", EventKind::kQuizIncorrect));
  CHECK(m.find("z1", EventKind::kProjectFailed) == src.find("p0", EventKind::kProjectFailed));
}

TEST_CASE("delta discretization") {
  const Timestamp t0 = ts("2020-01-01T00:00:00Z");
  CHECK(discretize_delta(Timestamp{t0.seconds + 3 * 3600}, t0, 28) == 0);
  CHECK(discretize_delta(Timestamp{t0.seconds + static_cast<std::int64_t>(5.2 * 86400)}, t0, 28) == 5);
  CHECK(discretize_delta(Timestamp{t0.seconds + 90 * 86400}, t0, 28) == 28);
  CHECK(discretize_delta(Timestamp{t0.seconds + 86400}, t0, 28) == 1);
  CHECK_THROWS_AS(discretize_delta(t0, Timestamp{t0.seconds + 1}, 28), ArgumentError);
}

TEST_CASE("encode_student anchors the first delta at enrollment") {
  const auto schema = testutil::small_schema(5, 2, 1);
  const auto m = build_ordinal_map(schema);
  StudentRecord r;
  r.student_id = "1122";
  r.enrolled_at = ts("2020-01-01T00:00:00Z");
  r.graduated = true;
  const std::int64_t day = kSecondsPerDay;
  const std::int64_t t0 = r.enrolled_at.seconds;
  r.events = {{"c0", EventKind::kContent, {t0 + 2 * day}},
              {"c1", EventKind::kContent, {t0 + 2 * day + 60}},
              {"c2", EventKind::kContent, {t0 + 3 * day}},
              {"c3", EventKind::kContent, {t0 + 3 * day + 60}},
              {"q0", EventKind::kQuizCorrect, {t0 + 4 * day}}};
  const auto e = encode_student(r, m, 28);
  CHECK(e.label);
  REQUIRE(e.events.size() == 5);
  for (int n = 0; n < 4; ++n) CHECK(e.events[n].action < 5);
  CHECK(e.events[4].action == 5);
  CHECK(e.events[0].delta == 2);
  CHECK(e.events[1].delta == 0);
  CHECK(e.events[2].delta == 0);
  CHECK(e.events[4].delta == 0);

  StudentRecord empty = r;
  empty.events.clear();
  const auto ee = encode_student(empty, m, 28);
  CHECK(ee.events.empty());
  CHECK(ee.label);

  StudentRecord bad = r;
  bad.events.push_back({"zz", EventKind::kContent, {t0 + 5 * day}});
  CHECK_THROWS_AS(encode_student(bad, m, 28), DataError);
}

TEST_CASE("encode_student is injective up to delta clamping") {
  const auto schema = testutil::small_schema(4, 2, 1);
  const auto m = build_ordinal_map(schema);
  std::mt19937_64 rng(31);
  std::map<std::vector<std::pair<int, int>>, std::vector<std::pair<std::string, std::int64_t>>> seen;
  for (int trial = 0; trial < 300; ++trial) {
    StudentRecord r;
    r.enrolled_at = ts("2020-01-01T00:00:00Z");
    std::int64_t t = r.enrolled_at.seconds;
    std::vector<std::pair<std::string, std::int64_t>> key;
    const int n = static_cast<int>(rng() % 4);
    for (int q = 0; q < n; ++q) {
      t += static_cast<std::int64_t>(rng() % 5) * kSecondsPerDay;  // whole days, below the cap
      const std::string id = "c" + std::to_string(rng() % 4);
      r.events.push_back({id, EventKind::kContent, {t}});
      key.emplace_back(id, (t - r.enrolled_at.seconds) / kSecondsPerDay);
    }
    std::vector<std::pair<int, int>> enc;
    for (const auto& e : encode_student(r, m, 28).events) enc.emplace_back(e.action, e.delta);
    auto [it, inserted] = seen.emplace(enc, key);
    if (!inserted) CHECK(it->second == key);
  }
}

TEST_CASE("pad_and_batch pre-pads and splits") {
  std::vector<EncodedSequence> seqs(2);
  seqs[0].events = {{0, 0}, {1, 1}, {2, 0}};
  seqs[1].events = {{0, 0}, {1, 1}, {2, 0}, {1, 3}, {0, 2}};
  auto b = pad_and_batch(seqs, 5, 16);
  REQUIRE(b.size() == 1);
  CHECK(b[0].padding == std::vector<std::size_t>{2, 0});
  CHECK(b[0].rows[0][0].is_padding());
  CHECK(b[0].rows[0][1].is_padding());
  CHECK(b[0].rows[0][2] == EncodedEvent{0, 0});
  CHECK(b[0].rows[1] == seqs[1].events);
  CHECK_THROWS_AS(pad_and_batch(seqs, 4, 16), ArgumentError);

  std::vector<EncodedSequence> many(33);
  for (auto& s : many) s.events = {{0, 0}};
  const auto mb = pad_and_batch(many, 1, 16);
  REQUIRE(mb.size() == 3);
  CHECK(mb[0].size() == 16);
  CHECK(mb[1].size() == 16);
  CHECK(mb[2].size() == 1);
}

TEST_CASE("padding keeps the multiset of real events and shuffles by seed") {
  std::mt19937_64 rng(41);
  std::vector<EncodedSequence> seqs(40);
  for (std::size_t n = 0; n < seqs.size(); ++n) {
    seqs[n].student_id = std::to_string(n);
    const std::size_t len = rng() % 9;
    for (std::size_t q = 0; q < len; ++q) {
      seqs[n].events.push_back({static_cast<int>(rng() % 7), static_cast<int>(rng() % 29)});
    }
  }
  const auto a = pad_and_batch(seqs, 8, 7, 99);
  const auto b = pad_and_batch(seqs, 8, 7, 99);
  const auto c = pad_and_batch(seqs, 8, 7);
  std::vector<std::size_t> order_a, order_c;
  for (std::size_t bi = 0; bi < a.size(); ++bi) {
    CHECK(a[bi].source_index == b[bi].source_index);
    for (std::size_t r = 0; r < a[bi].size(); ++r) {
      const auto& row = a[bi].rows[r];
      CHECK(row.size() == 8);
      const auto& orig = seqs[a[bi].source_index[r]].events;
      std::vector<EncodedEvent> real(row.begin() + static_cast<std::ptrdiff_t>(a[bi].padding[r]), row.end());
      CHECK(real == orig);
      CHECK(std::all_of(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(a[bi].padding[r]),
                        [](const EncodedEvent& e) { return e.is_padding(); }));
      order_a.push_back(a[bi].source_index[r]);
    }
  }
  for (const auto& bt : c) order_c.insert(order_c.end(), bt.source_index.begin(), bt.source_index.end());
  std::vector<std::size_t> iota(seqs.size());
  std::iota(iota.begin(), iota.end(), 0);
  CHECK(order_c == iota);
  CHECK(order_a != iota);
  std::sort(order_a.begin(), order_a.end());
  CHECK(order_a == iota);
}

TEST_CASE("take_recent keeps the tail") {
  std::vector<EncodedEvent> ev = {{0, 0}, {1, 0}, {2, 0}, {3, 0}};
  const auto r = take_recent(ev, 2);
  REQUIRE(r.size() == 2);
  CHECK(r[0].action == 2);
  CHECK(take_recent(ev, 10) == ev);
}

TEST_CASE("encoded archive JSON round-trip") {
  EncodedArchive a;
  a.map = build_ordinal_map(testutil::small_schema(2, 1, 1));
  a.week = 3;
  a.sequences.resize(2);
  a.sequences[0] = {"a", {{0, 1}, {3, 0}}, true};
  a.sequences[1] = {"b", {}, false};
  const auto b = archive_from_json(archive_to_json(a));
  CHECK(b.map == a.map);
  CHECK(b.week == 3);
  CHECK(b.sequences == a.sequences);
}

}  // TEST_SUITE
