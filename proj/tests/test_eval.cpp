#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "doctest.h"
#include "gritnet/error.hpp"
#include "gritnet/eval.hpp"
#include "test_util.hpp"

using namespace gritnet;

namespace {

double brute_auc(const std::vector<double>& s, const std::vector<bool>& y) {
  double wins = 0.0, pairs = 0.0;
  for (std::size_t a = 0; a < s.size(); ++a) {
    if (!y[a]) continue;
    for (std::size_t b = 0; b < s.size(); ++b) {
      if (y[b]) continue;
      pairs += 1.0;
      wins += s[a] > s[b] ? 1.0 : (s[a] == s[b] ? 0.5 : 0.0);
    }
  }
  return 100.0 * wins / pairs;
}

// Scores on a coarse grid so ties are common.
void random_case(std::mt19937_64& rng, std::size_t n, std::vector<double>& s, std::vector<bool>& y) {
  s.resize(n);
  y.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    y[k] = rng() % 3 == 0;
    // integer grid so ties are exact and distinct values stay distinct
    s[k] = static_cast<double>(rng() % 20 + (y[k] ? 2 : 0)) / 20.0;
  }
  y[0] = true;
  y[1] = false;
}

WeekScores week_scores(int week, std::mt19937_64& rng) {
  WeekScores w;
  w.week = week;
  std::vector<double> base;
  random_case(rng, 60, base, w.labels);
  auto noisy = [&](double amount) {
    std::vector<double> out(base);
    for (auto& v : out) v += amount * static_cast<double>(rng() % 100) / 100.0;
    return out;
  };
  w.vanilla = noisy(2.0);
  w.gritnet = noisy(1.0);
  w.oracle = noisy(0.1);
  w.adapted[0.1] = noisy(0.5);
  w.adapted[0.2] = noisy(0.8);
  return w;
}

}  // namespace

TEST_SUITE("eval") {

TEST_CASE("auc examples") {
  CHECK(auc(std::vector<double>{0.1, 0.2, 0.8, 0.9}, {false, false, true, true}) == 100.0);
  CHECK(auc(std::vector<double>{0.3, 0.3, 0.3}, {true, false, true}) == 50.0);
  CHECK_THROWS_AS(auc(std::vector<double>{0.1, 0.2}, {true, true}), UndefinedMetricError);
  CHECK_THROWS_AS(auc(std::vector<double>{}, {}), UndefinedMetricError);
  CHECK_THROWS_AS(auc(std::vector<double>{0.1}, {true, false}), ArgumentError);
}

TEST_CASE("auc equals brute-force pair counting") {
  std::mt19937_64 rng(1);
  for (int rep = 0; rep < 30; ++rep) {
    std::vector<double> s;
    std::vector<bool> y;
    random_case(rng, 200, s, y);
    CHECK(auc(s, y) == doctest::Approx(brute_auc(s, y)).epsilon(1e-13));
  }
}

TEST_CASE("auc properties") {
  std::mt19937_64 rng(2);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<double> s;
    std::vector<bool> y;
    random_case(rng, 80, s, y);
    const double a = auc(s, y);
    std::vector<double> t(s.size());
    std::transform(s.begin(), s.end(), t.begin(), [](double v) { return std::exp(3.0 * v) - 7.0; });
    CHECK(auc(t, y) == doctest::Approx(a).epsilon(1e-13));
    std::vector<bool> flip(y.size());
    std::transform(y.begin(), y.end(), flip.begin(), [](bool v) { return !v; });
    CHECK(a + auc(s, flip) == doctest::Approx(100.0).epsilon(1e-13));
    const auto curve = roc_curve(s, y);
    CHECK(curve.front().fpr == 0.0);
    CHECK(curve.front().tpr == 0.0);
    CHECK(std::isinf(curve.front().threshold));
    CHECK(curve.back().fpr == 1.0);
    CHECK(curve.back().tpr == 1.0);
    CHECK(std::abs(trapezoid_auc(curve) - a) <= 1e-10);
  }
}

TEST_CASE("arr examples") {
  CHECK(*arr(80, 70, 90) == doctest::Approx(0.5));
  CHECK(*arr(90, 70, 90) == doctest::Approx(1.0));
  CHECK(*arr(70, 70, 90) == 0.0);
  CHECK_FALSE(arr(80, 70, 70.05).has_value());
  std::mt19937_64 rng(3);
  for (int rep = 0; rep < 50; ++rep) {
    const auto v = testutil::random_vector(rng, 3, 50, 100);
    const double scale = 0.5 + static_cast<double>(rng() % 100) / 50.0, shift = -20.0;
    const auto a = arr(v[0], v[1], v[2]);
    const auto b = arr(scale * v[0] + shift, scale * v[1] + shift, scale * v[2] + shift);
    if (a && b) CHECK(*a == doctest::Approx(*b).epsilon(1e-10));
  }
}

TEST_CASE("stratified folds") {
  SUBCASE("divisible") {
    std::vector<bool> y(50, false);
    std::fill(y.begin(), y.begin() + 10, true);
    const auto folds = stratified_kfold(y, 5, 1);
    for (const auto& f : folds) {
      CHECK(f.size() == 10);
      CHECK(std::count_if(f.begin(), f.end(), [&](std::size_t i) { return y[i]; }) == 2);
    }
  }
  SUBCASE("remainder") {
    std::vector<bool> y(51, false);
    std::fill(y.begin(), y.begin() + 11, true);
    std::multiset<long> pos;
    for (const auto& f : stratified_kfold(y, 5, 2)) {
      pos.insert(std::count_if(f.begin(), f.end(), [&](std::size_t i) { return y[i]; }));
    }
    CHECK(pos == std::multiset<long>{2, 2, 2, 2, 3});
  }
  SUBCASE("partition and balance for random inputs") {
    std::mt19937_64 rng(4);
    for (int rep = 0; rep < 40; ++rep) {
      const std::size_t n = 20 + rng() % 200, k = 2 + rng() % 6;
      std::vector<bool> y(n);
      for (std::size_t i = 0; i < n; ++i) y[i] = i < k || (i >= 2 * k && rng() % 4 == 0);
      for (std::size_t i = k; i < 2 * k; ++i) y[i] = false;
      const auto folds = stratified_kfold(y, k, rng());
      REQUIRE(folds.size() == k);
      std::vector<int> seen(n, 0);
      const double global = static_cast<double>(std::count(y.begin(), y.end(), true)) / n;
      for (const auto& f : folds) {
        double p = 0;
        for (auto i : f) {
          ++seen[i];
          p += y[i];
        }
        CHECK(std::abs(p / f.size() - global) <= 1.0 / static_cast<double>(n / k) + 1e-12);
      }
      CHECK(std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; }));
    }
  }
  CHECK_THROWS_AS(stratified_kfold({true, false, false}, 2, 0), ArgumentError);
  CHECK_THROWS_AS(stratified_kfold({true, true, false, false}, 1, 0), ArgumentError);
}

TEST_CASE("weekly report structure and mean arr") {
  std::mt19937_64 rng(5);
  std::vector<WeekScores> weeks;
  for (int w = 1; w <= 8; ++w) weeks.push_back(week_scores(w, rng));
  // week 1 has a single class in the target
  std::fill(weeks[0].labels.begin(), weeks[0].labels.end(), true);
  weeks[2].oracle.reset();
  weeks[2].failures["oracle"] = "diverged";
  const std::vector<double> thetas = {0.1, 0.2};
  const auto rep = weekly_evaluation(weeks, thetas);
  REQUIRE(rep.rows.size() == 8);
  CHECK_FALSE(rep.rows[0].gritnet.value.has_value());
  CHECK_FALSE(rep.rows[0].gritnet.note.empty());
  CHECK(rep.rows[1].gritnet.value.has_value());
  CHECK_FALSE(rep.rows[2].oracle.value.has_value());
  CHECK(rep.rows[2].oracle.note.find("diverged") != std::string::npos);
  CHECK_FALSE(rep.rows[2].arr.at(0.1).value.has_value());
  CHECK(rep.rows[3].adapted.at(0.2).value.has_value());

  const auto m = mean_arr(rep, 1, 4);
  for (double th : thetas) {
    double sum = 0.0;
    int n = 0;
    for (int w = 0; w < 4; ++w) {
      if (const auto& v = rep.rows[w].arr.at(th).value) {
        sum += *v;
        ++n;
      }
    }
    REQUIRE(n > 0);
    CHECK(*m.at(th) == doctest::Approx(sum / n));
  }

  const auto csv = report_to_csv(rep);
  CHECK(csv.rfind("week,setup,theta,auc,arr\n", 0) == 0);
  const auto j = report_to_json(rep, 1, 4);
  CHECK(j.at("weeks").size() == 8);
  CHECK(roc_to_csv({{1.0, 0.0, 0.5}}).rfind("threshold,fpr,tpr\n", 0) == 0);
}

TEST_CASE("format_double round trips") {
  std::mt19937_64 rng(6);
  for (double v : testutil::random_vector(rng, 100, -1e6, 1e6)) {
    CHECK(std::stod(format_double(v)) == v);
  }
  CHECK(format_double(0.5) == "0.5");
}

}  // TEST_SUITE
