#include <random>

#include "doctest.h"
#include "gritnet/baseline.hpp"
#include "gritnet/error.hpp"
#include "gritnet/eval.hpp"
#include "test_util.hpp"

using namespace gritnet;

namespace {

RawEvent ev(const char* id, EventKind kind, const char* when) {
  return {id, kind, testutil::ts(when)};
}

}  // namespace

TEST_SUITE("baseline") {

TEST_CASE("featurize counts") {
  StudentRecord empty;
  for (double v : featurize(empty)) CHECK(v == 0.0);

  // four sparse lecture views and three failed project attempts
  StudentRecord r;
  r.enrolled_at = testutil::ts("2015-02-01T00:00:00Z");
  r.events = {ev("c1", EventKind::kContent, "2015-02-02T10:00:00Z"),
              ev("c2", EventKind::kContent, "2015-02-09T10:00:00Z"),
              ev("p1", EventKind::kProjectFailed, "2015-02-09T11:00:00Z"),
              ev("c3", EventKind::kContent, "2015-02-20T10:00:00Z"),
              ev("p1", EventKind::kProjectFailed, "2015-02-21T11:00:00Z"),
              ev("c4", EventKind::kContent, "2015-03-05T10:00:00Z"),
              ev("p1", EventKind::kProjectFailed, "2015-03-05T23:59:59Z")};
  const auto f = featurize(r);
  CHECK(f[0] == 4);
  CHECK(f[1] == 0);
  CHECK(f[2] == 0);
  CHECK(f[3] == 0);
  CHECK(f[4] == 3);
  CHECK(f[5] == 5);
  CHECK(f[6] == 7);

  StudentRecord same_day;
  same_day.events = {ev("c1", EventKind::kContent, "2015-02-02T00:00:01Z"),
                     ev("q1", EventKind::kQuizCorrect, "2015-02-02T23:59:59Z")};
  CHECK(featurize(same_day)[5] == 1);
}

TEST_CASE("logreg objective gradient matches finite differences") {
  std::mt19937_64 rng(7);
  for (int rep = 0; rep < 10; ++rep) {
    std::vector<std::vector<double>> x;
    std::vector<bool> y;
    for (int n = 0; n < 30; ++n) {
      x.push_back(testutil::random_vector(rng, 5, -2, 2));
      y.push_back(rng() % 2 == 0);
    }
    auto w = testutil::random_vector(rng, 5);
    const double b = 0.3;
    std::vector<double> g;
    logreg_objective(w, b, x, y, 0.05, &g);
    REQUIRE(g.size() == 6);
    const double h = 1e-5;
    for (std::size_t k = 0; k < 6; ++k) {
      auto wp = w, wm = w;
      double bp = b, bm = b;
      if (k < 5) {
        wp[k] += h;
        wm[k] -= h;
      } else {
        bp += h;
        bm -= h;
      }
      const double fd = (logreg_objective(wp, bp, x, y, 0.05, nullptr) -
                         logreg_objective(wm, bm, x, y, 0.05, nullptr)) / (2 * h);
      CHECK(testutil::rel_err(fd, g[k]) <= 1e-6);
    }
  }
}

TEST_CASE("logreg fits a separable feature and is row-order invariant") {
  std::vector<FeatureVector> f;
  std::vector<bool> y;
  for (int n = 0; n < 40; ++n) {
    FeatureVector v{};
    v[0] = n;
    v[5] = n % 7;
    f.push_back(v);
    y.push_back(n >= 20);
  }
  const auto m = train_logreg(f, y);
  const auto p = predict_logreg(m, f);
  CHECK(auc(p, y) == 100.0);
  std::vector<FeatureVector> rev(f.rbegin(), f.rend());
  const auto pr = predict_logreg(m, rev);
  for (std::size_t k = 0; k < p.size(); ++k) CHECK(pr[p.size() - 1 - k] == p[k]);

  auto zero = m;
  std::fill(zero.weights.begin(), zero.weights.end(), 0.0);
  zero.bias = 0.0;
  for (double q : predict_logreg(zero, f)) CHECK(q == 0.5);

  CHECK_THROWS_AS(train_logreg(f, std::vector<bool>(40, true)), DataError);
}

TEST_CASE("standardization uses training statistics only") {
  std::vector<FeatureVector> f;
  std::vector<bool> y;
  for (int n = 0; n < 10; ++n) {
    FeatureVector v{};
    v[0] = n;
    f.push_back(v);
    y.push_back(n % 2 == 1);
  }
  const auto m = train_logreg(f, y);
  CHECK(m.means[0] == doctest::Approx(4.5));
  FeatureVector far{};
  far[0] = 1000;
  const auto z = standardize(m, far);
  CHECK(z[0] == doctest::Approx((1000 - 4.5) / m.stds[0]));
  // A constant feature standardizes to zero instead of dividing by zero.
  CHECK(z[1] == 0.0);
}

TEST_CASE("logreg json round trip") {
  std::vector<FeatureVector> f;
  std::vector<bool> y;
  std::mt19937_64 rng(3);
  for (int n = 0; n < 30; ++n) {
    FeatureVector v{};
    for (auto& x : v) x = static_cast<double>(rng() % 50);
    f.push_back(v);
    y.push_back(n % 3 == 0);
  }
  const auto m = train_logreg(f, y);
  const auto back = logreg_from_json(nlohmann::json::parse(logreg_to_json(m).dump()));
  CHECK(back.weights == m.weights);
  CHECK(back.bias == m.bias);
  CHECK(back.means == m.means);
  CHECK(back.stds == m.stds);
  CHECK(predict_logreg(back, f) == predict_logreg(m, f));
}

}  // TEST_SUITE
