#include <algorithm>
#include <random>

#include "doctest.h"
#include "gritnet/adapt.hpp"
#include "gritnet/error.hpp"
#include "test_util.hpp"

using namespace gritnet;

namespace {

struct Setup {
  OrdinalMap map = build_ordinal_map(testutil::small_schema(5, 2, 1), 4);
  GritNetModel source;
  std::vector<EncodedSequence> target;
  Setup() {
    LayerConfig layers;
    layers.embed_dim = 5;
    layers.hidden_dim = 3;
    source = build_model(layers, map, 21);
    source.t_max = 10;
    std::mt19937_64 rng(8);
    const auto L = static_cast<std::uint64_t>(map.num_actions());
    for (int s = 0; s < 40; ++s) {
      EncodedSequence q;
      q.student_id = "t" + std::to_string(s);
      q.label = s % 3 == 0;
      const std::size_t len = 2 + rng() % 12;
      for (std::size_t t = 0; t < len; ++t) {
        q.events.push_back({static_cast<int>(rng() % L), static_cast<int>(rng() % 5)});
      }
      target.push_back(std::move(q));
    }
  }
  // Threshold at the median source score so both pseudo classes exist.
  double median_theta() const {
    auto p = predict(source, target);
    std::nth_element(p.begin(), p.begin() + p.size() / 2, p.end());
    return p[p.size() / 2];
  }
};

AdaptConfig small_config() {
  AdaptConfig c;
  c.train.epochs = 3;
  c.train.seed = 4;
  c.train.optimizer.lr = 1e-2;
  return c;
}

}  // namespace

TEST_SUITE("adapt") {

TEST_CASE("pseudo-labels follow the indicator with >=") {
  std::vector<EncodedSequence> t(3);
  const std::vector<double> p = {0.05, 0.2, 0.9};
  const auto s = assign_pseudo_labels(p, t, 0.2);
  CHECK(s.labels == std::vector<bool>{false, true, true});
  CHECK(s.sequences[1].label);
  CHECK(s.positives() == 2);
  CHECK(s.target_index == std::vector<std::size_t>{0, 1, 2});
  CHECK(assign_pseudo_labels(std::vector<double>{}, std::vector<EncodedSequence>{}, 0.2)
            .sequences.empty());
  CHECK_THROWS_AS(assign_pseudo_labels(p, t, 0.0), ArgumentError);
  CHECK_THROWS_AS(assign_pseudo_labels(p, t, 1.0), ArgumentError);
  CHECK_THROWS_AS(assign_pseudo_labels(std::vector<double>{0.5}, t, 0.2), ArgumentError);
}

TEST_CASE("zero fc model at theta 0.5 labels everything positive") {
  Setup s;
  s.source.params.value("fc.w").fill(0.0);
  s.source.params.value("fc.b").fill(0.0);
  const auto p = assign_pseudo_labels(s.source, s.target, 0.5);
  CHECK(p.positives() == s.target.size());
}

TEST_CASE("pseudo-labelling is idempotent and monotone in theta") {
  Setup s;
  std::size_t last = s.target.size() + 1;
  for (double theta : {0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.8, 0.95}) {
    const auto a = assign_pseudo_labels(s.source, s.target, theta);
    const auto b = assign_pseudo_labels(s.source, s.target, theta);
    CHECK(a.labels == b.labels);
    for (std::size_t k = 0; k < a.labels.size(); ++k) {
      CHECK(a.labels[k] == (a.probabilities[k] >= theta));
    }
    CHECK(a.positives() <= last);
    last = a.positives();
  }
}

TEST_CASE("confidence filter keeps only confident examples") {
  const std::vector<double> p = {0.05, 0.5, 0.85, 0.95};
  std::vector<EncodedSequence> t(4);
  const auto s = assign_pseudo_labels(p, t, 0.2, PseudoLabelMode::kConfidenceFilter);
  CHECK(s.target_index == std::vector<std::size_t>{0, 2, 3});
  CHECK(s.labels == std::vector<bool>{false, true, true});
}

TEST_CASE("adaptation changes only the fc group") {
  Setup s;
  const double theta = s.median_theta();
  const auto r = domain_adapt(s.source, s.target, theta, small_config());
  for (const auto& [name, p] : s.source.params.all()) {
    CAPTURE(name);
    if (group_of(name) == "fc") continue;
    CHECK(r.model.params.at(name).value.data == p.value.data);
  }
  CHECK(r.model.params.value("fc.w").data != s.source.params.value("fc.w").data);
  CHECK(r.history.epochs_completed() == 3);
}

TEST_CASE("cached features give the same adapted model") {
  Setup s;
  const double theta = s.median_theta();
  const auto feats = pooled_features(s.source, s.target);
  const auto a = domain_adapt(s.source, s.target, theta, small_config());
  const auto b = domain_adapt(s.source, s.target, theta, small_config(), &feats);
  for (const char* name : {"fc.w", "fc.b"}) {
    const auto& x = a.model.params.value(name).data;
    const auto& y = b.model.params.value(name).data;
    for (std::size_t k = 0; k < x.size(); ++k) CHECK(x[k] == doctest::Approx(y[k]).epsilon(1e-12));
  }
}

TEST_CASE("oracle with pseudo-labels as truth equals domain_adapt") {
  Setup s;
  const double theta = s.median_theta();
  const auto a = domain_adapt(s.source, s.target, theta, small_config());
  const auto o = oracle_adapt(s.source, s.target, a.pseudo.labels, small_config());
  CHECK(model_hash(a.model) == model_hash(o.model));
  CHECK_THROWS_AS(oracle_adapt(s.source, s.target, {}, small_config()), ArgumentError);
}

TEST_CASE("theta sweep runs every threshold") {
  Setup s;
  const double m = s.median_theta();
  const auto rs = domain_adapt_sweep(s.source, s.target, {m * 0.999, m, m * 1.0001}, small_config());
  REQUIRE(rs.size() == 3);
  CHECK(rs[1].pseudo.theta == m);
}

TEST_CASE("single-class pseudo-labels are a data error") {
  Setup s;
  CHECK_THROWS_AS(domain_adapt(s.source, s.target, 0.999999, small_config()), DataError);
  CHECK_THROWS_AS(domain_adapt(s.source, s.target, 1e-9, small_config()), DataError);
}

}  // TEST_SUITE
