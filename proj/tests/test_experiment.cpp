#include "doctest.h"
#include "gritnet/common.hpp"
#include "gritnet/error.hpp"
#include "gritnet/experiment.hpp"
#include "small_config.hpp"
#include "test_util.hpp"

using namespace gritnet;

TEST_SUITE("experiment") {

TEST_CASE("reruns are byte identical, with any number of jobs") {
  testutil::TempDir dir("exp");
  const auto cfg = testutil::small_experiment();
  const auto a = run_experiment(cfg, dir.file("a"), 1);
  const auto b = run_experiment(cfg, dir.file("b"), 2);
  CHECK(file_hash(dir.file("a/manifest.json")) == file_hash(dir.file("b/manifest.json")));
  const auto& files = a.manifest.at("files");
  CHECK(files.contains("seed-1/report.csv"));
  CHECK(files.contains("seed-1/report.json"));
  CHECK(files.contains("seed-1/week-2/source.grit"));
  CHECK(files.contains("seed-1/week-2/oracle.grit"));
  CHECK(files.contains("seed-1/week-3/roc-gritnet.csv"));
  CHECK(files == b.manifest.at("files"));
  REQUIRE(a.runs.size() == 1);
  CHECK(a.runs[0].report.rows.size() == 2);
  CHECK(a.manifest.at("config_hash") == config_hash(cfg));
}

TEST_CASE("a single week gives a single row") {
  testutil::TempDir dir("exp1");
  auto cfg = testutil::small_experiment();
  cfg.weeks = {2};
  cfg.write_checkpoints = false;
  const auto r = run_experiment(cfg, dir.path().string());
  REQUIRE(r.runs[0].report.rows.size() == 1);
  CHECK(r.runs[0].report.rows[0].week == 2);
  CHECK(r.runs[0].report.rows[0].gritnet.value.has_value());
  CHECK(r.runs[0].report.rows[0].vanilla.value.has_value());
}

TEST_CASE("stage failures are recorded and other setups continue") {
  testutil::TempDir dir("exp-fail");
  auto cfg = testutil::small_experiment();
  cfg.weeks = {2};
  cfg.thetas = {0.999999};
  cfg.write_checkpoints = false;
  const auto r = run_experiment(cfg, dir.path().string());
  const auto& row = r.runs[0].report.rows[0];
  CHECK_FALSE(row.adapted.at(0.999999).value.has_value());
  CHECK(row.oracle.value.has_value());
  const auto& week = r.manifest.at("runs")[0].at("weeks")[0];
  CHECK(week.at("errors").contains("adapted-0.999999"));
}

TEST_CASE("config json round trip and validation") {
  const auto cfg = testutil::small_experiment();
  const auto j = experiment_config_to_json(cfg);
  const auto back = experiment_config_from_json(j);
  CHECK(experiment_config_to_json(back) == j);
  CHECK(config_hash(back) == config_hash(cfg));
  CHECK(config_hash(default_experiment_config()) != config_hash(cfg));

  auto bad = j;
  bad["weeks"] = {3, 2};
  CHECK_THROWS_AS(experiment_config_from_json(bad), ConfigError);
  bad = j;
  bad["thetas"] = {1.0};
  CHECK_THROWS_AS(experiment_config_from_json(bad), ConfigError);
  bad = j;
  bad["no_such_field"] = 1;
  CHECK_THROWS_AS(experiment_config_from_json(bad), ConfigError);
  // Missing fields keep the defaults.
  const auto partial = experiment_config_from_json({{"weeks", {1, 2}}});
  CHECK(partial.weeks == std::vector<int>{1, 2});
  CHECK(partial.layers == default_experiment_config().layers);
}

TEST_CASE("stage seeds differ per week") {
  const auto a = stage_seeds(1, 2), b = stage_seeds(1, 3), c = stage_seeds(2, 2);
  CHECK(a.train != b.train);
  CHECK(a.adapt != b.adapt);
  CHECK(a.train != c.train);
  CHECK(a.train != a.adapt);
}

}  // TEST_SUITE
