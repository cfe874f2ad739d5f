// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Criterion 8 runs the default synthetic benchmark (weeks
// 2-4, seeds 1-3); criterion 7 reruns it and compares every artifact.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <thread>
#include <cstring>
#include <numeric>
#include <optional>
#include <cstdlib>
#include <set>
#include <string>
#include <unistd.h>

#include "gradcheck.hpp"
#include "gritnet/adapt.hpp"
#include "gritnet/checkpoint.hpp"
#include "gritnet/common.hpp"
#include "gritnet/encoding.hpp"
#include "gritnet/error.hpp"
#include "gritnet/eval.hpp"
#include "gritnet/experiment.hpp"
#include "gritnet/kernels.hpp"
#include "gritnet/model.hpp"
#include "gritnet/synth.hpp"
#include "gritnet/train.hpp"

using namespace gritnet;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

int failures = 0;

void report(int n, const Outcome& o, double secs, double budget) {
  const bool in_time = budget <= 0.0 || secs < budget;
  const bool ok = o.pass && in_time;
  if (!ok) ++failures;
  std::printf("criterion %d: %s -%s (%.1f s%s)\n", n, ok ? "PASS" : "FAIL", o.detail.str().c_str(),
              secs, in_time ? "" : ", over budget");
  std::fflush(stdout);
}

struct Timed {
  Outcome outcome;
  double secs = 0.0;
};

Timed measure(const std::function<void(Outcome&)>& body) {
  Timed t;
  const auto t0 = Clock::now();
  try {
    body(t.outcome);
  } catch (const std::exception& e) {
    t.outcome.pass = false;
    t.outcome.detail << " [exception: " << e.what() << "]";
  }
  t.secs = seconds_since(t0);
  return t;
}

// Criteria named on the command line; empty means all.
std::set<int> selected;

bool wanted(int n) { return selected.empty() || selected.count(n) != 0; }

void run(int n, double budget, const std::function<void(Outcome&)>& body) {
  if (!wanted(n)) return;
  const Timed t = measure(body);
  report(n, t.outcome, t.secs, budget);
}

// ------------------------------------------------------------------ 1

void vocabulary(Outcome& o) {
  const std::pair<CourseProfile, std::size_t> cases[] = {
      {profile_nd_a_v1(), 815}, {profile_nd_b(), 1108}, {profile_nd_c(), 756}, {profile_nd_d(), 456}};
  for (const auto& [profile, expected] : cases) {
    const auto L = build_ordinal_map(make_schema(profile)).num_actions();
    o.detail << " " << profile.course_id << "=" << L;
    o.require(L == expected, profile.course_id + " expected " + std::to_string(expected));
  }
}

// ------------------------------------------------------------------ 2

void gradients(Outcome& o) {
  const std::pair<const char*, gradcheck::Result (*)(std::uint64_t)> checks[] = {
      {"embedding", &gradcheck::embedding}, {"lstm_cell", &gradcheck::lstm_cell},
      {"bilstm", &gradcheck::bilstm},       {"max_pool", &gradcheck::max_pool},
      {"fc_bce", &gradcheck::fc_sigmoid_bce}, {"composed", &gradcheck::composed}};
  for (const auto& [name, fn] : checks) {
    double worst = 0.0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      const auto r = fn(seed);
      o.require(r.checked > 0, std::string(name) + " checked nothing");
      worst = std::max(worst, r.max_rel);
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, " %s %.1e", name, worst);
    o.detail << buf;
    o.require(worst <= 1e-4, name);
  }
}

// ------------------------------------------------------------------ 3

double brute_auc(const std::vector<double>& s, const std::vector<bool>& y) {
  std::size_t twice_wins = 0, pairs = 0;
  for (std::size_t a = 0; a < s.size(); ++a) {
    if (!y[a]) continue;
    for (std::size_t b = 0; b < s.size(); ++b) {
      if (y[b]) continue;
      ++pairs;
      twice_wins += s[a] > s[b] ? 2 : (s[a] == s[b] ? 1 : 0);
    }
  }
  return 100.0 * static_cast<double>(twice_wins) / (2.0 * static_cast<double>(pairs));
}

void auc_oracle(Outcome& o) {
  std::mt19937_64 rng(2024);
  int exact = 0;
  for (int inst = 0; inst < 50; ++inst) {
    std::vector<double> s(200);
    std::vector<bool> y(200);
    for (std::size_t k = 0; k < 200; ++k) {
      y[k] = rng() % 4 == 0;
      s[k] = static_cast<double>(rng() % 25) / 25.0;  // many ties
    }
    y[0] = true;
    y[1] = false;
    if (inst == 0) std::fill(s.begin(), s.end(), 0.5);
    if (inst == 1) {
      for (std::size_t k = 0; k < 200; ++k) s[k] = y[k] ? 1.0 + 0.001 * k : 0.001 * k;
    }
    const double a = auc(s, y), b = brute_auc(s, y);
    exact += a == b;
    if (inst == 0) o.require(a == 50.0, "all ties give 50");
    if (inst == 1) o.require(a == 100.0, "perfect separation gives 100");
  }
  o.detail << " " << exact << "/50 exact";
  o.require(exact == 50, "rank AUC differs from pair counting");
}

// ------------------------------------------------------------------ 4

void arr_arithmetic(Outcome& o) {
  o.require(arr(80, 70, 90) && std::abs(*arr(80, 70, 90) - 0.5) <= 1e-12, "arr(80,70,90)=0.5");
  o.require(arr(85.5, 70, 85.5) && std::abs(*arr(85.5, 70, 85.5) - 1.0) <= 1e-12, "x=x' gives 1");
  o.require(arr(70, 70, 85.5) && *arr(70, 70, 85.5) == 0.0, "x=b gives 0");
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(40.0, 100.0), sc(0.1, 3.0), sh(-50.0, 50.0);
  double worst = 0.0;
  int tested = 0;
  for (int k = 0; k < 1000; ++k) {
    const double x = u(rng), b = u(rng), xo = u(rng), a = sc(rng), c = sh(rng);
    const auto r1 = arr(x, b, xo), r2 = arr(a * x + c, a * b + c, a * xo + c);
    if (!r1 || !r2) continue;
    // Compare relative to the magnitude of the ratio.
    worst = std::max(worst, std::abs(*r1 - *r2) / std::max(1.0, std::abs(*r1)));
    ++tested;
  }
  char buf[80];
  std::snprintf(buf, sizeof buf, " affine: %d triples, max diff %.1e", tested, worst);
  o.detail << buf;
  o.require(worst <= 1e-12, "affine invariance");
}

// ------------------------------------------------------------------ 5

void freeze_invariant(Outcome& o) {
  const auto dir = fs::temp_directory_path() / ("gritnet-accept-5-" + std::to_string(::getpid()));
  fs::create_directories(dir);
  auto profile = profile_nd_d(0.05);
  const auto [src_data, tgt_data] = generate_shift_pair(profile, ShiftSpec{}, 5);
  const auto map = build_ordinal_map(src_data.schema);
  const auto tgt_map = build_aligned_map(tgt_data.schema, map);
  const auto src = encode_dataset(truncate_to_week(src_data, 3), map);
  const auto tgt = encode_dataset(truncate_to_week(tgt_data, 3), tgt_map);
  LayerConfig layers;
  layers.embed_dim = 16;
  layers.hidden_dim = 8;
  GritNetModel model = build_model(layers, map, 3);
  TrainConfig tc;
  tc.epochs = 2;
  tc.max_sequence_length = 64;
  train(model, src, tc);
  // Spread the source scores over the theta grid so every theta yields
  // both pseudo-classes.
  {
    const auto feats = pooled_features(model, tgt);
    auto& w = model.params.value("fc.w").data;
    std::vector<double> z;
    for (const auto& f : feats) z.push_back(std::inner_product(f.begin(), f.end(), w.begin(), 0.0));
    double mean = 0, var = 0;
    for (double v : z) mean += v / z.size();
    for (double v : z) var += (v - mean) * (v - mean) / z.size();
    const double scale = 1.5 / std::sqrt(std::max(var, 1e-12));
    for (double& v : w) v *= scale;
    model.params.value("fc.b").data[0] = std::log(0.25 / 0.75) - scale * mean;
  }
  save_model(model, (dir / "source.grit").string());
  const GritNetModel source = load_model((dir / "source.grit").string());
  const auto probs = predict(source, tgt);
  AdaptConfig ac;
  ac.train.epochs = 3;
  ac.train.seed = 11;
  for (double theta : {0.1, 0.2, 0.3, 0.4}) {
    const auto r = domain_adapt(source, tgt, theta, ac);
    bool labels_ok = r.pseudo.labels.size() == tgt.size();
    for (std::size_t k = 0; labels_ok && k < tgt.size(); ++k) {
      labels_ok = r.pseudo.labels[k] == (probs[k] >= theta);
    }
    o.require(labels_ok, "pseudo-labels at theta " + format_double(theta));
    bool frozen_ok = true, fc_moved = false;
    for (const auto& [name, p] : source.params.all()) {
      const auto& q = r.model.params.at(name).value;
      const bool same = q.shape == p.value.shape &&
                        std::memcmp(q.ptr(), p.value.ptr(), q.size() * sizeof(double)) == 0;
      if (group_of(name) == "fc") {
        fc_moved = fc_moved || !same;
      } else {
        frozen_ok = frozen_ok && same;
      }
    }
    o.require(frozen_ok, "non-fc groups changed at theta " + format_double(theta));
    o.require(fc_moved, "fc did not train at theta " + format_double(theta));
    o.detail << " theta " << format_double(theta) << ": " << r.pseudo.positives() << "/"
             << tgt.size() << " positive";
  }
  fs::remove_all(dir);
}

// ------------------------------------------------------------------ 6

void folds(Outcome& o) {
  std::mt19937_64 rng(6);
  int ok = 0;
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n = 25 + rng() % 500;
    const double rate = 0.05 + 0.9 * static_cast<double>(rng() % 1000) / 1000.0;
    std::vector<bool> y(n);
    for (std::size_t k = 0; k < n; ++k) y[k] = static_cast<double>(rng() % 10000) / 10000.0 < rate;
    std::size_t pos = std::count(y.begin(), y.end(), true);
    // stratified_kfold needs five of each class
    for (std::size_t k = 0; pos < 5; ++k) {
      if (!y[k]) { y[k] = true; ++pos; }
    }
    for (std::size_t k = 0; n - pos < 5; ++k) {
      if (y[k]) { y[k] = false; --pos; }
    }
    const auto f = stratified_kfold(y, 5, rng());
    std::vector<int> seen(n, 0);
    bool good = f.size() == 5;
    const double ideal = static_cast<double>(pos) / 5.0;
    for (const auto& fold : f) {
      std::size_t p = 0;
      for (auto i : fold) {
        if (i < n) ++seen[i];
        p += i < n && y[i];
      }
      good = good && std::abs(static_cast<double>(p) - ideal) <= 1.0;
    }
    good = good && std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; });
    ok += good;
  }
  o.detail << " " << ok << "/100 label vectors";
  o.require(ok == 100, "fold balance or partition");
}

// --------------------------------------------------------------- 7 and 8

ExperimentConfig benchmark_config() {
  ExperimentConfig c = default_experiment_config();
  c.weeks = {2, 3, 4};
  c.seeds = {1, 2, 3};
  return c;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

void transfer_benchmark(Outcome& o, const ExperimentResult& r) {
  int seeds_a = 0, seeds_c = 0;
  bool all_b = true;
  for (const auto& run : r.runs) {
    bool a = true;
    for (const auto& row : run.report.rows) {
      const auto& v = row.vanilla.value;
      const auto& g = row.gritnet.value;
      const auto& oracle = row.oracle.value;
      a = a && v && g && *g >= *v;
      const bool b = g && oracle && *oracle >= *g;
      all_b = all_b && b;
      if (!b) o.detail << " [seed " << run.seed << " week " << row.week << ": oracle < gritnet]";
    }
    seeds_a += a;
    std::optional<double> best;
    for (const auto& [theta, m] : mean_arr(run.report, 2, 4)) {
      if (m && (!best || *m > *best)) best = m;
    }
    const bool c = best && *best >= 0.30;
    seeds_c += c;
    o.detail << " seed " << run.seed << ": gritnet>=vanilla " << (a ? "yes" : "no")
             << ", best mean ARR " << (best ? fmt(*best) : std::string("undefined")) << ";";
  }
  o.detail << " (a) " << seeds_a << "/3 (b) " << (all_b ? "yes" : "no") << " (c) " << seeds_c
           << "/3";
  o.require(seeds_a >= 2, "(a)");
  o.require(all_b, "(b)");
  o.require(seeds_c >= 2, "(c)");
}

void determinism(Outcome& o, const fs::path& first, const fs::path& second) {
  const auto m1 = nlohmann::json::parse(read_file((first / "manifest.json").string()));
  const auto m2 = nlohmann::json::parse(read_file((second / "manifest.json").string()));
  const auto& f1 = m1.at("files");
  const auto& f2 = m2.at("files");
  std::size_t checkpoints = 0, reports = 0, differ = 0;
  for (const auto& [name, hash] : f1.items()) {
    if (name.ends_with(".grit")) ++checkpoints;
    if (name.ends_with("report.csv") || name.ends_with("report.json")) ++reports;
    if (!f2.contains(name) || f2.at(name) != hash) ++differ;
  }
  o.detail << " " << f1.size() << " files (" << reports << " reports, " << checkpoints
           << " checkpoints), " << differ << " differ";
  o.require(f1.size() == f2.size(), "file sets differ");
  o.require(differ == 0, "artifact hashes differ");
  o.require(checkpoints > 0 && reports > 0, "no artifacts");
  o.require(file_hash((first / "manifest.json").string()) ==
                file_hash((second / "manifest.json").string()),
            "manifest differs");
}

// ------------------------------------------------------------------ 9

void degenerate(Outcome& o) {
  auto profile = profile_nd_d(0.03);
  const auto data = generate_course(profile, 9);
  const auto map = build_ordinal_map(data.schema);
  LayerConfig layers;
  layers.embed_dim = 6;
  layers.hidden_dim = 3;

  // Week 0 is outside the truncation contract.
  bool week0_raised = false;
  try {
    truncate_to_week(data, 0);
  } catch (const ArgumentError&) {
    week0_raised = true;
  }
  o.require(week0_raised, "week 0 must raise ArgumentError");

  // Students with no events at all.
  auto empty = encode_dataset(data, map);
  for (auto& s : empty) s.events.clear();
  {
    GritNetModel m = build_model(layers, map, 1);
    TrainConfig tc;
    tc.epochs = 1;
    train(m, empty, tc);
    const auto p = predict(m, empty);
    o.require(m.t_max == 1, "t_max for empty sequences");
    o.require(std::all_of(p.begin(), p.end(), [&](double v) { return v == p[0] && v > 0 && v < 1; }),
              "empty sequences score identically");
    o.detail << " empty ok;";
  }

  // Single-event sequences, which are also T=1 batches.
  auto single = encode_dataset(data, map);
  for (auto& s : single) {
    if (s.events.size() > 1) s.events.erase(s.events.begin(), s.events.end() - 1);
  }
  {
    GritNetModel m = build_model(layers, map, 2);
    TrainConfig tc;
    tc.epochs = 2;
    tc.batch_size = 1;
    const auto h = train(m, single, tc);
    o.require(m.t_max == 1, "t_max for single events");
    o.require(std::isfinite(h.train_loss.back()), "single-event loss");
    const auto p = predict(m, std::span(single).first(1));
    o.require(p.size() == 1 && p[0] > 0 && p[0] < 1, "T=1 prediction");
    o.detail << " single-event / T=1 ok;";
  }

  // Single-class pseudo-labels and single-class training data.
  {
    GritNetModel m = build_model(layers, map, 3);
    m.t_max = 4;
    const auto seqs = encode_dataset(data, map);
    AdaptConfig ac;
    ac.train.epochs = 1;
    bool raised = false;
    try {
      domain_adapt(m, seqs, 1e-9, ac);
    } catch (const DataError&) {
      raised = true;
    }
    o.require(raised, "single-class pseudo-labels must raise DataError");
    auto one_class = seqs;
    for (auto& s : one_class) s.label = false;
    raised = false;
    try {
      TrainConfig tc;
      tc.epochs = 1;
      train(m, one_class, tc);
    } catch (const DataError&) {
      raised = true;
    }
    o.require(raised, "single-class training must raise DataError");
    raised = false;
    try {
      auc(std::vector<double>{0.2, 0.4}, {true, true});
    } catch (const UndefinedMetricError&) {
      raised = true;
    }
    o.require(raised, "single-class AUC must be undefined");
    o.detail << " single-class errors ok;";
  }

  // Empty target set and empty cohort.
  {
    GritNetModel m = build_model(layers, map, 4);
    m.t_max = 3;
    o.require(predict(m, std::vector<EncodedSequence>{}).empty(), "empty predict");
    o.require(assign_pseudo_labels(m, std::vector<EncodedSequence>{}, 0.2).sequences.empty(),
              "empty pseudo-label set");
    auto p = profile;
    p.n_students = 0;
    o.require(generate_course(p, CalibratedKnobs{}, 1).students.empty(), "empty cohort");
    o.detail << " empty sets ok";
  }
}

}  // namespace

int main(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));
  std::printf("kernels: %s\n", std::string(kernels::active().name).c_str());
  run(1, 1.0, vocabulary);
  run(2, 30.0, gradients);
  run(3, 5.0, auc_oracle);
  run(4, 0.0, arr_arithmetic);
  run(5, 0.0, freeze_invariant);
  run(6, 0.0, folds);

  if (wanted(7) || wanted(8)) {
    const fs::path root = fs::temp_directory_path() / ("gritnet-accept-" + std::to_string(::getpid()));
    fs::remove_all(root);
    const auto config = benchmark_config();
    std::optional<ExperimentResult> first;
    // The benchmark runs first; its rerun feeds the determinism check.
    const Timed bench = measure([&](Outcome& o) {
      first = run_experiment(config, (root / "first").string(), std::thread::hardware_concurrency());
      transfer_benchmark(o, *first);
    });
    const Timed rerun = measure([&](Outcome& o) {
      o.require(first.has_value(), "benchmark run missing");
      if (!first) return;
      run_experiment(config, (root / "second").string(), 1);
      determinism(o, root / "first", root / "second");
    });
    report(7, rerun.outcome, bench.secs + rerun.secs, 2.0 * 600.0);
    report(8, bench.outcome, bench.secs, 600.0);
    fs::remove_all(root);
  }

  run(9, 0.0, degenerate);
  std::printf("%s\n", failures == 0 ? "all criteria passed" : "some criteria failed");
  return failures == 0 ? 0 : 1;
}
