#include <random>

#include "doctest.h"
#include "gradcheck.hpp"
#include "gritnet/error.hpp"
#include "gritnet/kernels.hpp"
#include "test_util.hpp"

using namespace gritnet;

namespace {

constexpr double kTol = 1e-4;

void check_all_seeds(gradcheck::Result (*fn)(std::uint64_t)) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto r = fn(seed);
    CAPTURE(seed);
    CHECK(r.checked > 0);
    CHECK(r.max_rel <= kTol);
  }
}

}  // namespace

TEST_SUITE("layers") {

TEST_CASE("embedding gradient") { check_all_seeds(&gradcheck::embedding); }
TEST_CASE("lstm cell gradient") { check_all_seeds(&gradcheck::lstm_cell); }
TEST_CASE("bilstm gradient") { check_all_seeds(&gradcheck::bilstm); }
TEST_CASE("projected-input lstm gradient") { check_all_seeds(&gradcheck::lstm_projected); }
TEST_CASE("max pool gradient") { check_all_seeds(&gradcheck::max_pool); }
TEST_CASE("fc + sigmoid + bce gradient") { check_all_seeds(&gradcheck::fc_sigmoid_bce); }
TEST_CASE("composed model gradient") { check_all_seeds(&gradcheck::composed); }

TEST_CASE("composed gradient holds under the scalar kernels too") {
  const auto before = kernels::active().isa;
  kernels::select(kernels::Isa::kScalar);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) CHECK(gradcheck::composed(seed).max_rel <= kTol);
  kernels::select(before);
}

TEST_CASE("projected sequence forward equals the x-input form") {
  std::mt19937_64 rng(3);
  const std::size_t E = 5, H = 4, T = 7;
  const auto wx = testutil::random_vector(rng, 4 * H * E), wh = testutil::random_vector(rng, 4 * H * H);
  const auto b = testutil::random_vector(rng, 4 * H);
  const LstmWeights w{wx.data(), wh.data(), b.data(), E, H};
  auto x = testutil::random_vector(rng, T * E);
  std::vector<bool> zero(T, false);
  zero[0] = zero[1] = true;
  std::fill(x.begin(), x.begin() + 2 * E, 0.0);
  std::vector<double> xin(T * 4 * H, 0.0);
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t r = 0; r < 4 * H; ++r) {
      for (std::size_t k = 0; k < E; ++k) xin[t * 4 * H + r] += wx[r * E + k] * x[t * E + k];
    }
  }
  for (bool reverse : {false, true}) {
    LstmTrace a, p;
    lstm_sequence_forward(x, zero, w, reverse, a);
    lstm_sequence_forward_projected(xin, zero, w, reverse, p);
    for (std::size_t i = 0; i < a.h.size(); ++i) CHECK(a.h[i] == doctest::Approx(p.h[i]).epsilon(1e-12));
  }
}

TEST_CASE("embedding padding is a zero vector") {
  Tensor table({5, 2}, {1, 2, 3, 4, 5, 6, 7, 8, 9, 10});
  std::vector<EncodedEvent> row = {kPadding, {1, 0}};
  std::vector<double> out(4);
  embedding_forward(row, table, 3, out);
  CHECK(out[0] == 0.0);
  CHECK(out[1] == 0.0);
  // action 1 plus delta row 3 + 0
  CHECK(out[2] == 3 + 7);
  CHECK(out[3] == 4 + 8);
}

TEST_CASE("max pool takes the earliest of tied maxima") {
  std::vector<double> x = {1, 5, 3, 5, 3, 2};  // T=3, F=2
  std::vector<double> out(2);
  std::vector<std::size_t> arg;
  global_max_pool(x, 3, 2, out, arg);
  CHECK(out == std::vector<double>{3, 5});
  CHECK(arg == std::vector<std::size_t>{1, 0});
  CHECK_THROWS_AS(global_max_pool(x, 0, 2, out, arg), ArgumentError);
}

TEST_CASE("bce clamps and stays finite") {
  CHECK(std::isfinite(bce_single(0.0, true)));
  CHECK(std::isfinite(bce_single(1.0, false)));
  CHECK(bce_single(0.0, true) == doctest::Approx(-std::log(kBceClamp)));
  CHECK(bce_loss(std::vector<double>{0.5, 0.5}, {true, false}) == doctest::Approx(std::log(2.0)));
}

TEST_CASE("forget gate bias starts at one") {
  const auto map = build_ordinal_map(testutil::small_schema(2, 1, 1));
  LayerConfig layers;
  layers.embed_dim = 4;
  layers.hidden_dim = 3;
  const auto m = build_model(layers, map, 7);
  for (const char* g : {"lstm_fwd.b", "lstm_bwd.b"}) {
    const auto& b = m.params.value(g).data;
    for (std::size_t k = 0; k < 3; ++k) {
      CHECK(b[k] == 0.0);
      CHECK(b[3 + k] == 1.0);
    }
  }
  const double bound = 1.0 / std::sqrt(static_cast<double>(map.vocab_size()));
  for (double v : m.params.value("embedding").data) CHECK(std::abs(v) <= bound);
}

}  // TEST_SUITE
