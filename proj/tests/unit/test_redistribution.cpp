#include <doctest.h>

#include <numeric>
#include <random>

#include "../fixtures.hpp"
#include "shape/config.hpp"
#include "shape/errors.hpp"
#include "shape/redistribution.hpp"

using namespace shape;

namespace {

std::vector<TokenInfo> tokens_of(const std::vector<double>& h) {
  std::vector<TokenInfo> out;
  for (double x : h) out.push_back(TokenInfo{x, std::nullopt, true});
  return out;
}

}  // namespace

TEST_CASE("entropy weights examples") {
  const WeightParams p;
  for (double w : entropy_weights(std::vector<double>{1.3, 1.3, 1.3}, p)) CHECK(w == 1.0);
  WeightParams off = p;
  off.beta = 0.0;
  for (double w : entropy_weights(std::vector<double>{0.1, 3.0, 0.7}, off)) CHECK(w == 1.0);
  const auto w = entropy_weights(std::vector<double>{0.0, 2.0}, p);
  CHECK(w[0] == doctest::Approx(fixtures::kWeightsZeroTwo[0]).epsilon(1e-14));
  CHECK(w[1] == doctest::Approx(fixtures::kWeightsZeroTwo[1]).epsilon(1e-14));
  CHECK(entropy_weights(std::vector<double>{4.2}, p) == std::vector<double>{1.0});
  CHECK_THROWS_WITH_AS(entropy_weights(std::vector<double>{}, p), "segment has no valid tokens",
                       InvalidInput);
}

TEST_CASE("clipping at the bounds") {
  const WeightParams p{2.0, 0.5, 1.5, 1e-6};
  const auto w = entropy_weights(std::vector<double>{0, 0, 0, 10}, p);
  CHECK(w[3] == 1.5);
  CHECK(w[0] == 0.5);
}

TEST_CASE("unclipped weights average to one") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> h(0.0, 5.0);
  const WeightParams p;
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> e(2 + rng() % 40);
    for (auto& x : e) x = h(rng);
    const auto w = raw_entropy_weights(e, p);
    const double mean = std::accumulate(w.begin(), w.end(), 0.0) / static_cast<double>(w.size());
    CHECK(mean == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("invalid tokens are excluded from statistics and weighted 1") {
  auto toks = tokens_of({0.0, 2.0, 100.0});
  toks[2].valid = false;
  const auto w = segment_weights(toks, WeightParams{});
  CHECK(w[0] == doctest::Approx(fixtures::kWeightsZeroTwo[0]));
  CHECK(w[1] == doctest::Approx(fixtures::kWeightsZeroTwo[1]));
  CHECK(w[2] == 1.0);

  auto none = tokens_of({1.0, 2.0});
  for (auto& t : none) t.valid = false;
  CHECK(segment_weights(none, WeightParams{}) == std::vector<double>{1.0, 1.0});
}

TEST_CASE("redistribute examples") {
  ShapingConfig c;
  const auto toks = tokens_of({0.1, 3.0, 0.2, 0.1, 2.5, 0.3});
  const SegmentPlan plan{{3}, 2};
  for (double a : redistribute(std::vector<double>{0.0, 0.0}, plan, toks, c)) CHECK(a == 0.0);

  c.beta = 0.0;
  CHECK(redistribute(std::vector<double>{0.7, -0.2}, plan, toks, c) ==
        std::vector<double>{0.7, 0.7, 0.7, -0.2, -0.2, -0.2});

  ShapingConfig no_tcr;
  no_tcr.tcr = false;
  CHECK(redistribute(std::vector<double>{0.7, -0.2}, plan, toks, no_tcr) ==
        std::vector<double>{0.7, 0.7, 0.7, -0.2, -0.2, -0.2});

  // single-token segment keeps its anchor
  const SegmentPlan single{{1}, 2};
  CHECK(redistribute(std::vector<double>{0.4, 1.0}, single, toks, ShapingConfig{})[0] == 0.4);

  CHECK_THROWS_AS(redistribute(std::vector<double>{0.4}, plan, toks, ShapingConfig{}),
                  DimensionError);
}

TEST_CASE("bounded and sign preserving") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> h(0.0, 5.0), a(-2.0, 2.0);
  ShapingConfig c;
  c.beta = 1.5;
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<double> e(3 + rng() % 60);
    for (auto& x : e) x = h(rng);
    const auto toks = tokens_of(e);
    const std::size_t cut = 1 + rng() % (e.size() - 1);
    const SegmentPlan plan{{cut}, 2};
    const std::vector<double> seg = {a(rng), a(rng)};
    const auto out = redistribute(seg, plan, toks, c);
    REQUIRE(out.size() == e.size());
    for (std::size_t t = 0; t < out.size(); ++t) {
      const double ak = t < cut ? seg[0] : seg[1];
      const double lo = std::min(ak * c.delta_min, ak * c.delta_max);
      const double hi = std::max(ak * c.delta_min, ak * c.delta_max);
      CHECK(out[t] >= lo - 1e-15);
      CHECK(out[t] <= hi + 1e-15);
      CHECK((out[t] > 0) == (ak > 0));
      CHECK((out[t] < 0) == (ak < 0));
    }
  }
}
