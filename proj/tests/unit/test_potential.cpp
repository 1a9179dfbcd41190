#include <doctest.h>

#include <set>

#include "shape/config.hpp"
#include "shape/errors.hpp"
#include "shape/potential.hpp"

using namespace shape;

namespace {

// Succeeds on a fixed set of seeds.
class SeedSetOracle : public RolloutOracle {
 public:
  explicit SeedSetOracle(std::set<std::uint64_t> wins) : wins_(std::move(wins)) {}
  bool rollout(const TrajectoryRecord&, std::size_t, std::uint64_t seed) const override {
    return wins_.count(seed) != 0;
  }
  std::string name() const override { return "seed-set"; }

 private:
  std::set<std::uint64_t> wins_;
};

class ConstOracle : public RolloutOracle {
 public:
  explicit ConstOracle(bool v) : v_(v) {}
  bool rollout(const TrajectoryRecord&, std::size_t, std::uint64_t) const override { return v_; }
  std::string name() const override { return "const"; }

 private:
  bool v_;
};

class BrokenOracle : public RolloutOracle {
 public:
  bool rollout(const TrajectoryRecord&, std::size_t, std::uint64_t) const override {
    throw std::runtime_error("offline");
  }
  std::string name() const override { return "broken"; }
};

// Success iff (boundary * 31 + seed) is divisible by 3.
class HashOracle : public RolloutOracle {
 public:
  bool rollout(const TrajectoryRecord&, std::size_t boundary, std::uint64_t seed) const override {
    return (boundary * 31 + seed) % 3 == 0;
  }
  std::string name() const override { return "hash"; }
};

TrajectoryRecord record(std::size_t n, int outcome) {
  TrajectoryRecord r;
  r.id = "p";
  r.tokens.assign(n, TokenInfo{0.5, std::nullopt, true});
  r.outcome = outcome;
  return r;
}

}  // namespace

TEST_CASE("estimate_potential averages oracle outcomes over the seed range") {
  const auto r = record(10, 1);
  CHECK(estimate_potential(r, 0, SeedSetOracle({100, 103, 107}), 8, 100) == 0.375);
  CHECK(estimate_potential(r, 3, ConstOracle(false), 8, 0) == 0.0);
  CHECK(estimate_potential(r, 3, ConstOracle(true), 1, 0) == 1.0);
  CHECK_THROWS_AS(estimate_potential(r, 3, ConstOracle(true), 0, 0), InvalidInput);
  CHECK_THROWS_AS(estimate_potential(r, 11, ConstOracle(true), 4, 0), InvalidInput);
}

TEST_CASE("oracle failures name the boundary") {
  const auto r = record(10, 1);
  CHECK_THROWS_WITH_AS(estimate_potential(r, 4, BrokenOracle(), 2, 0),
                       doctest::Contains("oracle unavailable at boundary 4"), OracleError);
}

TEST_CASE("estimate is order independent in the seed range") {
  // the potential is a count; any permutation of the winning seeds gives it
  const auto r = record(10, 1);
  CHECK(estimate_potential(r, 0, SeedSetOracle({0, 1, 2}), 8, 0) ==
        estimate_potential(r, 0, SeedSetOracle({7, 5, 3}), 8, 0));
}

TEST_CASE("build_profile from logs overwrites the terminal entry") {
  ShapingConfig c;
  const SegmentPlan plan{{3, 6}, 3};
  auto r = record(10, 1);
  r.boundary_potentials = std::vector<double>{0, .25, .5, 1};
  auto p = build_profile(r, plan, nullptr, c);
  CHECK(p.values == std::vector<double>{0, .25, .5, 1});
  CHECK(p.source == PotentialSource::log);
  CHECK(p.source_of(3) == PotentialSource::terminal_outcome);

  r.outcome = 0;
  p = build_profile(r, plan, nullptr, c);
  CHECK(p.values == std::vector<double>{0, .25, .5, 0});

  r.boundary_potentials = std::vector<double>{0, .25, 1};
  CHECK_THROWS_AS(build_profile(r, plan, nullptr, c), DimensionError);
}

TEST_CASE("build_profile from an oracle") {
  ShapingConfig c;
  const auto r = record(10, 1);
  const ConstOracle always(true);
  const auto p = build_profile(r, SegmentPlan{{5}, 2}, &always, c);
  CHECK(p.values == std::vector<double>{1, 1, 1});
  CHECK(p.source == PotentialSource::oracle);
  CHECK(p.m == 8);

  CHECK_THROWS_WITH_AS(build_profile(r, SegmentPlan{{5}, 2}, nullptr, c),
                       doctest::Contains("no potential source"), InvalidInput);
}

TEST_CASE("profiles are seed-deterministic, on the grid and end at the outcome") {
  ShapingConfig c;
  const HashOracle oracle;
  for (int outcome : {0, 1}) {
    const auto r = record(40, outcome);
    const SegmentPlan plan{{5, 10, 20, 30}, 5};
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto a = build_profile(r, plan, &oracle, c, seed);
      const auto b = build_profile(r, plan, &oracle, c, seed);
      CHECK(a.values == b.values);
      CHECK(a.values.back() == static_cast<double>(outcome));
      for (double v : a.values) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
        CHECK(on_grid(v, 8));
      }
    }
  }
}

TEST_CASE("boundary seed ranges do not overlap") {
  for (std::size_t m : {1, 4, 8}) {
    for (std::size_t k = 0; k < 10; ++k) {
      CHECK(boundary_seed(100, k + 1, m) - boundary_seed(100, k, m) == m);
    }
  }
}
