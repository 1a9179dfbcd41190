#include <doctest.h>

#include <numeric>
#include <random>

#include "shape/errors.hpp"
#include "shape/segmentation.hpp"

using namespace shape;

TEST_CASE("find_cutpoints thresholds strictly on interior tokens") {
  const std::vector<double> h = {0.1, 2.0, 0.1, 3.0, 0.2};
  CHECK(find_cutpoints(h, 1.5) == std::vector<std::size_t>{1, 3});
  CHECK(find_cutpoints(std::vector<double>{0.1, 0.1, 0.1}, 1.5).empty());
  CHECK(find_cutpoints(std::vector<double>{1.5, 1.5, 1.5, 1.5}, 1.5).empty());
  // endpoints never qualify
  CHECK(find_cutpoints(std::vector<double>{9.0, 0.0, 9.0}, 1.0).empty());
  CHECK_THROWS_WITH_AS(find_cutpoints(std::vector<double>{}, 1.0), "empty trajectory",
                       InvalidInput);
}

TEST_CASE("downsample examples") {
  std::vector<double> h(10, 0.0);
  h[1] = 2.0;
  h[3] = 3.0;
  CHECK(downsample(std::vector<std::size_t>{1, 3}, h, 10, 3, 1).boundaries ==
        std::vector<std::size_t>{1, 3});

  const std::vector<double> flat(8, 0.1);
  CHECK(downsample(std::vector<std::size_t>{}, flat, 8, 2, 1).boundaries ==
        std::vector<std::size_t>{4});

  std::vector<double> g(10, 0.0);
  g[4] = 1.6;
  g[5] = 2.9;
  g[6] = 1.7;
  CHECK(downsample(std::vector<std::size_t>{4, 5, 6}, g, 10, 2, 2).boundaries ==
        std::vector<std::size_t>{5});

  CHECK_THROWS_WITH_AS(downsample(std::vector<std::size_t>{}, flat, 3, 4, 1),
                       "too few tokens for K segments", InvalidInput);
}

TEST_CASE("downsample ties go to the earlier index") {
  std::vector<double> h(12, 0.0);
  h[3] = 2.0;
  h[8] = 2.0;
  CHECK(downsample(std::vector<std::size_t>{3, 8}, h, 12, 2, 1).boundaries ==
        std::vector<std::size_t>{3});
}

TEST_CASE("midpoint fill splits the longest segment") {
  std::vector<double> h(16, 0.0);
  h[2] = 5.0;
  // one candidate, K = 3: [0,2) [2,16) -> longest is [2,16), split at 9
  const auto plan = downsample(std::vector<std::size_t>{2}, h, 16, 3, 1);
  CHECK(plan.boundaries == std::vector<std::size_t>{2, 9});
}

TEST_CASE("segment_lengths examples") {
  CHECK(segment_lengths(SegmentPlan{{4}, 2}, 10) == std::vector<std::size_t>{4, 6});
  CHECK(segment_lengths(SegmentPlan{{1, 3}, 3}, 10) == std::vector<std::size_t>{1, 2, 7});
  CHECK(segment_lengths(SegmentPlan{{}, 1}, 7) == std::vector<std::size_t>{7});
}

TEST_CASE("random plans are valid, deterministic and cover the trajectory") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> h(0.0, 4.0);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 1 + rng() % 300;
    const std::size_t k = 1 + rng() % std::min<std::size_t>(n, 20);
    std::vector<double> e(n);
    for (auto& x : e) x = h(rng);
    const double tau = h(rng);
    const auto plan = segment_entropy(e, tau, k);
    CHECK(plan.k == k);
    CHECK(plan_violations(plan, n).empty());
    const auto lengths = segment_lengths(plan, n);
    CHECK(std::accumulate(lengths.begin(), lengths.end(), std::size_t{0}) == n);
    for (auto l : lengths) CHECK(l > 0);
    CHECK(segment_entropy(e, tau, k) == plan);
  }
}

TEST_CASE("raising tau never adds candidates") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> h(0.0, 4.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> e(64);
    for (auto& x : e) x = h(rng);
    std::size_t last = e.size();
    for (double tau = 0.0; tau <= 4.0; tau += 0.25) {
      const auto n = find_cutpoints(e, tau).size();
      CHECK(n <= last);
      last = n;
    }
  }
}

TEST_CASE("default min gap") {
  CHECK(default_min_gap(100, 8) == 3);
  CHECK(default_min_gap(10, 8) == 1);
}
