#include <doctest.h>

#include <cmath>
#include <numeric>

#include "../fixtures.hpp"
#include "shape/errors.hpp"
#include "shape/potential.hpp"
#include "shape/segmentation.hpp"
#include "shape/simulator.hpp"

using namespace shape;
using namespace shape::sim;

TEST_CASE("default chain") {
  const auto env = ChainEnv::make_default();
  CHECK(env_violations(env).empty());
  CHECK(env.n_stages == 8);
  CHECK(env.levels() == 9);
  CHECK(env.solvability_at(3) == 0.375);
  CHECK(env.cost(Action::advance_long) == 32);
  CHECK(env.cost(Action::stall) == 8);
  CHECK(env.step(8, Action::advance_short) == 8);
  CHECK(env.step(0, Action::regress) == 0);

  auto bad = env;
  bad.solvability[4] = 0.0;
  CHECK_FALSE(env_violations(bad).empty());
  bad = env;
  bad.cost_long = bad.cost_short;
  CHECK_FALSE(env_violations(bad).empty());
}

TEST_CASE("policy probabilities sum to one") {
  const auto env = ChainEnv::make_default();
  TabularPolicy p(env.n_stages, env.levels(), 0.7);
  double x = 0.3;
  for (auto& l : p.logits()) l = (x = std::fmod(x * 7.3 + 1.1, 9.0)) - 4.5;
  for (std::size_t s = 0; s < env.n_stages; ++s) {
    for (std::size_t q = 0; q < env.levels(); ++q) {
      const auto pr = p.probabilities(s, q);
      CHECK(std::accumulate(pr.begin(), pr.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("oracle extremes") {
  const auto env = ChainEnv::make_default();
  const SimulatorOracle advance(env, TabularPolicy::always(env, Action::advance_short));
  for (std::uint64_t seed = 0; seed < 200; ++seed) CHECK(advance.rollout_from(0, 0, seed));

  const SimulatorOracle stall(env, TabularPolicy::always(env, Action::stall));
  for (std::uint64_t seed = 0; seed < 200; ++seed) CHECK_FALSE(stall.rollout_from(3, 0, seed));
}

TEST_CASE("exact completion probabilities match the independent recursion") {
  const auto env = ChainEnv::make_default();
  const auto uniform = TabularPolicy::uniform(env);
  for (std::size_t p = 0; p < env.levels(); ++p) {
    CHECK(completion_probability(env, uniform, 0, p) ==
          doctest::Approx(fixtures::kCompletionStage0[p]).epsilon(1e-14));
    CHECK(completion_probability(env, uniform, 4, p) ==
          doctest::Approx(fixtures::kCompletionStage4[p]).epsilon(1e-14));
    CHECK(completion_probability(env, uniform, env.n_stages, p) == env.solvability_at(p));
  }
  const auto stats = policy_stats(env, uniform);
  CHECK(stats.success == doctest::Approx(fixtures::kCompletionStage0[0]).epsilon(1e-14));
  CHECK(stats.mean_tokens == doctest::Approx(8 * (8 + 32 + 8 + 8) / 4.0));
}

TEST_CASE("oracle estimate is unbiased") {
  const auto env = ChainEnv::make_default();
  const auto policy = TabularPolicy::uniform(env);
  const SimulatorOracle oracle(env, policy);
  const std::size_t reps = 2000;
  for (std::size_t p : {0, 4, 8}) {
    double sum = 0.0;
    for (std::size_t r = 0; r < reps; ++r) {
      std::size_t wins = 0;
      for (std::size_t j = 0; j < 8; ++j) wins += oracle.rollout_from(2, p, r * 8 + j) ? 1 : 0;
      sum += wins / 8.0;
    }
    const double exact = completion_probability(env, policy, 2, p);
    const double se = std::sqrt(exact * (1 - exact) / (8.0 * reps));
    CHECK(std::abs(sum / reps - exact) <= 3 * se + 1e-12);
  }
}

TEST_CASE("records replay to the right state") {
  const auto env = ChainEnv::make_default();
  const auto policy = TabularPolicy::uniform(env);
  Rng rng = make_rng(5);
  const auto trace = sample_episode(env, policy, rng);
  const auto rec = to_record(trace, "t");
  CHECK(rec.tokens.size() == trace.total_tokens());
  const SimulatorOracle oracle(env, policy);
  for (std::size_t k = 0; k < trace.steps.size(); ++k) {
    const auto& st = trace.steps[k];
    CHECK(oracle.rollout(rec, st.token_begin, 99) == oracle.rollout_from(k, st.progress_before, 99));
    CHECK(st.true_potential == env.solvability_at(st.progress_before));
    CHECK(on_grid(st.true_potential, env.grid));
  }
  auto unlabeled = rec;
  for (auto& t : unlabeled.tokens) t.text.reset();
  CHECK_THROWS_AS(oracle.rollout(unlabeled, 3, 1), OracleError);
}

TEST_CASE("segmentation recovers the stage boundaries") {
  const auto env = ChainEnv::make_default();
  const auto policy = TabularPolicy::uniform(env);
  const double tau = 0.5 * (env.interior_entropy_hi + env.boundary_entropy_lo);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng = make_rng(seed);
    const auto trace = sample_episode(env, policy, rng);
    const auto plan = segment_entropy(trace.entropies, tau, env.n_stages);
    CHECK(plan == trace.stage_plan());
  }
}

TEST_CASE("sandbag comparison") {
  const auto env = ChainEnv::make_default();
  const auto r = sandbag_comparison(env, ShapingConfig{});
  CHECK(r.monotone_lengths == std::vector<std::size_t>(fixtures::kMonoLengths.begin(),
                                                       fixtures::kMonoLengths.end()));
  CHECK(r.dip_lengths ==
        std::vector<std::size_t>(fixtures::kDipLengths.begin(), fixtures::kDipLengths.end()));
  CHECK(r.mrt_bonus_mono == doctest::Approx(fixtures::kMrtMono).epsilon(1e-14));
  CHECK(r.mrt_bonus_dip == doctest::Approx(fixtures::kMrtDip).epsilon(1e-14));
  CHECK(r.shape_bonus_mono == doctest::Approx(fixtures::kShapeMono).epsilon(1e-14));
  CHECK(r.shape_bonus_dip == doctest::Approx(fixtures::kShapeDip).epsilon(1e-14));
  CHECK(r.shape_bonus_mono_equal_length ==
        doctest::Approx(fixtures::kShapeMonoEqual).epsilon(1e-14));
  CHECK(r.shape_bonus_dip_equal_length ==
        doctest::Approx(fixtures::kShapeDipEqual).epsilon(1e-14));
  CHECK(r.mrt_rewards_dip());
  CHECK(r.shape_penalizes_dip());

  ShapingConfig flat;
  flat.fixed_gamma = 1.0;
  const auto t = sandbag_comparison(env, flat);
  CHECK(t.shape_bonus_mono == doctest::Approx(0.3));
  CHECK(t.shape_bonus_dip == doctest::Approx(0.3));

  const std::vector<double> path = {0, .25, .5, .75, 1};
  const auto same = sandbag_comparison(env, ShapingConfig{}, path, path);
  CHECK(same.mrt_bonus_mono == same.mrt_bonus_dip);
  CHECK(same.shape_bonus_mono == same.shape_bonus_dip);
}

TEST_CASE("drop rate") {
  CHECK(potential_drop_rate(std::vector<double>{0, .5, .25, .75}) == doctest::Approx(1.0 / 3));
  CHECK(potential_drop_rate(std::vector<double>{0.5}) == 0.0);
}

TEST_CASE("zero advantages leave the policy unchanged") {
  const auto env = ChainEnv::make_default();
  TrainOptions o;
  o.zero_advantage = true;
  const auto r = train(env, Estimator::shape, 200, 1, ShapingConfig{}, o);
  CHECK(r.policy == TabularPolicy::uniform(env));
}

TEST_CASE("training is deterministic per seed") {
  const auto env = ChainEnv::make_default();
  const auto a = train(env, Estimator::mrt, 400, 7, ShapingConfig{});
  const auto b = train(env, Estimator::mrt, 400, 7, ShapingConfig{});
  REQUIRE(a.curve.size() == b.curve.size());
  for (std::size_t i = 0; i < a.curve.size(); ++i) {
    CHECK(a.curve[i].success_rate == b.curve[i].success_rate);
    CHECK(a.curve[i].mean_tokens == b.curve[i].mean_tokens);
    CHECK(a.curve[i].potential_drop_rate == b.curve[i].potential_drop_rate);
  }
  CHECK(a.policy == b.policy);
  CHECK(a.curve.size() == 8);
  CHECK(a.curve.back().episode_end == 400);
}

TEST_CASE("GRPO training beats the random policy") {
  const auto env = ChainEnv::make_default();
  const double baseline = policy_stats(env, TabularPolicy::uniform(env)).success;
  const auto r = train(env, Estimator::grpo, 3000, 3, ShapingConfig{});
  CHECK(r.final_stats.success > baseline + 0.2);
}

TEST_CASE("divergence guard") {
  const auto env = ChainEnv::make_default();
  TrainOptions o;
  o.learning_rate = 50.0;
  o.max_logit = 1.0;
  CHECK_THROWS_AS(train(env, Estimator::grpo, 400, 1, ShapingConfig{}, o), DivergenceError);
  CHECK_THROWS_AS(train(env, Estimator::grpo, 0, 1, ShapingConfig{}), InvalidInput);
}

TEST_CASE("simulator config defaults yield to explicit keys") {
  const auto env = ChainEnv::make_default();
  auto c = simulator_config(env, ShapingConfig{});
  CHECK(c.l_ref == 32.0);
  CHECK(c.outcome_mode == OutcomeMode::group);
  REQUIRE(c.tau);
  ShapingConfig e;
  set_config_value(e, "l_ref", "64");
  set_config_value(e, "outcome_mode", "raw");
  c = simulator_config(env, e);
  CHECK(c.l_ref == 64.0);
  CHECK(c.outcome_mode == OutcomeMode::raw);
}
