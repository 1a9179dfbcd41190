#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "shape/potential.hpp"
#include "shape/trajectory.hpp"

namespace shape::sim {

enum class Action : std::uint8_t { advance_short, advance_long, stall, regress };
inline constexpr std::size_t kActionCount = 4;
inline constexpr std::array<Action, kActionCount> kActions = {
    Action::advance_short, Action::advance_long, Action::stall, Action::regress};

std::string to_string(Action action);
Action parse_action(const std::string& name);

// "Solvability chain": n_stages decisions, each moving a progress level
// p in [0, max_progress] by +1, 0 or -1 and emitting a block of tokens. The
// episode succeeds with probability solvability[p_final].
struct ChainEnv {
  std::size_t n_stages = 8;
  std::size_t max_progress = 8;
  std::size_t grid = 8;  // solvability values are multiples of 1/grid
  std::vector<double> solvability;  // size max_progress + 1
  std::size_t cost_short = 8;
  std::size_t cost_long = 32;
  std::size_t start_progress = 0;

  // Synthetic entropies: the first token of every stage draws from the high
  // band, every other token from the low band.
  double boundary_entropy_lo = 2.5;
  double boundary_entropy_hi = 3.5;
  double interior_entropy_lo = 0.05;
  double interior_entropy_hi = 0.8;

  // n_stages = P = grid = 8, c_s = 8, c_l = 32, solvability(p) = p / P.
  static ChainEnv make_default();

  std::size_t levels() const { return max_progress + 1; }
  double solvability_at(std::size_t progress) const { return solvability.at(progress); }
  std::size_t cost(Action action) const {
    return action == Action::advance_long ? cost_long : cost_short;
  }
  std::size_t step(std::size_t progress, Action action) const;
};

std::vector<std::string> env_violations(const ChainEnv& env);

// Softmax policy over logits indexed by (stage, progress, action).
class TabularPolicy {
 public:
  TabularPolicy(std::size_t n_stages, std::size_t levels, double temperature = 1.0);
  static TabularPolicy uniform(const ChainEnv& env) {
    return TabularPolicy(env.n_stages, env.levels());
  }

  std::size_t n_stages() const { return n_stages_; }
  std::size_t levels() const { return levels_; }
  double temperature() const { return temperature_; }

  double& logit(std::size_t stage, std::size_t progress, Action action);
  double logit(std::size_t stage, std::size_t progress, Action action) const;
  std::array<double, kActionCount> probabilities(std::size_t stage,
                                                 std::size_t progress) const;
  const std::vector<double>& logits() const { return logits_; }
  std::vector<double>& logits() { return logits_; }

  // Sets one action's logit to `strength` and the rest to 0 in every state.
  static TabularPolicy always(const ChainEnv& env, Action action, double strength = 50.0);

  bool operator==(const TabularPolicy&) const = default;

 private:
  std::size_t index(std::size_t stage, std::size_t progress, Action action) const;

  std::size_t n_stages_;
  std::size_t levels_;
  double temperature_;
  std::vector<double> logits_;
};

struct StageStep {
  Action action;
  std::size_t progress_before;
  std::size_t progress_after;
  std::size_t token_begin;
  std::size_t token_count;
  double true_potential;  // solvability at progress_before
};

struct EpisodeTrace {
  std::vector<StageStep> steps;
  std::vector<double> entropies;
  int outcome = 0;

  std::size_t total_tokens() const { return entropies.size(); }
  // Segment plan that puts one segment on each stage.
  SegmentPlan stage_plan() const;
};

using Rng = std::mt19937_64;

// Seeded engine with splitmix64 scrambling so that nearby seeds decorrelate.
Rng make_rng(std::uint64_t seed);
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

Action sample_action(const TabularPolicy& policy, std::size_t stage,
                     std::size_t progress, Rng& rng);

EpisodeTrace sample_episode(const ChainEnv& env, const TabularPolicy& policy, Rng& rng);

// Plays stages [stage, n_stages) from `progress` under the policy, then draws
// the terminal outcome.
bool complete_from(const ChainEnv& env, const TabularPolicy& policy,
                   std::size_t stage, std::size_t progress, Rng& rng);

// Exact completion probability by backward dynamic programming.
double completion_probability(const ChainEnv& env, const TabularPolicy& policy,
                              std::size_t stage, std::size_t progress);

struct PolicyStats {
  double success;     // probability of a successful episode
  double mean_tokens;  // expected episode length in tokens
};
PolicyStats policy_stats(const ChainEnv& env, const TabularPolicy& policy);

// Record view of a trace: the first token of every stage carries the action
// name as its text label, which is what SimulatorOracle replays.
TrajectoryRecord to_record(const EpisodeTrace& trace, const std::string& id,
                           const std::optional<std::string>& group_id = std::nullopt);

// Oracle backed by the chain: replays the labelled prefix of a record to a
// (stage, progress) state, then completes the episode under the policy.
class SimulatorOracle : public RolloutOracle {
 public:
  SimulatorOracle(ChainEnv env, TabularPolicy policy);

  bool rollout(const TrajectoryRecord& record, std::size_t boundary,
               std::uint64_t seed) const override;
  std::string name() const override { return "simulator"; }

  bool rollout_from(std::size_t stage, std::size_t progress, std::uint64_t seed) const;

  const ChainEnv& env() const { return env_; }
  const TabularPolicy& policy() const { return policy_; }

 private:
  ChainEnv env_;
  TabularPolicy policy_;
};

// Total shaping bonus (outcome term excluded) of two fixed successful
// potential paths under MRT and SHAPE. Segment lengths follow the chain's
// token cost: a segment moving the potential by d grid levels runs
// max(1, d) short actions.
struct SandbagReport {
  std::vector<double> monotone_path;
  std::vector<double> dip_path;
  std::vector<std::size_t> monotone_lengths;
  std::vector<std::size_t> dip_lengths;
  double mrt_bonus_mono = 0.0;
  double mrt_bonus_dip = 0.0;
  double shape_bonus_mono = 0.0;
  double shape_bonus_dip = 0.0;
  // Same paths with every segment forced to one length at gamma_min.
  double shape_bonus_mono_equal_length = 0.0;
  double shape_bonus_dip_equal_length = 0.0;

  bool mrt_rewards_dip() const { return mrt_bonus_dip >= mrt_bonus_mono; }
  bool shape_penalizes_dip() const { return shape_bonus_dip < shape_bonus_mono; }
};

std::vector<std::size_t> path_lengths(const ChainEnv& env, const std::vector<double>& path);

SandbagReport sandbag_comparison(const ChainEnv& env, const ShapingConfig& config,
                                 std::vector<double> monotone = {0, .25, .5, .75, 1},
                                 std::vector<double> dip = {0, .5, 0, .75, 1});

// Score-function learner settings.
struct TrainOptions {
  double learning_rate = 0.1;  // step on the group-mean gradient
  std::size_t group_size = 8;  // episodes per update (one GRPO group)
  std::size_t window = 50;     // episodes per metric window
  double max_logit = 60.0;     // divergence guard
  bool zero_advantage = false;  // replace every advantage by 0
};

struct WindowMetrics {
  std::size_t episode_end = 0;  // exclusive
  double success_rate = 0.0;
  double mean_tokens = 0.0;
  double potential_drop_rate = 0.0;
};

struct TrainResult {
  std::vector<WindowMetrics> curve;
  TabularPolicy policy;
  PolicyStats final_stats;  // exact, from the trained policy
};

// Fraction of adjacent boundary pairs with Phi(s_{k+1}) < Phi(s_k) among
// the K estimated boundary potentials; the terminal outcome is not included.
double potential_drop_rate(std::span<const double> profile);

TrainResult train(const ChainEnv& env, Estimator estimator, std::size_t episodes,
                  std::uint64_t seed, const ShapingConfig& config,
                  const TrainOptions& options = TrainOptions{});

// Simulator defaults for keys not set explicitly: l_ref = c_l, m = grid,
// K = n_stages, tau between the entropy bands, group-normalized outcome.
ShapingConfig simulator_config(const ChainEnv& env, ShapingConfig config);

}  // namespace shape::sim
