#include "shape/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "shape/errors.hpp"
#include "shape/shaping.hpp"

namespace shape::sim {

std::string to_string(Action action) {
  switch (action) {
    case Action::advance_short:
      return "advance_short";
    case Action::advance_long:
      return "advance_long";
    case Action::stall:
      return "stall";
    case Action::regress:
      return "regress";
  }
  return "unknown";
}

Action parse_action(const std::string& name) {
  for (Action a : kActions) {
    if (to_string(a) == name) return a;
  }
  throw InvalidInput("unknown action '" + name + "'");
}

ChainEnv ChainEnv::make_default() {
  ChainEnv env;
  env.solvability.resize(env.levels());
  for (std::size_t p = 0; p < env.levels(); ++p) {
    env.solvability[p] = static_cast<double>(p) / static_cast<double>(env.max_progress);
  }
  return env;
}

std::size_t ChainEnv::step(std::size_t progress, Action action) const {
  switch (action) {
    case Action::advance_short:
    case Action::advance_long:
      return std::min(progress + 1, max_progress);
    case Action::stall:
      return progress;
    case Action::regress:
      return progress == 0 ? 0 : progress - 1;
  }
  return progress;
}

std::vector<std::string> env_violations(const ChainEnv& env) {
  std::vector<std::string> out;
  if (env.n_stages == 0) out.push_back("n_stages must be >= 1");
  if (env.grid == 0) out.push_back("grid must be >= 1");
  if (env.solvability.size() != env.levels()) {
    out.push_back("solvability map needs max_progress + 1 entries");
  } else {
    for (std::size_t p = 0; p < env.levels(); ++p) {
      const double v = env.solvability[p];
      if (!(v >= 0.0 && v <= 1.0) || !on_grid(v, env.grid)) {
        out.push_back("solvability(" + std::to_string(p) + ") not on the 1/grid lattice in [0,1]");
      }
      if (p > 0 && v < env.solvability[p - 1]) {
        out.push_back("solvability map must be non-decreasing");
      }
    }
  }
  if (!(env.cost_long > env.cost_short && env.cost_short >= 1)) {
    out.push_back("token costs must satisfy cost_long > cost_short >= 1");
  }
  if (env.start_progress > env.max_progress) out.push_back("start_progress above max_progress");
  if (!(env.interior_entropy_hi < env.boundary_entropy_lo)) {
    out.push_back("interior entropy band must lie below the boundary band");
  }
  return out;
}

// ---------------------------------------------------------------------------
// Policy

TabularPolicy::TabularPolicy(std::size_t n_stages, std::size_t levels, double temperature)
    : n_stages_(n_stages),
      levels_(levels),
      temperature_(temperature),
      logits_(n_stages * levels * kActionCount, 0.0) {
  if (!(temperature > 0.0)) throw InvalidInput("temperature must be positive");
}

std::size_t TabularPolicy::index(std::size_t stage, std::size_t progress, Action action) const {
  return (stage * levels_ + progress) * kActionCount + static_cast<std::size_t>(action);
}

double& TabularPolicy::logit(std::size_t stage, std::size_t progress, Action action) {
  return logits_.at(index(stage, progress, action));
}

double TabularPolicy::logit(std::size_t stage, std::size_t progress, Action action) const {
  return logits_.at(index(stage, progress, action));
}

std::array<double, kActionCount> TabularPolicy::probabilities(std::size_t stage,
                                                              std::size_t progress) const {
  std::array<double, kActionCount> p{};
  const double* z = &logits_[index(stage, progress, Action::advance_short)];
  const double top = *std::max_element(z, z + kActionCount);
  double sum = 0.0;
  for (std::size_t a = 0; a < kActionCount; ++a) {
    p[a] = std::exp((z[a] - top) / temperature_);
    sum += p[a];
  }
  for (double& x : p) x /= sum;
  return p;
}

TabularPolicy TabularPolicy::always(const ChainEnv& env, Action action, double strength) {
  TabularPolicy policy(env.n_stages, env.levels());
  for (std::size_t s = 0; s < env.n_stages; ++s) {
    for (std::size_t p = 0; p < env.levels(); ++p) policy.logit(s, p, action) = strength;
  }
  return policy;
}

// ---------------------------------------------------------------------------
// Sampling

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  // splitmix64 finalizer over a combined word
  std::uint64_t z = a + 0x9E3779B97F4A7C15ULL * (b + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

Rng make_rng(std::uint64_t seed) { return Rng(mix_seed(seed, 0x5eed)); }

namespace {

double uniform01(Rng& rng) { return std::generate_canonical<double, 53>(rng); }

// Cumulative action probabilities for every state, built once per policy.
class ActionTable {
 public:
  ActionTable(const TabularPolicy& policy) : levels_(policy.levels()) {
    cdf_.resize(policy.n_stages() * levels_);
    for (std::size_t s = 0; s < policy.n_stages(); ++s) {
      for (std::size_t p = 0; p < levels_; ++p) {
        const auto probs = policy.probabilities(s, p);
        auto& c = cdf_[s * levels_ + p];
        std::partial_sum(probs.begin(), probs.end(), c.begin());
      }
    }
  }

  Action sample(std::size_t stage, std::size_t progress, Rng& rng) const {
    const auto& c = cdf_[stage * levels_ + progress];
    const double u = uniform01(rng) * c.back();
    for (std::size_t a = 0; a + 1 < kActionCount; ++a) {
      if (u < c[a]) return kActions[a];
    }
    return kActions.back();
  }

 private:
  std::size_t levels_;
  std::vector<std::array<double, kActionCount>> cdf_;
};

bool terminal_draw(const ChainEnv& env, std::size_t progress, Rng& rng) {
  return uniform01(rng) < env.solvability_at(progress);
}

bool complete_with(const ChainEnv& env, const ActionTable& table, std::size_t stage,
                   std::size_t progress, Rng& rng) {
  for (std::size_t s = stage; s < env.n_stages; ++s) {
    progress = env.step(progress, table.sample(s, progress, rng));
  }
  return terminal_draw(env, progress, rng);
}

EpisodeTrace episode_with(const ChainEnv& env, const ActionTable& table, Rng& rng) {
  EpisodeTrace trace;
  std::size_t progress = env.start_progress;
  for (std::size_t s = 0; s < env.n_stages; ++s) {
    const Action a = table.sample(s, progress, rng);
    StageStep step{a, progress, env.step(progress, a), trace.entropies.size(), env.cost(a),
                   env.solvability_at(progress)};
    for (std::size_t t = 0; t < step.token_count; ++t) {
      const double u = uniform01(rng);
      trace.entropies.push_back(
          t == 0 ? env.boundary_entropy_lo + u * (env.boundary_entropy_hi - env.boundary_entropy_lo)
                 : env.interior_entropy_lo + u * (env.interior_entropy_hi - env.interior_entropy_lo));
    }
    progress = step.progress_after;
    trace.steps.push_back(step);
  }
  trace.outcome = terminal_draw(env, progress, rng) ? 1 : 0;
  return trace;
}

}  // namespace

Action sample_action(const TabularPolicy& policy, std::size_t stage, std::size_t progress,
                     Rng& rng) {
  const auto probs = policy.probabilities(stage, progress);
  double u = uniform01(rng);
  for (std::size_t a = 0; a + 1 < kActionCount; ++a) {
    if (u < probs[a]) return kActions[a];
    u -= probs[a];
  }
  return kActions.back();
}

EpisodeTrace sample_episode(const ChainEnv& env, const TabularPolicy& policy, Rng& rng) {
  return episode_with(env, ActionTable(policy), rng);
}

bool complete_from(const ChainEnv& env, const TabularPolicy& policy, std::size_t stage,
                   std::size_t progress, Rng& rng) {
  return complete_with(env, ActionTable(policy), stage, progress, rng);
}

SegmentPlan EpisodeTrace::stage_plan() const {
  SegmentPlan plan;
  plan.k = steps.size();
  for (std::size_t s = 1; s < steps.size(); ++s) plan.boundaries.push_back(steps[s].token_begin);
  return plan;
}

// ---------------------------------------------------------------------------
// Exact dynamic programming

namespace {

// values[s][p]: completion probability from stage s at progress p.
std::vector<std::vector<double>> completion_table(const ChainEnv& env,
                                                  const TabularPolicy& policy) {
  std::vector<std::vector<double>> v(env.n_stages + 1, std::vector<double>(env.levels()));
  v[env.n_stages] = env.solvability;
  for (std::size_t s = env.n_stages; s-- > 0;) {
    for (std::size_t p = 0; p < env.levels(); ++p) {
      const auto probs = policy.probabilities(s, p);
      double acc = 0.0;
      for (std::size_t a = 0; a < kActionCount; ++a) {
        acc += probs[a] * v[s + 1][env.step(p, kActions[a])];
      }
      v[s][p] = acc;
    }
  }
  return v;
}

}  // namespace

double completion_probability(const ChainEnv& env, const TabularPolicy& policy,
                              std::size_t stage, std::size_t progress) {
  if (stage > env.n_stages || progress > env.max_progress) {
    throw InvalidInput("state outside the chain");
  }
  return completion_table(env, policy)[stage][progress];
}

PolicyStats policy_stats(const ChainEnv& env, const TabularPolicy& policy) {
  // Forward occupancy over progress levels gives expected tokens.
  std::vector<double> occ(env.levels(), 0.0);
  occ[env.start_progress] = 1.0;
  double tokens = 0.0;
  for (std::size_t s = 0; s < env.n_stages; ++s) {
    std::vector<double> next(env.levels(), 0.0);
    for (std::size_t p = 0; p < env.levels(); ++p) {
      if (occ[p] == 0.0) continue;
      const auto probs = policy.probabilities(s, p);
      for (std::size_t a = 0; a < kActionCount; ++a) {
        const double mass = occ[p] * probs[a];
        tokens += mass * static_cast<double>(env.cost(kActions[a]));
        next[env.step(p, kActions[a])] += mass;
      }
    }
    occ = std::move(next);
  }
  double success = 0.0;
  for (std::size_t p = 0; p < env.levels(); ++p) success += occ[p] * env.solvability[p];
  return {success, tokens};
}

// ---------------------------------------------------------------------------
// Records and the oracle

TrajectoryRecord to_record(const EpisodeTrace& trace, const std::string& id,
                           const std::optional<std::string>& group_id) {
  TrajectoryRecord rec;
  rec.id = id;
  rec.group_id = group_id;
  rec.outcome = trace.outcome;
  rec.tokens.reserve(trace.entropies.size());
  for (double h : trace.entropies) rec.tokens.push_back(TokenInfo{h, std::nullopt, true});
  for (const auto& step : trace.steps) rec.tokens[step.token_begin].text = to_string(step.action);
  return rec;
}

SimulatorOracle::SimulatorOracle(ChainEnv env, TabularPolicy policy)
    : env_(std::move(env)), policy_(std::move(policy)) {
  const auto problems = env_violations(env_);
  if (!problems.empty()) throw InvalidInput("invalid chain: " + problems.front());
  if (policy_.n_stages() != env_.n_stages || policy_.levels() != env_.levels()) {
    throw DimensionError("policy shape does not match the chain");
  }
}

bool SimulatorOracle::rollout(const TrajectoryRecord& record, std::size_t boundary,
                              std::uint64_t seed) const {
  if (record.tokens.empty() || !record.tokens.front().text) {
    throw OracleError("record '" + record.id + "' carries no simulator action labels");
  }
  std::size_t stage = 0;
  std::size_t progress = env_.start_progress;
  for (std::size_t i = 0; i < boundary && i < record.tokens.size(); ++i) {
    const auto& text = record.tokens[i].text;
    if (!text) continue;
    if (stage == env_.n_stages) {
      throw OracleError("record '" + record.id + "' has more stages than the chain");
    }
    progress = env_.step(progress, parse_action(*text));
    ++stage;
  }
  return rollout_from(stage, progress, seed);
}

bool SimulatorOracle::rollout_from(std::size_t stage, std::size_t progress,
                                   std::uint64_t seed) const {
  Rng rng = make_rng(seed);
  return complete_from(env_, policy_, stage, progress, rng);
}

// ---------------------------------------------------------------------------
// Sandbagging

ShapingConfig simulator_config(const ChainEnv& env, ShapingConfig config) {
  if (!config.is_explicit("l_ref")) config.l_ref = static_cast<double>(env.cost_long);
  if (!config.is_explicit("m_rollouts")) config.m_rollouts = env.grid;
  if (!config.is_explicit("k_segments")) config.k_segments = env.n_stages;
  if (!config.is_explicit("tau")) {
    config.tau = 0.5 * (env.interior_entropy_hi + env.boundary_entropy_lo);
  }
  // same baseline for every estimator, so only the per-stage terms differ
  if (!config.is_explicit("outcome_mode")) config.outcome_mode = OutcomeMode::group;
  return config;
}

std::vector<std::size_t> path_lengths(const ChainEnv& env, const std::vector<double>& path) {
  std::vector<std::size_t> out;
  const double g = static_cast<double>(env.grid);
  for (std::size_t k = 0; k + 1 < path.size(); ++k) {
    const long from = std::lround(path[k] * g);
    const long to = std::lround(path[k + 1] * g);
    const std::size_t levels = static_cast<std::size_t>(std::max(1L, std::labs(to - from)));
    out.push_back(levels * env.cost_short);
  }
  return out;
}

SandbagReport sandbag_comparison(const ChainEnv& env, const ShapingConfig& base,
                                 std::vector<double> monotone, std::vector<double> dip) {
  if (monotone.size() < 2 || dip.size() < 2) throw InvalidInput("paths need K+1 >= 2 potentials");
  if (monotone.back() != dip.back()) {
    throw InvalidInput("sandbag paths must share the same outcome");
  }
  const ShapingConfig config = simulator_config(env, base);
  SandbagReport r;
  r.monotone_path = std::move(monotone);
  r.dip_path = std::move(dip);
  r.monotone_lengths = path_lengths(env, r.monotone_path);
  r.dip_lengths = path_lengths(env, r.dip_path);

  auto mrt_bonus = [&](const std::vector<double>& path) {
    const double outcome = path.back();
    double bonus = 0.0;
    for (double a : mrt_advantages(path, outcome, config.alpha)) bonus += a - outcome;
    return bonus;
  };
  auto shape_bonus = [&](const std::vector<double>& path, const std::vector<std::size_t>& lengths) {
    return config.alpha * shaping_sum(path, segment_gammas(lengths, config));
  };
  r.mrt_bonus_mono = mrt_bonus(r.monotone_path);
  r.mrt_bonus_dip = mrt_bonus(r.dip_path);
  r.shape_bonus_mono = shape_bonus(r.monotone_path, r.monotone_lengths);
  r.shape_bonus_dip = shape_bonus(r.dip_path, r.dip_lengths);

  const auto at_floor = static_cast<std::size_t>(std::ceil(config.l_ref));
  r.shape_bonus_mono_equal_length = shape_bonus(
      r.monotone_path, std::vector<std::size_t>(r.monotone_path.size() - 1, at_floor));
  r.shape_bonus_dip_equal_length =
      shape_bonus(r.dip_path, std::vector<std::size_t>(r.dip_path.size() - 1, at_floor));
  return r;
}

// ---------------------------------------------------------------------------
// Training

double potential_drop_rate(std::span<const double> profile) {
  if (profile.size() < 2) return 0.0;
  std::size_t drops = 0;
  for (std::size_t k = 0; k + 1 < profile.size(); ++k) {
    if (profile[k + 1] < profile[k]) ++drops;
  }
  return static_cast<double>(drops) / static_cast<double>(profile.size() - 1);
}

namespace {

struct Episode {
  EpisodeTrace trace;
  std::vector<double> profile;  // K estimated boundaries + terminal outcome
};

constexpr std::uint64_t kEpisodeStream = 0xE915;
constexpr std::uint64_t kRolloutStream = 0x2011;

}  // namespace

TrainResult train(const ChainEnv& env, Estimator estimator, std::size_t episodes,
                  std::uint64_t seed, const ShapingConfig& base, const TrainOptions& options) {
  if (episodes == 0) throw InvalidInput("episodes must be >= 1");
  if (options.group_size == 0 || options.window == 0) {
    throw InvalidInput("group_size and window must be >= 1");
  }
  if (const auto problems = env_violations(env); !problems.empty()) {
    throw InvalidInput("invalid chain: " + problems.front());
  }
  const ShapingConfig config = simulator_config(env, base);
  require_valid(config);
  if (estimator == Estimator::grpo && options.group_size < 2) {
    throw InvalidInput("GRPO training needs group_size >= 2");
  }

  TabularPolicy policy = TabularPolicy::uniform(env);
  const std::size_t K = env.n_stages;
  const std::size_t m = config.m_rollouts;

  TrainResult result{{}, policy, {}};
  WindowMetrics window{};
  std::size_t in_window = 0;
  auto flush_window = [&](std::size_t episode_end) {
    if (in_window == 0) return;
    const double n = static_cast<double>(in_window);
    window.episode_end = episode_end;
    window.success_rate /= n;
    window.mean_tokens /= n;
    window.potential_drop_rate /= n;
    result.curve.push_back(window);
    window = WindowMetrics{};
    in_window = 0;
  };

  std::vector<double> grad(policy.logits().size());
  std::size_t done = 0;
  while (done < episodes) {
    const std::size_t batch = std::min(options.group_size, episodes - done);
    const ActionTable table(policy);

    std::vector<Episode> group(batch);
    for (std::size_t i = 0; i < batch; ++i) {
      const std::uint64_t ep = done + i;
      Rng rng = make_rng(mix_seed(seed ^ kEpisodeStream, ep));
      Episode& e = group[i];
      e.trace = episode_with(env, table, rng);
      e.profile.reserve(K + 1);
      const std::uint64_t rollout_base = mix_seed(seed ^ kRolloutStream, ep);
      for (std::size_t k = 0; k < K; ++k) {
        std::size_t wins = 0;
        for (std::size_t j = 0; j < m; ++j) {
          Rng r = make_rng(boundary_seed(rollout_base, k, m) + j);
          wins += complete_with(env, table, k, e.trace.steps[k].progress_before, r) ? 1 : 0;
        }
        e.profile.push_back(static_cast<double>(wins) / static_cast<double>(m));
      }
      e.profile.push_back(static_cast<double>(e.trace.outcome));
    }

    std::vector<double> lead(batch);
    const bool normalize = estimator == Estimator::grpo || config.outcome_mode == OutcomeMode::group;
    if (normalize && batch >= 2) {
      std::vector<double> outcomes(batch);
      for (std::size_t i = 0; i < batch; ++i) outcomes[i] = group[i].trace.outcome;
      lead = grpo_advantages(outcomes);
    } else if (!normalize) {
      for (std::size_t i = 0; i < batch; ++i) lead[i] = group[i].trace.outcome;
    }  // a trailing singleton group has no relative signal: lead stays 0

    std::fill(grad.begin(), grad.end(), 0.0);
    for (std::size_t i = 0; i < batch; ++i) {
      const Episode& e = group[i];
      std::vector<double> adv;
      switch (estimator) {
        case Estimator::grpo:
          adv.assign(K, lead[i]);
          break;
        case Estimator::mrt:
          adv = mrt_advantages(e.profile, e.trace.outcome, config.alpha);
          for (double& a : adv) a += lead[i] - e.trace.outcome;
          break;
        case Estimator::shape: {
          std::vector<std::size_t> lengths(K);
          for (std::size_t k = 0; k < K; ++k) lengths[k] = e.trace.steps[k].token_count;
          adv = shape_advantages(e.profile, lengths, lead[i], config);
          break;
        }
      }
      if (options.zero_advantage) std::fill(adv.begin(), adv.end(), 0.0);

      for (std::size_t k = 0; k < K; ++k) {
        const StageStep& st = e.trace.steps[k];
        const auto probs = policy.probabilities(k, st.progress_before);
        const double scale = adv[k] / policy.temperature();
        for (std::size_t a = 0; a < kActionCount; ++a) {
          const double indicator = kActions[a] == st.action ? 1.0 : 0.0;
          grad[((k * env.levels()) + st.progress_before) * kActionCount + a] +=
              scale * (indicator - probs[a]);
        }
      }

      window.success_rate += e.trace.outcome;
      window.mean_tokens += static_cast<double>(e.trace.total_tokens());
      window.potential_drop_rate +=
          potential_drop_rate(std::span<const double>(e.profile).first(K));
      ++in_window;
      if (in_window == options.window) flush_window(done + i + 1);
    }

    auto& logits = policy.logits();
    const double step = options.learning_rate / static_cast<double>(batch);
    for (std::size_t j = 0; j < logits.size(); ++j) {
      logits[j] += step * grad[j];
      if (!(std::abs(logits[j]) <= options.max_logit)) {
        throw DivergenceError("policy logit exceeded " + std::to_string(options.max_logit) +
                              " after episode " + std::to_string(done + batch));
      }
    }
    done += batch;
  }
  flush_window(done);

  result.policy = policy;
  result.final_stats = policy_stats(env, policy);
  return result;
}

}  // namespace shape::sim
