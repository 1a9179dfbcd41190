#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "shape/config.hpp"

namespace shape {

struct TokenInfo {
  double entropy = 0.0;  // nats
  std::optional<std::string> text;
  bool valid = true;  // participates in redistribution statistics

  bool operator==(const TokenInfo&) const = default;
};

// One rollout. A token's index is its position in `tokens`.
struct TrajectoryRecord {
  std::string id;
  std::optional<std::string> group_id;
  std::vector<TokenInfo> tokens;
  int outcome = 0;  // must be 0 or 1; kept as int so validation can see bad input
  std::optional<std::vector<double>> boundary_potentials;  // K+1 values

  std::size_t token_count() const { return tokens.size(); }
  std::vector<double> entropies() const;

  bool operator==(const TrajectoryRecord&) const = default;
};

// Interior boundaries b_1 < ... < b_{K-1}. Segment k covers tokens
// [b_{k-1}, b_k) with b_0 = 0 and b_K = token_count.
struct SegmentPlan {
  std::vector<std::size_t> boundaries;
  std::size_t k = 1;

  std::size_t segment_begin(std::size_t segment) const {
    return segment == 0 ? 0 : boundaries[segment - 1];
  }
  std::size_t segment_end(std::size_t segment, std::size_t token_count) const {
    return segment + 1 == k ? token_count : boundaries[segment];
  }

  bool operator==(const SegmentPlan&) const = default;
};

// Empty when the plan is a valid partition of token_count tokens.
std::vector<std::string> plan_violations(const SegmentPlan& plan,
                                         std::size_t token_count);

enum class PotentialSource { oracle, log, terminal_outcome };

std::string to_string(PotentialSource source);

// Phi(s_1) .. Phi(s_K) followed by the terminal Phi(s_{K+1}). `source`
// describes the K boundary values; the terminal entry always comes from the
// realized outcome.
struct PotentialProfile {
  std::vector<double> values;
  std::size_t m = 1;
  PotentialSource source = PotentialSource::log;

  std::size_t k() const { return values.empty() ? 0 : values.size() - 1; }
  PotentialSource source_of(std::size_t index) const {
    return index + 1 == values.size() ? PotentialSource::terminal_outcome
                                      : source;
  }
};

enum class Estimator { shape, mrt, grpo };

std::string to_string(Estimator estimator);
Estimator parse_estimator(const std::string& name);

// Decomposition of one segment's shaping term F = gamma*Phi' - Phi.
struct ShapingTerms {
  double raw_gain = 0.0;  // Phi(s_{k+1}) - Phi(s_k)
  double tax = 0.0;       // (1 - gamma_k) * Phi(s_k)
  double gamma = 1.0;
  std::size_t length = 0;
  double value = 0.0;  // the shaping term itself
};

struct AdvantageSheet {
  std::string id;
  Estimator estimator = Estimator::shape;
  std::vector<double> segment_advantages;
  std::vector<double> token_advantages;
  std::vector<ShapingTerms> shaping_terms;  // empty for mrt / grpo
  SegmentPlan plan;
  std::vector<double> potentials;  // profile used, empty for grpo
};

// True when `value` is a multiple of 1/m within `tolerance` (in grid units).
bool on_grid(double value, std::size_t m, double tolerance = 1e-9);

// Record invariants under `config` (grid width m). Pure; never throws.
std::vector<std::string> validate(const TrajectoryRecord& record,
                                  const ShapingConfig& config);

}  // namespace shape
