#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "shape/config.hpp"

namespace shape::theory {

struct GammaRow {
  double gamma;
  double discounted_next;  // gamma * Phi_next
  double phi_k;
  double shaping;          // F
};

inline constexpr double kTablePhiK = 5.0 / 8.0;
inline constexpr double kTablePhiNext = 7.0 / 8.0;

// F at Phi_k = 5/8, Phi_next = 7/8 for gamma in {1.0, 0.9, 0.8, 0.7, 0.6}.
std::vector<GammaRow> reproduce_gamma_table();

// Round half away from zero to `decimals` places. A 1e-9 relative nudge
// keeps exact decimal ties (0.1625) from rounding down through binary error.
double round_decimals(double value, int decimals);

// Phi_k / Phi_next: the discount below which an improving step is punished.
double critical_gamma(double phi_k, double phi_next);

struct ConsistencyReport {
  std::size_t trials = 0;
  std::size_t violations = 0;
  double min_correct = 0.0;
  double max_incorrect = 0.0;
  double margin() const { return min_correct - max_incorrect; }
};

// Random K in [1, 24], potentials on the config's 1/m grid, random lengths;
// evaluates total_reward for outcome 1 and 0 on each sampled profile.
// Throws ConfigError unless alpha < 0.5.
ConsistencyReport fuzz_task_consistency(std::size_t trials, std::uint64_t seed,
                                        const ShapingConfig& config);

struct SignReport {
  std::size_t pairs = 0;      // strictly improving grid pairs examined
  std::size_t positive = 0;
  std::size_t negative = 0;   // F < 0
  double min_shaping = 0.0;
};

// Every (a/m, b/m) with a < b, F = gamma * b/m - a/m.
SignReport sign_consistency(std::size_t m, double gamma);

struct DerivativeReport {
  std::size_t samples = 0;
  double max_error_phi = 0.0;     // vs gamma - 1
  double max_error_length = 0.0;  // vs -Phi_next (1 - gamma_min) / l_ref, or 0
  std::size_t clamped_samples = 0;
};

// Central finite differences of the shaping term against the closed-form
// partial derivatives. Random gamma_min, l_ref, potentials and lengths; the
// kink at L = l_ref is avoided by at least 2 * step.
DerivativeReport derivative_check(std::size_t samples, double step, std::uint64_t seed);

// Closed forms used by derivative_check.
double d_shaping_d_phi(double length, double l_ref, double gamma_min);
double d_shaping_d_length(double phi_next, double length, double l_ref, double gamma_min);

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

// Runs a named suite (consistency, gamma-table, sign, derivatives or
// all) and returns one result per check. The sign suite enumerates the
// config grid at gamma = 1 and gamma = gamma_min.
std::vector<CheckResult> run_suite(const std::string& suite, std::size_t trials,
                                   std::uint64_t seed, const ShapingConfig& config);

}  // namespace shape::theory
