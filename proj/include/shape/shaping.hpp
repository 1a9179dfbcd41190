#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "shape/trajectory.hpp"

namespace shape {

inline constexpr double kGrpoEpsilon = 1e-8;

// Length-dependent discount: max(gamma_min, 1 - (length / l_ref)(1 - gamma_min)).
// The real-valued overload exists for derivative checks.
double dynamic_gamma(double length, double l_ref, double gamma_min);
inline double dynamic_gamma(std::size_t length, double l_ref, double gamma_min) {
  return dynamic_gamma(static_cast<double>(length), l_ref, gamma_min);
}

// gamma * phi_next - phi_k
inline double shaping_term(double phi_k, double phi_next, double gamma) {
  return gamma * phi_next - phi_k;
}

struct TaxSplit {
  double raw_gain;
  double tax;

  // gamma * raw_gain - tax; equal to shaping_term up to rounding.
  double recombine(double gamma) const { return gamma * raw_gain - tax; }
};

TaxSplit tax_decomposition(double phi_k, double phi_next, double gamma);

// Per-segment discounts under the config (dynamic, or fixed_gamma when set).
std::vector<double> segment_gammas(std::span<const std::size_t> lengths,
                                   const ShapingConfig& config);

// A_k = outcome + alpha * (gamma_k * Phi(s_{k+1}) - Phi(s_k)).
// `outcome` is the value of R_outcome, which is not necessarily binary when
// group normalization is on.
std::vector<double> shape_advantages(std::span<const double> profile,
                                     std::span<const std::size_t> lengths,
                                     double outcome,
                                     const ShapingConfig& config);

// Same as shape_advantages but also returns the per-segment decomposition.
std::vector<ShapingTerms> shaping_breakdown(std::span<const double> profile,
                                            std::span<const std::size_t> lengths,
                                            const ShapingConfig& config);

// A_k = outcome + alpha * (outcome - Phi(s_k)), k = 1..K.
std::vector<double> mrt_advantages(std::span<const double> profile,
                                   double outcome, double alpha);

// (r_i - mean) / (population_std + 1e-8). Needs at least two outcomes.
std::vector<double> grpo_advantages(std::span<const double> outcomes);

// Sum of the SHAPE segment advantages. The profile is used as given (no
// terminal overwrite), so adversarial profiles can be evaluated.
double total_reward(std::span<const double> profile,
                    std::span<const std::size_t> lengths, double outcome,
                    const ShapingConfig& config);

// Sum over k of the shaping terms alone (no outcome, no alpha).
double shaping_sum(std::span<const double> profile,
                   std::span<const double> gammas);

}  // namespace shape
