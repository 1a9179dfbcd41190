#include "shape/shaping.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "shape/errors.hpp"

namespace shape {

double dynamic_gamma(double length, double l_ref, double gamma_min) {
  if (!(l_ref > 0.0)) throw ConfigError("l_ref must be positive");
  return std::max(gamma_min, 1.0 - (length / l_ref) * (1.0 - gamma_min));
}

TaxSplit tax_decomposition(double phi_k, double phi_next, double gamma) {
  return TaxSplit{phi_next - phi_k, (1.0 - gamma) * phi_k};
}

std::vector<double> segment_gammas(std::span<const std::size_t> lengths,
                                   const ShapingConfig& config) {
  std::vector<double> out;
  out.reserve(lengths.size());
  for (std::size_t len : lengths) {
    out.push_back(config.fixed_gamma ? *config.fixed_gamma
                                     : dynamic_gamma(len, config.l_ref, config.gamma_min));
  }
  return out;
}

namespace {

void check_dims(std::span<const double> profile, std::size_t k) {
  if (profile.size() != k + 1) {
    throw DimensionError("profile has " + std::to_string(profile.size()) +
                         " potentials for " + std::to_string(k) + " segments");
  }
}

}  // namespace

std::vector<ShapingTerms> shaping_breakdown(std::span<const double> profile,
                                            std::span<const std::size_t> lengths,
                                            const ShapingConfig& config) {
  check_dims(profile, lengths.size());
  const auto gammas = segment_gammas(lengths, config);
  std::vector<ShapingTerms> out;
  out.reserve(lengths.size());
  for (std::size_t k = 0; k < lengths.size(); ++k) {
    const auto split = tax_decomposition(profile[k], profile[k + 1], gammas[k]);
    out.push_back(ShapingTerms{split.raw_gain, split.tax, gammas[k], lengths[k],
                               shaping_term(profile[k], profile[k + 1], gammas[k])});
  }
  return out;
}

std::vector<double> shape_advantages(std::span<const double> profile,
                                     std::span<const std::size_t> lengths, double outcome,
                                     const ShapingConfig& config) {
  const auto terms = shaping_breakdown(profile, lengths, config);
  std::vector<double> out;
  out.reserve(terms.size());
  for (const auto& t : terms) out.push_back(outcome + config.alpha * t.value);
  return out;
}

std::vector<double> mrt_advantages(std::span<const double> profile, double outcome,
                                   double alpha) {
  if (profile.size() < 2) throw DimensionError("profile needs K+1 >= 2 potentials");
  std::vector<double> out;
  out.reserve(profile.size() - 1);
  for (std::size_t k = 0; k + 1 < profile.size(); ++k) {
    out.push_back(outcome + alpha * (outcome - profile[k]));
  }
  return out;
}

std::vector<double> grpo_advantages(std::span<const double> outcomes) {
  if (outcomes.size() < 2) throw InvalidInput("GRPO needs a group of at least 2");
  const double n = static_cast<double>(outcomes.size());
  const double mean = std::accumulate(outcomes.begin(), outcomes.end(), 0.0) / n;
  double var = 0.0;
  for (double r : outcomes) var += (r - mean) * (r - mean);
  const double std_dev = std::sqrt(var / n);
  std::vector<double> out;
  out.reserve(outcomes.size());
  for (double r : outcomes) out.push_back((r - mean) / (std_dev + kGrpoEpsilon));
  return out;
}

double total_reward(std::span<const double> profile, std::span<const std::size_t> lengths,
                    double outcome, const ShapingConfig& config) {
  const auto adv = shape_advantages(profile, lengths, outcome, config);
  return std::accumulate(adv.begin(), adv.end(), 0.0);
}

double shaping_sum(std::span<const double> profile, std::span<const double> gammas) {
  check_dims(profile, gammas.size());
  double sum = 0.0;
  for (std::size_t k = 0; k < gammas.size(); ++k) {
    sum += shaping_term(profile[k], profile[k + 1], gammas[k]);
  }
  return sum;
}

}  // namespace shape
