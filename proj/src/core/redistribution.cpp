#include "shape/redistribution.hpp"

#include <algorithm>
#include <cmath>

#include "shape/errors.hpp"

namespace shape {

std::vector<double> raw_entropy_weights(std::span<const double> entropies,
                                        const WeightParams& params) {
  if (entropies.empty()) throw InvalidInput("segment has no valid tokens");
  const auto [lo, hi] = std::minmax_element(entropies.begin(), entropies.end());
  if (*lo == *hi || params.beta == 0.0) {
    return std::vector<double>(entropies.size(), 1.0);
  }
  const double n = static_cast<double>(entropies.size());
  double mean = 0.0;
  for (double h : entropies) mean += h;
  mean /= n;
  double var = 0.0;
  for (double h : entropies) var += (h - mean) * (h - mean);
  const double scale = std::sqrt(var / n) + params.epsilon;

  std::vector<double> out;
  out.reserve(entropies.size());
  for (double h : entropies) out.push_back(1.0 + params.beta * (h - mean) / scale);
  return out;
}

std::vector<double> entropy_weights(std::span<const double> entropies,
                                    const WeightParams& params) {
  auto w = raw_entropy_weights(entropies, params);
  for (double& x : w) x = std::clamp(x, params.delta_min, params.delta_max);
  return w;
}

std::vector<double> segment_weights(std::span<const TokenInfo> tokens,
                                    const WeightParams& params) {
  std::vector<double> valid;
  for (const auto& t : tokens) {
    if (t.valid) valid.push_back(t.entropy);
  }
  std::vector<double> out(tokens.size(), 1.0);
  if (valid.empty()) return out;
  const auto w = entropy_weights(valid, params);
  std::size_t j = 0;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (tokens[i].valid) out[i] = w[j++];
  }
  return out;
}

std::vector<double> redistribute(std::span<const double> segment_advantages,
                                 const SegmentPlan& plan, std::span<const TokenInfo> tokens,
                                 const ShapingConfig& config) {
  if (segment_advantages.size() != plan.k) {
    throw DimensionError(std::to_string(segment_advantages.size()) +
                         " segment advantages for k = " + std::to_string(plan.k));
  }
  if (!plan_violations(plan, tokens.size()).empty()) {
    throw DimensionError("segment plan does not partition " + std::to_string(tokens.size()) +
                         " tokens");
  }
  const WeightParams params = WeightParams::from(config);
  std::vector<double> out;
  out.reserve(tokens.size());
  for (std::size_t k = 0; k < plan.k; ++k) {
    const std::size_t begin = plan.segment_begin(k);
    const std::size_t end = plan.segment_end(k, tokens.size());
    if (!config.tcr) {
      out.insert(out.end(), end - begin, segment_advantages[k]);
      continue;
    }
    const auto w = segment_weights(tokens.subspan(begin, end - begin), params);
    for (double wt : w) out.push_back(segment_advantages[k] * wt);
  }
  return out;
}

}  // namespace shape
