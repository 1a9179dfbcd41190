#pragma once

#include <span>
#include <vector>

#include "shape/trajectory.hpp"

namespace shape {

struct WeightParams {
  double beta = 0.5;
  double delta_min = 0.5;
  double delta_max = 1.5;
  double epsilon = 1e-6;

  static WeightParams from(const ShapingConfig& config) {
    return {config.beta, config.delta_min, config.delta_max, config.epsilon};
  }
};

// 1 + beta * (H - mean) / (std + eps) with segment-local population
// statistics, before clipping. Constant input yields exactly 1.
std::vector<double> raw_entropy_weights(std::span<const double> entropies,
                                        const WeightParams& params);

// raw_entropy_weights clipped to [delta_min, delta_max]. Throws InvalidInput
// on an empty span ("segment has no valid tokens").
std::vector<double> entropy_weights(std::span<const double> entropies,
                                    const WeightParams& params);

// Weights for a whole segment: statistics over valid tokens only, invalid
// tokens get 1. A segment without any valid token gets all ones.
std::vector<double> segment_weights(std::span<const TokenInfo> tokens,
                                    const WeightParams& params);

// A_t = A_k * w_t for each token of segment k. With config.tcr off (or
// beta = 0) this is the uniform broadcast of A_k.
std::vector<double> redistribute(std::span<const double> segment_advantages,
                                 const SegmentPlan& plan,
                                 std::span<const TokenInfo> tokens,
                                 const ShapingConfig& config);

}  // namespace shape
