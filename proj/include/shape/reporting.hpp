#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "shape/trajectory.hpp"

namespace shape {

// One segment transition Phi(s_k) -> Phi(s_k) + gain of an episode with the
// given final outcome.
struct Transition {
  double phi_start = 0.0;
  double gain = 0.0;
  int outcome = 0;
};

// Boundary-to-boundary transitions of records carrying boundary potentials
// (the terminal entry is excluded). Records are sampled every `stride`-th.
std::vector<Transition> collect_transitions(std::span<const TrajectoryRecord> records,
                                            std::size_t stride = 1);

struct RegressionFit {
  double slope = 0.0;
  double intercept = 0.0;  // raw intercept removed by centering
  std::size_t points = 0;
};

struct GainRegression {
  RegressionFit low;
  RegressionFit high;
};

// OLS of outcome on gain in two groups: phi_start <= threshold_low and
// phi_start >= threshold_high. Low-group transitions with gain <= -0.24 are
// dropped as floor effects. Each group's outcome is centred by its raw
// intercept before the slope is reported. Throws InvalidInput when a group
// has fewer than two points or no spread in gain.
GainRegression gain_regression(std::span<const Transition> transitions,
                               double threshold_low = 0.25,
                               double threshold_high = 0.5);

inline constexpr std::size_t kGainBins = 4;
inline constexpr double kGainShiftEpsilon = 0.03;

struct GainDistribution {
  std::array<double, kGainBins> mean_gain{};  // 0 for bins without samples
  std::array<std::size_t, kGainBins> count{};
  std::array<double, kGainBins> percent{};
};

// Bin index of a start potential: [0, .25) low, [.25, .5) mid-low,
// [.5, .75) mid-high, [.75, 1) high. Potentials at 1 have no bin.
std::optional<std::size_t> gain_bin(double phi_start);

// Mean gain per bin, shifted by (global_min - 0.03) and normalized to
// percentages. global_min defaults to the minimum of this distribution's
// bin means; pass a shared value to compare several runs on one scale.
GainDistribution gain_distribution(std::span<const Transition> transitions,
                                   std::optional<double> global_min = std::nullopt);

}  // namespace shape
