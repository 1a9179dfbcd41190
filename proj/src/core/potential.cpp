#include "shape/potential.hpp"

#include <cmath>

#include "shape/errors.hpp"

namespace shape {

double estimate_potential(const TrajectoryRecord& record, std::size_t boundary,
                          const RolloutOracle& oracle, std::size_t m, std::uint64_t seed) {
  if (m == 0) throw InvalidInput("m must be >= 1");
  if (boundary > record.tokens.size()) {
    throw InvalidInput("boundary " + std::to_string(boundary) + " outside trajectory");
  }
  std::size_t successes = 0;
  for (std::size_t i = 0; i < m; ++i) {
    try {
      successes += oracle.rollout(record, boundary, seed + i) ? 1 : 0;
    } catch (const std::exception& e) {
      throw OracleError("oracle unavailable at boundary " + std::to_string(boundary) + ": " +
                        e.what());
    }
  }
  return static_cast<double>(successes) / static_cast<double>(m);
}

PotentialProfile build_profile(const TrajectoryRecord& record, const SegmentPlan& plan,
                               const RolloutOracle* oracle, const ShapingConfig& config,
                               std::uint64_t seed) {
  const std::size_t m = config.m_rollouts;
  PotentialProfile profile;
  profile.m = m;
  if (record.boundary_potentials) {
    const auto& logged = *record.boundary_potentials;
    if (logged.size() != plan.k + 1) {
      throw DimensionError("record '" + record.id + "' logs " + std::to_string(logged.size()) +
                           " potentials for K = " + std::to_string(plan.k));
    }
    profile.values.reserve(logged.size());
    for (double v : logged) {
      if (!on_grid(v, m)) {
        throw InvalidInput("record '" + record.id + "': potential off 1/" + std::to_string(m) +
                           " grid");
      }
      profile.values.push_back(std::round(v * static_cast<double>(m)) / static_cast<double>(m));
    }
    profile.source = PotentialSource::log;
  } else if (oracle != nullptr) {
    profile.values.reserve(plan.k + 1);
    for (std::size_t k = 0; k < plan.k; ++k) {
      profile.values.push_back(estimate_potential(record, plan.segment_begin(k), *oracle, m,
                                                  boundary_seed(seed, k, m)));
    }
    profile.values.push_back(0.0);
    profile.source = PotentialSource::oracle;
  } else {
    throw InvalidInput("no potential source for record '" + record.id + "'");
  }
  profile.values.back() = record.outcome == 1 ? 1.0 : 0.0;
  return profile;
}

}  // namespace shape
