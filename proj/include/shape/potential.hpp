#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>

#include "shape/trajectory.hpp"

namespace shape {

// Forced-completion oracle. Given the prefix tokens[0, boundary) of a record
// and a rollout seed it reports whether the completion succeeds.
// Implementations must be deterministic in (record, boundary, seed) and safe
// to call concurrently.
class RolloutOracle {
 public:
  virtual ~RolloutOracle() = default;
  virtual bool rollout(const TrajectoryRecord& record, std::size_t boundary,
                       std::uint64_t seed) const = 0;
  virtual std::string name() const = 0;
};

// Mean of m oracle outcomes over seeds seed .. seed+m-1; always a multiple
// of 1/m. Any oracle exception becomes OracleError naming the boundary.
double estimate_potential(const TrajectoryRecord& record, std::size_t boundary,
                          const RolloutOracle& oracle, std::size_t m,
                          std::uint64_t seed);

// Seed range start for the boundary of segment `segment`; ranges of
// different boundaries never overlap.
inline std::uint64_t boundary_seed(std::uint64_t seed, std::size_t segment,
                                   std::size_t m) {
  return seed + static_cast<std::uint64_t>(segment) * m;
}

// Profile of K+1 potentials for `plan`.
//
// Logged boundary_potentials win when present (snapped onto the 1/m grid);
// otherwise the oracle is queried at every segment start. The terminal entry
// is always the realized outcome. Throws InvalidInput("no potential source")
// when neither is available.
PotentialProfile build_profile(const TrajectoryRecord& record,
                               const SegmentPlan& plan,
                               const RolloutOracle* oracle,
                               const ShapingConfig& config,
                               std::uint64_t seed = 0);

}  // namespace shape
