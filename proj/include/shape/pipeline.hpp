#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "shape/potential.hpp"
#include "shape/trajectory.hpp"

namespace shape {

// Segment count for a record: K from its logged potentials, else the config.
std::size_t segment_count(const TrajectoryRecord& record, const ShapingConfig& config);

// Entropy segmentation of one record under the config (tau is required).
SegmentPlan plan_record(const TrajectoryRecord& record, const ShapingConfig& config);

struct ScoreOptions {
  Estimator estimator = Estimator::shape;
  const RolloutOracle* oracle = nullptr;
  std::uint64_t seed = 0;
};

// Per-record rollout seed: depends on the run seed and the record id only,
// so a record scores identically wherever it sits in the input.
std::uint64_t record_seed(std::uint64_t seed, const std::string& id);

// Validates every record (ValidationError listing all violations), then
// produces one sheet per record in input order.
//
// shape - segmented, potentials from logs or the oracle, discounted potential shaping
//         plus token redistribution (unless config.tcr is off)
// mrt   - same segmentation and potentials, endpoint bonus, uniform tokens
// grpo  - group-relative outcome, one segment, uniform tokens; records are
//         grouped by group_id (records without one form a single group)
std::vector<AdvantageSheet> score_records(std::span<const TrajectoryRecord> records,
                                          const ShapingConfig& config,
                                          const ScoreOptions& options);

}  // namespace shape
