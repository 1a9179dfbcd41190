#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "shape/trajectory.hpp"

namespace shape {

// Interior positions whose entropy strictly exceeds tau, ascending. The first
// and last token are never candidates.
std::vector<std::size_t> find_cutpoints(std::span<const double> entropies,
                                        double tau);

// max(1, token_count / (4k))
std::size_t default_min_gap(std::size_t token_count, std::size_t k);

// Reduces candidates to exactly k-1 boundaries.
//
// Candidates are taken greedily by descending entropy (earlier index wins a
// tie); once a boundary b is taken, every candidate c with |c - b| < min_gap
// is dropped. If fewer than k-1 boundaries survive, the longest segment
// (earliest on ties) is split at its midpoint until k segments exist.
SegmentPlan downsample(std::span<const std::size_t> candidates,
                       std::span<const double> entropies,
                       std::size_t token_count, std::size_t k,
                       std::size_t min_gap);

std::vector<std::size_t> segment_lengths(const SegmentPlan& plan,
                                         std::size_t token_count);

// find_cutpoints + downsample with the config's tau / min_gap.
SegmentPlan segment_entropy(std::span<const double> entropies, double tau,
                            std::size_t k,
                            std::optional<std::size_t> min_gap = std::nullopt);

}  // namespace shape
