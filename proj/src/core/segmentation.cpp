#include "shape/segmentation.hpp"

#include <algorithm>
#include <cmath>

#include "shape/errors.hpp"

namespace shape {

std::vector<std::size_t> find_cutpoints(std::span<const double> entropies, double tau) {
  if (entropies.empty()) throw InvalidInput("empty trajectory");
  if (!std::isfinite(tau)) throw InvalidInput("tau must be finite");
  std::vector<std::size_t> out;
  for (std::size_t t = 1; t + 1 < entropies.size(); ++t) {
    if (entropies[t] > tau) out.push_back(t);
  }
  return out;
}

std::size_t default_min_gap(std::size_t token_count, std::size_t k) {
  if (k == 0) return 1;
  return std::max<std::size_t>(1, token_count / (4 * k));
}

SegmentPlan downsample(std::span<const std::size_t> candidates,
                       std::span<const double> entropies, std::size_t token_count,
                       std::size_t k, std::size_t min_gap) {
  if (k == 0) throw InvalidInput("segment count must be >= 1");
  if (min_gap == 0) throw InvalidInput("min_gap must be >= 1");
  if (token_count < k) throw InvalidInput("too few tokens for K segments");

  std::vector<std::size_t> order;
  order.reserve(candidates.size());
  for (std::size_t c : candidates) {
    if (c == 0 || c >= token_count) {
      throw InvalidInput("candidate " + std::to_string(c) + " is not an interior index");
    }
    if (c >= entropies.size()) {
      throw DimensionError("candidate " + std::to_string(c) + " has no entropy");
    }
    order.push_back(c);
  }
  std::sort(order.begin(), order.end());
  order.erase(std::unique(order.begin(), order.end()), order.end());
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return entropies[a] > entropies[b];
  });

  std::vector<std::size_t> chosen;
  chosen.reserve(k - 1);
  for (std::size_t c : order) {
    if (chosen.size() + 1 >= k) break;
    const bool clear = std::none_of(chosen.begin(), chosen.end(), [&](std::size_t b) {
      const std::size_t gap = c > b ? c - b : b - c;
      return gap < min_gap;
    });
    if (clear) chosen.push_back(c);
  }
  std::sort(chosen.begin(), chosen.end());

  // Midpoint fallback. Fewer than k segments over >= k tokens means some
  // segment has length >= 2, so the split always lands strictly inside it.
  while (chosen.size() + 1 < k) {
    std::size_t best_begin = 0;
    std::size_t best_len = 0;
    std::size_t begin = 0;
    for (std::size_t i = 0; i <= chosen.size(); ++i) {
      const std::size_t end = i < chosen.size() ? chosen[i] : token_count;
      if (end - begin > best_len) {
        best_len = end - begin;
        best_begin = begin;
      }
      begin = end;
    }
    const std::size_t mid = best_begin + best_len / 2;
    chosen.insert(std::upper_bound(chosen.begin(), chosen.end(), mid), mid);
  }
  return SegmentPlan{std::move(chosen), k};
}

std::vector<std::size_t> segment_lengths(const SegmentPlan& plan, std::size_t token_count) {
  std::vector<std::size_t> out;
  out.reserve(plan.k);
  std::size_t begin = 0;
  for (std::size_t b : plan.boundaries) {
    out.push_back(b - begin);
    begin = b;
  }
  out.push_back(token_count - begin);
  return out;
}

SegmentPlan segment_entropy(std::span<const double> entropies, double tau, std::size_t k,
                            std::optional<std::size_t> min_gap) {
  const auto candidates = find_cutpoints(entropies, tau);
  const std::size_t gap = min_gap.value_or(default_min_gap(entropies.size(), k));
  return downsample(candidates, entropies, entropies.size(), k, gap);
}

}  // namespace shape
