#include "shape/pipeline.hpp"

#include <map>

#include "parallel.hpp"
#include "shape/errors.hpp"
#include "shape/redistribution.hpp"
#include "shape/segmentation.hpp"
#include "shape/shaping.hpp"

namespace shape {

std::size_t segment_count(const TrajectoryRecord& record, const ShapingConfig& config) {
  if (record.boundary_potentials && !record.boundary_potentials->empty()) {
    return record.boundary_potentials->size() - 1;
  }
  return config.k_segments;
}

SegmentPlan plan_record(const TrajectoryRecord& record, const ShapingConfig& config) {
  if (!config.tau) {
    throw ConfigError("tau is required for entropy segmentation (set it in the config or via --tau)");
  }
  const auto entropies = record.entropies();
  const std::size_t k = segment_count(record, config);
  try {
    return segment_entropy(entropies, *config.tau, k, config.min_gap);
  } catch (const InvalidInput& e) {
    throw InvalidInput("record '" + record.id + "': " + e.what());
  }
}

std::uint64_t record_seed(std::uint64_t seed, const std::string& id) {
  std::uint64_t h = 1469598103934665603ULL;  // FNV-1a
  for (unsigned char c : id) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  // Wide spacing keeps the per-boundary seed ranges of different records apart.
  return seed ^ (h << 20);
}

namespace {

// Leading outcome term per record: raw binary, or group-normalized.
std::vector<double> outcome_terms(std::span<const TrajectoryRecord> records, bool normalize) {
  std::vector<double> out(records.size());
  if (!normalize) {
    for (std::size_t i = 0; i < records.size(); ++i) out[i] = records[i].outcome;
    return out;
  }
  std::map<std::string, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < records.size(); ++i) {
    groups[records[i].group_id.value_or(std::string{})].push_back(i);
  }
  for (const auto& [gid, members] : groups) {
    if (members.size() < 2) {
      throw InvalidInput("group '" + gid + "' has " + std::to_string(members.size()) +
                         " record; group-relative outcomes need at least 2");
    }
    std::vector<double> outcomes;
    for (std::size_t i : members) outcomes.push_back(records[i].outcome);
    const auto adv = grpo_advantages(outcomes);
    for (std::size_t j = 0; j < members.size(); ++j) out[members[j]] = adv[j];
  }
  return out;
}

}  // namespace

std::vector<AdvantageSheet> score_records(std::span<const TrajectoryRecord> records,
                                          const ShapingConfig& config,
                                          const ScoreOptions& options) {
  require_valid(config);
  std::string problems;
  for (const auto& r : records) {
    for (const auto& v : validate(r, config)) problems += "\n  " + v;
  }
  if (!problems.empty()) throw ValidationError("invalid records:" + problems);

  const bool grpo = options.estimator == Estimator::grpo;
  const auto lead = outcome_terms(records, grpo || config.outcome_mode == OutcomeMode::group);

  std::vector<AdvantageSheet> sheets(records.size());
  detail::parallel_for(records.size(), config.threads, [&](std::size_t i) {
    const TrajectoryRecord& rec = records[i];
    AdvantageSheet& sheet = sheets[i];
    sheet.id = rec.id;
    sheet.estimator = options.estimator;

    if (grpo) {
      sheet.plan = SegmentPlan{{}, 1};
      sheet.segment_advantages = {lead[i]};
      sheet.token_advantages.assign(rec.tokens.size(), lead[i]);
      return;
    }

    sheet.plan = plan_record(rec, config);
    const auto lengths = segment_lengths(sheet.plan, rec.tokens.size());
    const auto profile = build_profile(rec, sheet.plan, options.oracle, config,
                                       record_seed(options.seed, rec.id));
    sheet.potentials = profile.values;

    if (options.estimator == Estimator::shape) {
      sheet.shaping_terms = shaping_breakdown(profile.values, lengths, config);
      for (const auto& t : sheet.shaping_terms) {
        sheet.segment_advantages.push_back(lead[i] + config.alpha * t.value);
      }
      sheet.token_advantages =
          redistribute(sheet.segment_advantages, sheet.plan, rec.tokens, config);
    } else {
      sheet.segment_advantages = mrt_advantages(profile.values, rec.outcome, config.alpha);
      for (double& a : sheet.segment_advantages) a += lead[i] - rec.outcome;
      ShapingConfig uniform = config;
      uniform.tcr = false;
      sheet.token_advantages =
          redistribute(sheet.segment_advantages, sheet.plan, rec.tokens, uniform);
    }
  });
  return sheets;
}

}  // namespace shape
