#include "shape/trajectory.hpp"

#include <cmath>
#include <sstream>

#include "shape/errors.hpp"

namespace shape {

std::vector<double> TrajectoryRecord::entropies() const {
  std::vector<double> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(t.entropy);
  return out;
}

std::vector<std::string> plan_violations(const SegmentPlan& plan, std::size_t token_count) {
  std::vector<std::string> out;
  if (plan.k == 0) out.push_back("segment count must be >= 1");
  if (plan.boundaries.size() + 1 != plan.k) {
    out.push_back("plan has " + std::to_string(plan.boundaries.size()) +
                  " boundaries for k = " + std::to_string(plan.k));
  }
  std::size_t prev = 0;
  for (std::size_t b : plan.boundaries) {
    if (b <= prev) {
      out.push_back("boundary " + std::to_string(b) + " is not strictly after " +
                    std::to_string(prev));
    }
    if (b >= token_count) {
      out.push_back("boundary " + std::to_string(b) + " is not interior to " +
                    std::to_string(token_count) + " tokens");
    }
    prev = b;
  }
  return out;
}

std::string to_string(PotentialSource source) {
  switch (source) {
    case PotentialSource::oracle:
      return "oracle";
    case PotentialSource::log:
      return "log";
    case PotentialSource::terminal_outcome:
      return "terminal-outcome";
  }
  return "unknown";
}

std::string to_string(Estimator estimator) {
  switch (estimator) {
    case Estimator::shape:
      return "shape";
    case Estimator::mrt:
      return "mrt";
    case Estimator::grpo:
      return "grpo";
  }
  return "unknown";
}

Estimator parse_estimator(const std::string& name) {
  if (name == "shape") return Estimator::shape;
  if (name == "mrt") return Estimator::mrt;
  if (name == "grpo") return Estimator::grpo;
  throw InvalidInput("unknown estimator '" + name + "' (expected shape, mrt or grpo)");
}

bool on_grid(double value, std::size_t m, double tolerance) {
  if (m == 0 || !std::isfinite(value)) return false;
  const double scaled = value * static_cast<double>(m);
  return std::abs(value - std::round(scaled) / static_cast<double>(m)) <= tolerance;
}

std::vector<std::string> validate(const TrajectoryRecord& record, const ShapingConfig& config) {
  std::vector<std::string> out;
  const std::string who = record.id.empty() ? std::string("record") : "record '" + record.id + "'";
  if (record.tokens.empty()) out.push_back(who + ": tokens must be non-empty");
  for (std::size_t i = 0; i < record.tokens.size(); ++i) {
    const double h = record.tokens[i].entropy;
    if (!std::isfinite(h) || h < 0.0) {
      std::ostringstream msg;
      msg << who << ": token " << i << " entropy " << h << " is not a non-negative real";
      out.push_back(msg.str());
    }
  }
  if (record.outcome != 0 && record.outcome != 1) {
    out.push_back(who + ": outcome not binary (got " + std::to_string(record.outcome) + ")");
  }
  if (record.boundary_potentials) {
    const auto& phi = *record.boundary_potentials;
    if (phi.size() < 2) {
      out.push_back(who + ": boundary_potentials needs K+1 >= 2 values");
    }
    for (std::size_t i = 0; i < phi.size(); ++i) {
      std::ostringstream msg;
      if (!(phi[i] >= 0.0 && phi[i] <= 1.0)) {
        msg << who << ": potential " << i << " = " << phi[i] << " outside [0, 1]";
        out.push_back(msg.str());
      } else if (!on_grid(phi[i], config.m_rollouts)) {
        msg << who << ": potential " << i << " = " << phi[i] << " off 1/"
            << config.m_rollouts << " grid";
        out.push_back(msg.str());
      }
    }
  }
  return out;
}

}  // namespace shape
