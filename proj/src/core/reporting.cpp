#include "shape/reporting.hpp"

#include <algorithm>
#include <numeric>

#include "shape/errors.hpp"

namespace shape {

std::vector<Transition> collect_transitions(std::span<const TrajectoryRecord> records,
                                            std::size_t stride) {
  if (stride == 0) throw InvalidInput("stride must be >= 1");
  std::vector<Transition> out;
  for (std::size_t i = 0; i < records.size(); i += stride) {
    const auto& rec = records[i];
    if (!rec.boundary_potentials || rec.boundary_potentials->size() < 3) continue;
    const auto& phi = *rec.boundary_potentials;
    // The last entry is the terminal outcome, not an estimated potential.
    for (std::size_t k = 0; k + 2 < phi.size(); ++k) {
      out.push_back(Transition{phi[k], phi[k + 1] - phi[k], rec.outcome});
    }
  }
  return out;
}

namespace {

RegressionFit fit(const std::vector<Transition>& points, const char* group) {
  if (points.size() < 2) {
    throw InvalidInput(std::string(group) + " group has fewer than 2 transitions");
  }
  const double n = static_cast<double>(points.size());
  double mx = 0.0;
  double my = 0.0;
  for (const auto& p : points) {
    mx += p.gain;
    my += p.outcome;
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (const auto& p : points) {
    sxx += (p.gain - mx) * (p.gain - mx);
    sxy += (p.gain - mx) * (p.outcome - my);
  }
  if (sxx == 0.0) {
    throw InvalidInput(std::string(group) + " group has no variance in potential gain");
  }
  RegressionFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.points = points.size();
  // Centring subtracts the raw intercept from every outcome; the refit on the
  // centred data keeps the slope and moves the intercept to zero.
  return f;
}

}  // namespace

GainRegression gain_regression(std::span<const Transition> transitions, double threshold_low,
                               double threshold_high) {
  std::vector<Transition> low;
  std::vector<Transition> high;
  for (const auto& t : transitions) {
    if (t.phi_start <= threshold_low) {
      if (t.gain <= -0.24) continue;  // floor effect
      low.push_back(t);
    } else if (t.phi_start >= threshold_high) {
      high.push_back(t);
    }
  }
  return GainRegression{fit(low, "low-start"), fit(high, "high-start")};
}

std::optional<std::size_t> gain_bin(double phi_start) {
  if (!(phi_start >= 0.0) || phi_start >= 1.0 - 1e-12) return std::nullopt;
  return std::min<std::size_t>(kGainBins - 1, static_cast<std::size_t>(phi_start * 4.0 + 1e-12));
}

GainDistribution gain_distribution(std::span<const Transition> transitions,
                                   std::optional<double> global_min) {
  if (transitions.empty()) throw InvalidInput("gain distribution needs transitions");
  GainDistribution d;
  std::array<double, kGainBins> sum{};
  for (const auto& t : transitions) {
    if (const auto bin = gain_bin(t.phi_start)) {
      sum[*bin] += t.gain;
      ++d.count[*bin];
    }
  }
  for (std::size_t b = 0; b < kGainBins; ++b) {
    d.mean_gain[b] = d.count[b] ? sum[b] / static_cast<double>(d.count[b]) : 0.0;
  }
  const double floor =
      global_min.value_or(*std::min_element(d.mean_gain.begin(), d.mean_gain.end())) -
      kGainShiftEpsilon;
  std::array<double, kGainBins> shifted{};
  for (std::size_t b = 0; b < kGainBins; ++b) shifted[b] = d.mean_gain[b] - floor;
  const double total = std::accumulate(shifted.begin(), shifted.end(), 0.0);
  for (std::size_t b = 0; b < kGainBins; ++b) d.percent[b] = 100.0 * shifted[b] / total;
  return d;
}

}  // namespace shape
