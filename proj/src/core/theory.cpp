#include "shape/theory.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <mutex>
#include <sstream>

#include "parallel.hpp"
#include "shape/errors.hpp"
#include "shape/shaping.hpp"
#include "shape/simulator.hpp"

namespace shape::theory {

std::vector<GammaRow> reproduce_gamma_table() {
  std::vector<GammaRow> rows;
  for (double gamma : {1.0, 0.9, 0.8, 0.7, 0.6}) {
    rows.push_back(GammaRow{gamma, gamma * kTablePhiNext, kTablePhiK,
                            shaping_term(kTablePhiK, kTablePhiNext, gamma)});
  }
  return rows;
}

double round_decimals(double value, int decimals) {
  const double scale = std::pow(10.0, decimals);
  double scaled = value * scale;
  scaled += std::copysign(1e-9 * std::max(1.0, std::abs(scaled)), scaled);
  return std::round(scaled) / scale;
}

double critical_gamma(double phi_k, double phi_next) {
  if (!(phi_next > 0.0)) throw InvalidInput("critical gamma needs Phi_next > 0");
  return phi_k / phi_next;
}

ConsistencyReport fuzz_task_consistency(std::size_t trials, std::uint64_t seed,
                                        const ShapingConfig& config) {
  if (!(config.alpha < 0.5)) {
    throw ConfigError("task consistency needs alpha < 0.5 (got " + std::to_string(config.alpha) +
                      ")");
  }
  require_valid(config);
  const double alpha = config.alpha;
  const std::size_t m = config.m_rollouts;

  ConsistencyReport report;
  report.trials = trials;
  report.min_correct = std::numeric_limits<double>::infinity();
  report.max_incorrect = -std::numeric_limits<double>::infinity();
  std::mutex mu;

  const std::size_t workers = std::max<std::size_t>(1, config.threads);
  const std::size_t chunk = (trials + workers - 1) / workers;
  detail::parallel_for(workers, workers, [&](std::size_t w) {
    std::size_t violations = 0;
    double min_correct = std::numeric_limits<double>::infinity();
    double max_incorrect = -std::numeric_limits<double>::infinity();
    std::vector<double> profile;
    std::vector<std::size_t> lengths;
    for (std::size_t t = w * chunk; t < std::min(trials, (w + 1) * chunk); ++t) {
      sim::Rng rng = sim::make_rng(sim::mix_seed(seed, t));
      const std::size_t K = std::uniform_int_distribution<std::size_t>(1, 24)(rng);
      std::uniform_int_distribution<std::size_t> level(0, m);
      std::uniform_int_distribution<std::size_t> len(
          0, static_cast<std::size_t>(std::ceil(3.0 * config.l_ref)));
      profile.resize(K + 1);
      lengths.resize(K);
      for (double& phi : profile) phi = static_cast<double>(level(rng)) / static_cast<double>(m);
      for (auto& l : lengths) l = len(rng);

      const double correct = total_reward(profile, lengths, 1.0, config);
      const double incorrect = total_reward(profile, lengths, 0.0, config);
      if (correct < 1.0 - alpha - 1e-9) ++violations;
      if (incorrect > alpha + 1e-9) ++violations;
      min_correct = std::min(min_correct, correct);
      max_incorrect = std::max(max_incorrect, incorrect);
    }
    std::lock_guard lock(mu);
    report.violations += violations;
    report.min_correct = std::min(report.min_correct, min_correct);
    report.max_incorrect = std::max(report.max_incorrect, max_incorrect);
  });
  return report;
}

SignReport sign_consistency(std::size_t m, double gamma) {
  if (m == 0) throw InvalidInput("grid width must be >= 1");
  SignReport r;
  r.min_shaping = std::numeric_limits<double>::infinity();
  const double g = static_cast<double>(m);
  for (std::size_t a = 0; a <= m; ++a) {
    for (std::size_t b = a + 1; b <= m; ++b) {
      const double f = shaping_term(a / g, b / g, gamma);
      ++r.pairs;
      if (f > 0.0) ++r.positive;
      if (f < 0.0) ++r.negative;
      r.min_shaping = std::min(r.min_shaping, f);
    }
  }
  return r;
}

double d_shaping_d_phi(double length, double l_ref, double gamma_min) {
  return dynamic_gamma(length, l_ref, gamma_min) - 1.0;
}

double d_shaping_d_length(double phi_next, double length, double l_ref, double gamma_min) {
  // Right limit at the kink: the floor region has zero slope.
  if (length >= l_ref) return 0.0;
  return -phi_next * (1.0 - gamma_min) / l_ref;
}

DerivativeReport derivative_check(std::size_t samples, double step, std::uint64_t seed) {
  if (!(step > 0.0 && step <= 1e-2)) throw InvalidInput("step must lie in (0, 1e-2]");
  DerivativeReport r;
  r.samples = samples;
  sim::Rng rng = sim::make_rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t i = 0; i < samples; ++i) {
    const double gamma_min = 0.5 + 0.49 * unit(rng);
    const double l_ref = 16.0 + 2032.0 * unit(rng);
    const double phi_k = unit(rng);
    const double phi_next = unit(rng);
    const double gain = phi_next - phi_k;
    const bool clamped = unit(rng) < 0.3;
    const double length = clamped ? l_ref + 2 * step + 2 * l_ref * unit(rng)
                                  : 2 * step + (l_ref - 4 * step) * unit(rng);
    r.clamped_samples += clamped ? 1 : 0;

    auto f_of_phi = [&](double x) {
      return shaping_term(x, x + gain, dynamic_gamma(length, l_ref, gamma_min));
    };
    const double fd_phi = (f_of_phi(phi_k + step) - f_of_phi(phi_k - step)) / (2 * step);
    r.max_error_phi = std::max(r.max_error_phi,
                               std::abs(fd_phi - d_shaping_d_phi(length, l_ref, gamma_min)));

    auto f_of_len = [&](double len) {
      return shaping_term(phi_k, phi_next, dynamic_gamma(len, l_ref, gamma_min));
    };
    const double fd_len = (f_of_len(length + step) - f_of_len(length - step)) / (2 * step);
    r.max_error_length =
        std::max(r.max_error_length,
                 std::abs(fd_len - d_shaping_d_length(phi_next, length, l_ref, gamma_min)));
  }
  return r;
}

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

CheckResult check_gamma_table() {
  constexpr std::array<double, 5> kPrintedF = {0.250, 0.163, 0.075, -0.013, -0.100};
  constexpr std::array<double, 5> kPrintedDiscounted = {0.875, 0.788, 0.700, 0.613, 0.525};
  const auto rows = reproduce_gamma_table();
  CheckResult c{"gamma-table", true, ""};
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double f = round_decimals(rows[i].shaping, 3);
    const double d = round_decimals(rows[i].discounted_next, 3);
    const bool ok = std::abs(f - kPrintedF[i]) <= 5e-4 && std::abs(d - kPrintedDiscounted[i]) <= 5e-4;
    c.passed = c.passed && ok;
    c.detail += (i ? "; " : "") + std::string("gamma=") + fmt(rows[i].gamma) + " F=" + fmt(f) +
                (ok ? "" : " MISMATCH");
  }
  return c;
}

CheckResult check_consistency(std::size_t trials, std::uint64_t seed, const ShapingConfig& config) {
  const auto r = fuzz_task_consistency(trials, seed, config);
  const double a = config.alpha;
  const bool ok = r.violations == 0 && r.min_correct >= 1.0 - a - 1e-9 &&
                  r.max_incorrect <= a + 1e-9 && r.margin() >= 1.0 - 2.0 * a - 1e-9;
  return {"consistency", ok,
          "trials=" + std::to_string(r.trials) + " violations=" + std::to_string(r.violations) +
              " min_correct=" + fmt(r.min_correct) + " max_incorrect=" + fmt(r.max_incorrect) +
              " bound=[" + fmt(1.0 - a) + ", " + fmt(a) + "]"};
}

CheckResult check_sign(std::size_t m, double gamma_min) {
  const auto hi = sign_consistency(m, 1.0);
  const auto floor = sign_consistency(m, gamma_min);
  const auto low = sign_consistency(8, 0.7);  // the printed counterexample lives on 1/8
  const double counterexample = shaping_term(5.0 / 8.0, 7.0 / 8.0, 0.7);
  const bool ok = hi.positive == hi.pairs && floor.positive == floor.pairs && low.negative > 0 &&
                  counterexample < 0.0;
  return {"sign", ok,
          "pairs=" + std::to_string(hi.pairs) + " positive@1.0=" + std::to_string(hi.positive) +
              " positive@gamma_min=" + fmt(gamma_min) + ":" + std::to_string(floor.positive) +
              " negative@0.7=" + std::to_string(low.negative) +
              " F(5/8->7/8,0.7)=" + fmt(counterexample)};
}

CheckResult check_derivatives(std::size_t samples, std::uint64_t seed) {
  const auto r = derivative_check(samples, 1e-5, seed);
  const bool ok = r.max_error_phi < 1e-6 && r.max_error_length < 1e-6;
  return {"derivatives", ok,
          "samples=" + std::to_string(r.samples) + " max_err_phi=" + fmt(r.max_error_phi) +
              " max_err_length=" + fmt(r.max_error_length) +
              " clamped=" + std::to_string(r.clamped_samples)};
}

}  // namespace

std::vector<CheckResult> run_suite(const std::string& suite, std::size_t trials,
                                   std::uint64_t seed, const ShapingConfig& config) {
  const bool all = suite == "all";
  std::vector<CheckResult> out;
  if (all || suite == "gamma-table") out.push_back(check_gamma_table());
  if (all || suite == "consistency") out.push_back(check_consistency(trials, seed, config));
  if (all || suite == "sign") out.push_back(check_sign(config.m_rollouts, config.gamma_min));
  if (all || suite == "derivatives") {
    out.push_back(check_derivatives(std::max<std::size_t>(trials, 1000), seed));
  }
  if (out.empty()) {
    throw InvalidInput("unknown check suite '" + suite +
                       "' (expected consistency, gamma-table, sign, derivatives or all)");
  }
  return out;
}

}  // namespace shape::theory
