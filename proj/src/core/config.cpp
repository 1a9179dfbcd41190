#include "shape/config.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "shape/errors.hpp"

namespace shape {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

double parse_real(std::string_view key, std::string_view value) {
  const std::string text(value);
  char* end = nullptr;
  errno = 0;
  const double out = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size() || errno == ERANGE ||
      !std::isfinite(out)) {
    throw ConfigError("config key '" + std::string(key) + "': '" + text +
                      "' is not a finite real");
  }
  return out;
}

std::size_t parse_count(std::string_view key, std::string_view value) {
  const double real = parse_real(key, value);
  if (real < 0 || std::floor(real) != real) {
    throw ConfigError("config key '" + std::string(key) + "': '" +
                      std::string(value) + "' is not a non-negative integer");
  }
  return static_cast<std::size_t>(real);
}

bool parse_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1" || value == "on" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "off" || value == "no") return false;
  throw ConfigError("config key '" + std::string(key) + "': '" + std::string(value) +
                    "' is not a boolean");
}

}  // namespace

std::string to_string(OutcomeMode mode) {
  return mode == OutcomeMode::raw ? "raw" : "group";
}

std::vector<std::string> config_violations(const ShapingConfig& c) {
  std::vector<std::string> out;
  if (!(c.alpha > 0.0 && c.alpha < 0.5)) {
    out.push_back("alpha must satisfy 0 < alpha < 0.5 (task consistency requires alpha < 0.5)");
  }
  if (!(c.gamma_min > 0.0 && c.gamma_min < 1.0)) {
    out.push_back("gamma_min must lie in (0, 1)");
  }
  if (!(c.l_ref > 0.0) || !std::isfinite(c.l_ref)) {
    out.push_back("l_ref must be a positive token count");
  }
  if (c.k_segments == 0) out.push_back("k_segments must be >= 1");
  if (c.m_rollouts == 0) out.push_back("m_rollouts must be >= 1");
  if (c.tau && !std::isfinite(*c.tau)) out.push_back("tau must be finite");
  if (!(c.beta >= 0.0)) out.push_back("beta must be non-negative");
  if (!(c.delta_min > 0.0 && c.delta_min <= 1.0 && c.delta_max >= 1.0)) {
    out.push_back("delta bounds must satisfy 0 < delta_min <= 1 <= delta_max");
  }
  if (!(c.epsilon > 0.0)) out.push_back("epsilon must be positive");
  if (c.fixed_gamma && !(*c.fixed_gamma > 0.0 && *c.fixed_gamma <= 1.0)) {
    out.push_back("fixed_gamma must lie in (0, 1]");
  }
  if (c.min_gap && *c.min_gap == 0) out.push_back("min_gap must be >= 1");
  if (c.threads == 0) out.push_back("threads must be >= 1");
  return out;
}

void require_valid(const ShapingConfig& config) {
  const auto violations = config_violations(config);
  if (violations.empty()) return;
  std::string msg = "invalid config:";
  for (const auto& v : violations) msg += "\n  " + v;
  throw ConfigError(msg);
}

void set_config_value(ShapingConfig& c, std::string_view key, std::string_view raw) {
  const std::string_view value = trim(raw);
  if (key == "alpha") {
    c.alpha = parse_real(key, value);
  } else if (key == "gamma_min") {
    c.gamma_min = parse_real(key, value);
  } else if (key == "l_ref") {
    c.l_ref = parse_real(key, value);
  } else if (key == "k_segments") {
    c.k_segments = parse_count(key, value);
  } else if (key == "m_rollouts") {
    c.m_rollouts = parse_count(key, value);
  } else if (key == "tau") {
    c.tau = parse_real(key, value);
  } else if (key == "beta") {
    c.beta = parse_real(key, value);
  } else if (key == "delta_min") {
    c.delta_min = parse_real(key, value);
  } else if (key == "delta_max") {
    c.delta_max = parse_real(key, value);
  } else if (key == "epsilon") {
    c.epsilon = parse_real(key, value);
  } else if (key == "outcome_mode") {
    if (value == "raw") {
      c.outcome_mode = OutcomeMode::raw;
    } else if (value == "group") {
      c.outcome_mode = OutcomeMode::group;
    } else {
      throw ConfigError("config key 'outcome_mode': expected raw or group");
    }
  } else if (key == "fixed_gamma") {
    if (value == "none" || value.empty()) {
      c.fixed_gamma.reset();
    } else {
      c.fixed_gamma = parse_real(key, value);
    }
  } else if (key == "tcr") {
    c.tcr = parse_bool(key, value);
  } else if (key == "min_gap") {
    c.min_gap = parse_count(key, value);
  } else if (key == "threads") {
    c.threads = parse_count(key, value);
  } else {
    throw ConfigError("unknown config key '" + std::string(key) + "'");
  }
  c.explicit_keys.insert(std::string(key));
}

ShapingConfig parse_config(std::string_view text, ShapingConfig base) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? nl : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    auto sep = line.find('=');
    if (sep == std::string_view::npos) sep = line.find(':');
    if (sep == std::string_view::npos) {
      throw ParseError("expected 'key = value'", line_no);
    }
    const auto key = trim(line.substr(0, sep));
    try {
      set_config_value(base, key, line.substr(sep + 1));
    } catch (const ConfigError& e) {
      throw ConfigError("config line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return base;
}

ShapingConfig load_config_file(const std::string& path, ShapingConfig base) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), std::move(base));
}

}  // namespace shape
