#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace shape {

// How R_outcome enters the segment advantages.
//   raw   - the binary outcome itself
//   group - the group-normalized outcome (same normalization as GRPO)
enum class OutcomeMode { raw, group };

// All scalar knobs of the credit-assignment pipeline.
//
// Keys in the flat config file carry exactly these member names. tau has no
// built-in default; operations that segment by entropy reject a config
// without one.
struct ShapingConfig {
  double alpha = 0.3;
  double gamma_min = 0.9;
  double l_ref = 512.0;
  std::size_t k_segments = 8;
  std::size_t m_rollouts = 8;
  std::optional<double> tau;
  double beta = 0.5;
  double delta_min = 0.5;
  double delta_max = 1.5;
  double epsilon = 1e-6;

  // Ablation and pipeline switches.
  OutcomeMode outcome_mode = OutcomeMode::raw;
  std::optional<double> fixed_gamma;  // gamma_k held constant when set
  bool tcr = true;                    // token-level redistribution on/off
  std::optional<std::size_t> min_gap;  // segmentation exclusion radius
  std::size_t threads = 1;

  // Keys assigned from a file or a flag rather than left at the default.
  std::set<std::string> explicit_keys;

  bool is_explicit(std::string_view key) const {
    return explicit_keys.count(std::string(key)) != 0;
  }
};

// Every invariant the config breaks; empty when usable.
std::vector<std::string> config_violations(const ShapingConfig& config);

// Throws ConfigError listing all violations.
void require_valid(const ShapingConfig& config);

// Assigns one key from its textual value. Unknown keys and unparsable values
// throw ConfigError. Range checks are left to config_violations.
void set_config_value(ShapingConfig& config, std::string_view key,
                      std::string_view value);

// Flat "key = value" text; '#' starts a comment; "key: value" also accepted.
ShapingConfig parse_config(std::string_view text,
                           ShapingConfig base = ShapingConfig{});
ShapingConfig load_config_file(const std::string& path,
                               ShapingConfig base = ShapingConfig{});

std::string to_string(OutcomeMode mode);

}  // namespace shape
