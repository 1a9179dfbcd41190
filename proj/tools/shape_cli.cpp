// Command-line front end; talks to the library only through shape.h.
#include <cstdio>
#include <cstdlib>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "shape/shape.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitCheckFailed = 2;

struct ConfigDeleter {
  void operator()(shape_config* c) const { shape_config_destroy(c); }
};
struct RecordsDeleter {
  void operator()(shape_records* r) const { shape_records_destroy(r); }
};
using ConfigPtr = std::unique_ptr<shape_config, ConfigDeleter>;
using RecordsPtr = std::unique_ptr<shape_records, RecordsDeleter>;

struct CliError {
  int code;
};

void check(shape_status status, const std::string& context = {}) {
  if (status == SHAPE_OK) return;
  std::fprintf(stderr, "error: %s%s\n", context.empty() ? "" : (context + ": ").c_str(),
               shape_last_error());
  throw CliError{status == SHAPE_ERR_CHECK_FAILED ? kExitCheckFailed : kExitInvalid};
}

// Shared options: config file, key overrides and the strictness of the reader.
struct Common {
  std::string config_path;
  std::vector<std::string> overrides;  // key=value
  bool strict = false;
  int threads = 0;
};

void add_common(CLI::App* cmd, Common& common, bool reads_input) {
  cmd->add_option("--config", common.config_path,
                  "Flat key = value config file (default: $SHAPE_CONFIG)");
  cmd->add_option("--set", common.overrides, "Override one config key, key=value")
      ->type_name("KEY=VALUE");
  cmd->add_option("--threads", common.threads, "Worker threads")->check(CLI::PositiveNumber);
  if (reads_input) {
    cmd->add_flag("--strict", common.strict, "Abort on the first malformed JSONL line");
  }
}

void set(shape_config* cfg, const std::string& key, const std::string& value) {
  check(shape_config_set(cfg, key.c_str(), value.c_str()), "--" + key);
}

std::string number(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

// Built-in defaults < config file < flags.
ConfigPtr make_config(const Common& common,
                      const std::vector<std::pair<std::string, std::string>>& flags) {
  shape_config* raw = nullptr;
  check(shape_config_create(&raw));
  ConfigPtr cfg(raw);
  std::string path = common.config_path;
  if (path.empty()) {
    if (const char* env = std::getenv("SHAPE_CONFIG"); env && *env) path = env;
  }
  if (!path.empty()) check(shape_config_load(cfg.get(), path.c_str()), path);
  for (const auto& kv : common.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      std::fprintf(stderr, "error: --set expects key=value, got '%s'\n", kv.c_str());
      throw CliError{kExitInvalid};
    }
    set(cfg.get(), kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (common.threads > 0) set(cfg.get(), "threads", std::to_string(common.threads));
  for (const auto& [key, value] : flags) set(cfg.get(), key, value);
  check(shape_config_validate(cfg.get()));
  return cfg;
}

RecordsPtr load_records(const std::string& path, bool strict) {
  shape_records* raw = nullptr;
  check(shape_records_load(path.c_str(), strict ? 1 : 0, &raw), path);
  RecordsPtr recs(raw);
  for (size_t i = 0; i < shape_records_skipped(recs.get()); ++i) {
    size_t line = 0;
    const char* msg = nullptr;
    check(shape_records_skipped_at(recs.get(), i, &line, &msg));
    std::fprintf(stderr, "warning: %s:%zu skipped: %s\n", path.c_str(), line, msg);
  }
  return recs;
}

shape_estimator parse_estimator(const std::string& name) {
  if (name == "shape") return SHAPE_ESTIMATOR_SHAPE;
  if (name == "mrt") return SHAPE_ESTIMATOR_MRT;
  if (name == "grpo") return SHAPE_ESTIMATOR_GRPO;
  std::fprintf(stderr, "error: unknown estimator '%s' (expected shape, mrt or grpo)\n",
               name.c_str());
  throw CliError{kExitInvalid};
}

const std::vector<std::string> kEstimatorNames = {"shape", "mrt", "grpo"};

shape_oracle parse_oracle(const std::string& name) {
  return name == "simulator" ? SHAPE_ORACLE_SIMULATOR : SHAPE_ORACLE_LOG;
}

void print_check(const char* name, int passed, const char* detail, void*) {
  std::printf("%s %s: %s\n", passed ? "PASS" : "FAIL", name, detail);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Segment-level credit assignment for reasoning trajectories"};
  app.require_subcommand(1);
  app.set_version_flag("--version", shape_version());

  // segment
  Common seg_common;
  std::string seg_input;
  std::string seg_out = "-";
  double seg_tau = 0.0;
  std::size_t seg_k = 0;
  std::size_t seg_gap = 0;
  auto* seg = app.add_subcommand("segment", "Entropy segmentation, JSONL {id, boundaries}");
  add_common(seg, seg_common, true);
  seg->add_option("--input", seg_input, "Trajectory JSONL ('-' for stdin)")->required();
  seg->add_option("--tau", seg_tau, "Entropy threshold for cutpoint candidates");
  seg->add_option("--k", seg_k, "Segments per trajectory")->check(CLI::PositiveNumber);
  seg->add_option("--min-gap", seg_gap, "Exclusion radius between boundaries")
      ->check(CLI::PositiveNumber);
  seg->add_option("--out", seg_out, "Output JSONL ('-' for stdout)");

  // score and compare share most options
  struct ScoreArgs {
    Common common;
    std::string input;
    std::string out = "-";
    std::string oracle = "log";
    bool no_tcr = false;
    double fixed_gamma = 0.0;
    double tau = 0.0;
    std::uint64_t seed = 0;
  };
  auto add_score_options = [](CLI::App* cmd, ScoreArgs& a) {
    add_common(cmd, a.common, true);
    cmd->add_option("--input", a.input, "Trajectory JSONL ('-' for stdin)")->required();
    cmd->add_option("--out", a.out, "Output path ('-' for stdout)");
    cmd->add_option("--oracle", a.oracle, "Potential source for records without logs")
        ->check(CLI::IsMember({"log", "simulator"}));
    cmd->add_flag("--no-tcr", a.no_tcr, "Broadcast segment advantages uniformly to tokens");
    cmd->add_option("--fixed-gamma", a.fixed_gamma, "Hold gamma_k constant")
        ->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--tau", a.tau, "Entropy threshold for segmentation");
    cmd->add_option("--seed", a.seed, "Rollout seed");
  };
  auto score_flags = [](const CLI::App* cmd, const ScoreArgs& a) {
    std::vector<std::pair<std::string, std::string>> flags;
    if (a.no_tcr) flags.emplace_back("tcr", "false");
    if (cmd->count("--fixed-gamma")) flags.emplace_back("fixed_gamma", number(a.fixed_gamma));
    if (cmd->count("--tau")) flags.emplace_back("tau", number(a.tau));
    return flags;
  };

  ScoreArgs score_args;
  std::string score_estimator = "shape";
  auto* score = app.add_subcommand("score", "Advantage sheets, one JSONL line per trajectory");
  add_score_options(score, score_args);
  score->add_option("--estimator", score_estimator, "shape, mrt or grpo")
      ->check(CLI::IsMember(kEstimatorNames));

  ScoreArgs cmp_args;
  std::vector<std::string> cmp_estimators = {"shape", "mrt"};
  auto* compare = app.add_subcommand("compare", "CSV, one row per (trajectory, estimator)");
  add_score_options(compare, cmp_args);
  compare->add_option("--estimators", cmp_estimators, "Comma-separated estimators")
      ->delimiter(',')
      ->check(CLI::IsMember(kEstimatorNames));

  // simulate
  Common sim_common;
  std::string sim_estimator = "shape";
  std::size_t sim_episodes = 0;
  std::uint64_t sim_seed = 0;
  std::string sim_out = "-";
  std::size_t sim_window = 0;
  double sim_lr = 0.0;
  std::string sim_traces;
  std::size_t sim_trace_count = 64;
  auto* simulate = app.add_subcommand("simulate", "Train a tabular policy on the chain");
  add_common(simulate, sim_common, false);
  simulate->add_option("--estimator", sim_estimator, "shape, mrt or grpo")
      ->check(CLI::IsMember(kEstimatorNames));
  simulate->add_option("--episodes", sim_episodes, "Training episodes")
      ->required()
      ->check(CLI::PositiveNumber);
  simulate->add_option("--seed", sim_seed, "Run seed");
  simulate->add_option("--out", sim_out, "Learning-curve CSV ('-' for stdout)");
  simulate->add_option("--window", sim_window, "Episodes per metric window (default 50)")
      ->check(CLI::PositiveNumber);
  simulate->add_option("--lr", sim_lr, "Learning rate (default 0.1)")
      ->check(CLI::PositiveNumber);
  simulate->add_option("--traces", sim_traces, "Also write episodes of the trained policy");
  simulate->add_option("--trace-count", sim_trace_count, "Episodes written to --traces")
      ->check(CLI::PositiveNumber);

  // sandbag
  Common sb_common;
  std::string sb_out = "-";
  auto* sandbag = app.add_subcommand("sandbag", "Shaping bonus of a monotone vs a dip path");
  add_common(sandbag, sb_common, false);
  sandbag->add_option("--out", sb_out, "CSV ('-' for stdout)");

  // check
  Common chk_common;
  std::string chk_suite = "all";
  std::size_t chk_trials = 10000;
  std::uint64_t chk_seed = 0;
  auto* chk = app.add_subcommand("check", "Numerical property suites");
  add_common(chk, chk_common, false);
  chk->add_option("--suite", chk_suite, "consistency, gamma-table, sign, derivatives or all")
      ->check(CLI::IsMember({"consistency", "gamma-table", "sign", "derivatives", "all"}));
  chk->add_option("--trials", chk_trials, "Random trials")->check(CLI::PositiveNumber);
  chk->add_option("--seed", chk_seed, "Seed");

  // report
  Common rep_common;
  std::string rep_input;
  std::string rep_kind = "regression";
  std::size_t rep_stride = 10;
  std::string rep_out = "-";
  auto* report = app.add_subcommand("report", "Gain regression or gain distribution CSV");
  add_common(report, rep_common, true);
  report->add_option("--input", rep_input, "Trajectory JSONL with boundary potentials")
      ->required();
  report->add_option("--kind", rep_kind, "regression or distribution")
      ->check(CLI::IsMember({"regression", "distribution"}));
  report->add_option("--stride", rep_stride, "Use every n-th trajectory")
      ->check(CLI::PositiveNumber);
  report->add_option("--out", rep_out, "CSV ('-' for stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  try {
    if (*seg) {
      std::vector<std::pair<std::string, std::string>> flags;
      if (seg->count("--tau")) flags.emplace_back("tau", number(seg_tau));
      if (seg->count("--k")) flags.emplace_back("k_segments", std::to_string(seg_k));
      if (seg->count("--min-gap")) flags.emplace_back("min_gap", std::to_string(seg_gap));
      auto cfg = make_config(seg_common, flags);
      auto recs = load_records(seg_input, seg_common.strict);
      check(shape_segment(recs.get(), cfg.get(), seg_out.c_str()));
    } else if (*score) {
      auto cfg = make_config(score_args.common, score_flags(score, score_args));
      auto recs = load_records(score_args.input, score_args.common.strict);
      check(shape_score(recs.get(), cfg.get(), parse_estimator(score_estimator),
                        parse_oracle(score_args.oracle), score_args.seed,
                        score_args.out.c_str()));
    } else if (*compare) {
      auto cfg = make_config(cmp_args.common, score_flags(compare, cmp_args));
      auto recs = load_records(cmp_args.input, cmp_args.common.strict);
      std::vector<shape_estimator> ests;
      for (const auto& name : cmp_estimators) ests.push_back(parse_estimator(name));
      check(shape_compare(recs.get(), cfg.get(), ests.data(), ests.size(),
                          parse_oracle(cmp_args.oracle), cmp_args.seed, cmp_args.out.c_str()));
    } else if (*simulate) {
      auto cfg = make_config(sim_common, {});
      shape_simulate_options opts;
      shape_simulate_defaults(&opts);
      opts.estimator = parse_estimator(sim_estimator);
      opts.episodes = sim_episodes;
      opts.seed = sim_seed;
      if (sim_lr > 0.0) opts.learning_rate = sim_lr;
      if (sim_window > 0) opts.window = sim_window;
      if (!sim_traces.empty()) {
        opts.traces_path = sim_traces.c_str();
        opts.trace_count = sim_trace_count;
      }
      shape_simulate_summary summary{};
      check(shape_simulate(cfg.get(), &opts, sim_out.c_str(), &summary));
      std::fprintf(stderr,
                   "%s seed=%llu success=%.4f mean_tokens=%.2f last_window: success=%.3f "
                   "tokens=%.2f drop_rate=%.4f\n",
                   sim_estimator.c_str(), static_cast<unsigned long long>(sim_seed),
                   summary.final_success, summary.final_mean_tokens,
                   summary.last_window_success, summary.last_window_tokens,
                   summary.last_window_drop_rate);
    } else if (*sandbag) {
      auto cfg = make_config(sb_common, {});
      shape_sandbag_summary s{};
      check(shape_sandbag(cfg.get(), sb_out.c_str(), &s));
      std::fprintf(stderr, "mrt: monotone=%.4f dip=%.4f | shape: monotone=%.4f dip=%.4f\n",
                   s.mrt_bonus_monotone, s.mrt_bonus_dip, s.shape_bonus_monotone,
                   s.shape_bonus_dip);
    } else if (*chk) {
      auto cfg = make_config(chk_common, {});
      check(shape_check(cfg.get(), chk_suite.c_str(), chk_trials, chk_seed, print_check,
                        nullptr));
    } else if (*report) {
      make_config(rep_common, {});
      auto recs = load_records(rep_input, rep_common.strict);
      check(shape_report(recs.get(),
                         rep_kind == "distribution" ? SHAPE_REPORT_DISTRIBUTION
                                                    : SHAPE_REPORT_REGRESSION,
                         rep_stride, rep_out.c_str()));
    }
  } catch (const CliError& e) {
    return e.code;
  }
  return kExitOk;
}
