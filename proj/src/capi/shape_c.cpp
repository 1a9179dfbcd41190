#include "shape/shape.h"

#include <algorithm>
#include <cmath>
#include <exception>
#include <memory>
#include <new>
#include <numeric>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "shape/config.hpp"
#include "shape/errors.hpp"
#include "shape/io.hpp"
#include "shape/pipeline.hpp"
#include "shape/potential.hpp"
#include "shape/redistribution.hpp"
#include "shape/reporting.hpp"
#include "shape/segmentation.hpp"
#include "shape/shaping.hpp"
#include "shape/simulator.hpp"
#include "shape/theory.hpp"

struct shape_config {
  shape::ShapingConfig value;
};

struct shape_records {
  shape::LoadResult loaded;
};

namespace {

thread_local std::string g_last_error;

shape_status fail(shape_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

// Runs fn, translating core exceptions into status codes.
template <class Fn>
shape_status guarded(Fn&& fn) {
  try {
    g_last_error.clear();
    return fn();
  } catch (const shape::ConfigError& e) {
    return fail(SHAPE_ERR_CONFIG, e.what());
  } catch (const shape::ValidationError& e) {
    return fail(SHAPE_ERR_VALIDATION, e.what());
  } catch (const shape::ParseError& e) {
    return fail(SHAPE_ERR_PARSE, e.what());
  } catch (const shape::DimensionError& e) {
    return fail(SHAPE_ERR_DIMENSION, e.what());
  } catch (const shape::OracleError& e) {
    return fail(SHAPE_ERR_ORACLE, e.what());
  } catch (const shape::IoError& e) {
    return fail(SHAPE_ERR_IO, e.what());
  } catch (const shape::DivergenceError& e) {
    return fail(SHAPE_ERR_DIVERGENCE, e.what());
  } catch (const shape::InvalidInput& e) {
    return fail(SHAPE_ERR_INVALID_INPUT, e.what());
  } catch (const std::bad_alloc&) {
    return fail(SHAPE_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(SHAPE_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(SHAPE_ERR_INTERNAL, "unknown error");
  }
}

#define SHAPE_REQUIRE(cond, what) \
  if (!(cond)) return fail(SHAPE_ERR_INVALID_INPUT, what)

shape::Estimator to_core(shape_estimator e) {
  switch (e) {
    case SHAPE_ESTIMATOR_SHAPE:
      return shape::Estimator::shape;
    case SHAPE_ESTIMATOR_MRT:
      return shape::Estimator::mrt;
    case SHAPE_ESTIMATOR_GRPO:
      return shape::Estimator::grpo;
  }
  throw shape::InvalidInput("unknown estimator " + std::to_string(static_cast<int>(e)));
}

std::vector<shape::AdvantageSheet> score_with(const shape_records* records,
                                              const shape::ShapingConfig& config,
                                              shape_estimator estimator, shape_oracle oracle,
                                              std::uint64_t seed) {
  std::unique_ptr<shape::sim::SimulatorOracle> sim;
  if (oracle == SHAPE_ORACLE_SIMULATOR) {
    const auto env = shape::sim::ChainEnv::make_default();
    sim = std::make_unique<shape::sim::SimulatorOracle>(env,
                                                        shape::sim::TabularPolicy::uniform(env));
  } else if (oracle != SHAPE_ORACLE_LOG) {
    throw shape::InvalidInput("unknown oracle");
  }
  shape::ScoreOptions options;
  options.estimator = to_core(estimator);
  options.oracle = sim.get();
  options.seed = seed;
  return shape::score_records(records->loaded.records, config, options);
}

std::string join(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ';';
    out += shape::format_double(values[i]);
  }
  return out;
}

}  // namespace

extern "C" {

const char* shape_last_error(void) { return g_last_error.c_str(); }

const char* shape_status_name(shape_status status) {
  switch (status) {
    case SHAPE_OK: return "ok";
    case SHAPE_ERR_CONFIG: return "config error";
    case SHAPE_ERR_INVALID_INPUT: return "invalid input";
    case SHAPE_ERR_DIMENSION: return "dimension mismatch";
    case SHAPE_ERR_PARSE: return "parse error";
    case SHAPE_ERR_VALIDATION: return "validation error";
    case SHAPE_ERR_ORACLE: return "oracle error";
    case SHAPE_ERR_IO: return "i/o error";
    case SHAPE_ERR_DIVERGENCE: return "divergence";
    case SHAPE_ERR_CHECK_FAILED: return "check failed";
    case SHAPE_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* shape_version(void) { return "0.1.0"; }

shape_status shape_config_create(shape_config** out) {
  SHAPE_REQUIRE(out, "null output pointer");
  return guarded([&] {
    *out = new shape_config{};
    return SHAPE_OK;
  });
}

void shape_config_destroy(shape_config* config) { delete config; }

shape_status shape_config_set(shape_config* config, const char* key, const char* value) {
  SHAPE_REQUIRE(config && key && value, "null argument");
  return guarded([&] {
    shape::set_config_value(config->value, key, value);
    return SHAPE_OK;
  });
}

shape_status shape_config_load(shape_config* config, const char* path) {
  SHAPE_REQUIRE(config && path, "null argument");
  return guarded([&] {
    config->value = shape::load_config_file(path, config->value);
    return SHAPE_OK;
  });
}

shape_status shape_config_validate(const shape_config* config) {
  SHAPE_REQUIRE(config, "null config");
  return guarded([&] {
    shape::require_valid(config->value);
    return SHAPE_OK;
  });
}

shape_status shape_config_get(const shape_config* config, const char* key, double* out) {
  SHAPE_REQUIRE(config && key && out, "null argument");
  const auto& c = config->value;
  const std::string k = key;
  if (k == "alpha") *out = c.alpha;
  else if (k == "gamma_min") *out = c.gamma_min;
  else if (k == "l_ref") *out = c.l_ref;
  else if (k == "k_segments") *out = static_cast<double>(c.k_segments);
  else if (k == "m_rollouts") *out = static_cast<double>(c.m_rollouts);
  else if (k == "beta") *out = c.beta;
  else if (k == "delta_min") *out = c.delta_min;
  else if (k == "delta_max") *out = c.delta_max;
  else if (k == "epsilon") *out = c.epsilon;
  else if (k == "threads") *out = static_cast<double>(c.threads);
  else if (k == "tcr") *out = c.tcr ? 1.0 : 0.0;
  else if (k == "outcome_mode") *out = c.outcome_mode == shape::OutcomeMode::group ? 1.0 : 0.0;
  else if (k == "tau" || k == "fixed_gamma" || k == "min_gap") {
    const std::optional<double> v =
        k == "tau" ? c.tau
        : k == "fixed_gamma"
            ? c.fixed_gamma
            : (c.min_gap ? std::optional<double>(static_cast<double>(*c.min_gap)) : std::nullopt);
    if (!v) return fail(SHAPE_ERR_CONFIG, k + " is not set");
    *out = *v;
  } else {
    return fail(SHAPE_ERR_CONFIG, "unknown config key '" + k + "'");
  }
  g_last_error.clear();
  return SHAPE_OK;
}

shape_status shape_records_load(const char* path, int strict, shape_records** out) {
  SHAPE_REQUIRE(path && out, "null argument");
  return guarded([&] {
    auto recs = std::make_unique<shape_records>();
    recs->loaded = shape::read_jsonl_file(path, strict != 0);
    *out = recs.release();
    return SHAPE_OK;
  });
}

void shape_records_destroy(shape_records* records) { delete records; }

size_t shape_records_count(const shape_records* records) {
  return records ? records->loaded.records.size() : 0;
}

size_t shape_records_skipped(const shape_records* records) {
  return records ? records->loaded.skipped.size() : 0;
}

shape_status shape_records_skipped_at(const shape_records* records, size_t i, size_t* line,
                                      const char** message) {
  SHAPE_REQUIRE(records && line && message, "null argument");
  SHAPE_REQUIRE(i < records->loaded.skipped.size(), "skipped-line index out of range");
  *line = records->loaded.skipped[i].line;
  *message = records->loaded.skipped[i].message.c_str();
  g_last_error.clear();
  return SHAPE_OK;
}

shape_status shape_segment(const shape_records* records, const shape_config* config,
                           const char* out_path) {
  SHAPE_REQUIRE(records && config && out_path, "null argument");
  return guarded([&] {
    shape::require_valid(config->value);
    std::vector<shape::SegmentPlan> plans;
    plans.reserve(records->loaded.records.size());
    for (const auto& rec : records->loaded.records) {
      plans.push_back(shape::plan_record(rec, config->value));
    }
    shape::write_file_atomic(out_path, [&](std::ostream& os) {
      for (std::size_t i = 0; i < plans.size(); ++i) {
        nlohmann::json j;
        j["id"] = records->loaded.records[i].id;
        j["boundaries"] = plans[i].boundaries;
        os << j.dump() << '\n';
      }
    });
    return SHAPE_OK;
  });
}

shape_status shape_score(const shape_records* records, const shape_config* config,
                         shape_estimator estimator, shape_oracle oracle, uint64_t seed,
                         const char* out_path) {
  SHAPE_REQUIRE(records && config && out_path, "null argument");
  return guarded([&] {
    const auto sheets = score_with(records, config->value, estimator, oracle, seed);
    shape::write_file_atomic(out_path, [&](std::ostream& os) {
      for (const auto& s : sheets) os << shape::serialize_sheet(s) << '\n';
    });
    return SHAPE_OK;
  });
}

shape_status shape_compare(const shape_records* records, const shape_config* config,
                           const shape_estimator* estimators, size_t n_estimators,
                           shape_oracle oracle, uint64_t seed, const char* out_path) {
  SHAPE_REQUIRE(records && config && estimators && out_path, "null argument");
  SHAPE_REQUIRE(n_estimators > 0, "compare needs at least one estimator");
  return guarded([&] {
    std::vector<std::vector<shape::AdvantageSheet>> runs;
    for (size_t e = 0; e < n_estimators; ++e) {
      runs.push_back(score_with(records, config->value, estimators[e], oracle, seed));
    }
    const auto& recs = records->loaded.records;
    shape::write_file_atomic(out_path, [&](std::ostream& os) {
      os << "id,estimator,outcome,k,segment_advantage_sum,token_advantage_mean,shaping_sum,"
            "segment_advantages\n";
      for (std::size_t r = 0; r < recs.size(); ++r) {
        for (const auto& run : runs) {
          const auto& s = run[r];
          const double seg_sum =
              std::accumulate(s.segment_advantages.begin(), s.segment_advantages.end(), 0.0);
          const double tok_mean =
              s.token_advantages.empty()
                  ? 0.0
                  : std::accumulate(s.token_advantages.begin(), s.token_advantages.end(), 0.0) /
                        static_cast<double>(s.token_advantages.size());
          double shaping = 0.0;
          for (const auto& t : s.shaping_terms) shaping += t.value;
          os << shape::csv_field(s.id) << ',' << shape::to_string(s.estimator) << ','
             << recs[r].outcome << ',' << s.segment_advantages.size() << ','
             << shape::format_double(seg_sum) << ',' << shape::format_double(tok_mean) << ','
             << shape::format_double(shaping) << ',' << join(s.segment_advantages) << '\n';
        }
      }
    });
    return SHAPE_OK;
  });
}

void shape_simulate_defaults(shape_simulate_options* options) {
  if (!options) return;
  const shape::sim::TrainOptions d;
  *options = shape_simulate_options{SHAPE_ESTIMATOR_SHAPE, 1000, 0, d.learning_rate, d.window,
                                    0, nullptr};
}

shape_status shape_simulate(const shape_config* config, const shape_simulate_options* options,
                            const char* out_path, shape_simulate_summary* summary) {
  SHAPE_REQUIRE(config && options && out_path, "null argument");
  return guarded([&] {
    namespace sim = shape::sim;
    const auto env = sim::ChainEnv::make_default();
    sim::TrainOptions train_opts;
    if (options->learning_rate > 0.0) train_opts.learning_rate = options->learning_rate;
    if (options->window > 0) train_opts.window = options->window;
    const auto estimator = to_core(options->estimator);
    const auto result =
        sim::train(env, estimator, options->episodes, options->seed, config->value, train_opts);

    shape::write_file_atomic(out_path, [&](std::ostream& os) {
      os << "estimator,seed,episode_end,success_rate,mean_tokens,potential_drop_rate\n";
      for (const auto& w : result.curve) {
        os << shape::to_string(estimator) << ',' << options->seed << ',' << w.episode_end << ','
           << shape::format_double(w.success_rate) << ',' << shape::format_double(w.mean_tokens)
           << ',' << shape::format_double(w.potential_drop_rate) << '\n';
      }
    });

    if (options->traces_path && options->trace_count > 0) {
      const auto cfg = sim::simulator_config(env, config->value);
      const sim::SimulatorOracle oracle(env, result.policy);
      std::vector<shape::TrajectoryRecord> traces;
      for (std::size_t i = 0; i < options->trace_count; ++i) {
        sim::Rng rng = sim::make_rng(sim::mix_seed(options->seed ^ 0x7ACE, i));
        const auto trace = sim::sample_episode(env, result.policy, rng);
        auto rec = sim::to_record(trace, "trace-" + std::to_string(i),
                                  "g" + std::to_string(i / train_opts.group_size));
        const auto profile = shape::build_profile(rec, trace.stage_plan(), &oracle, cfg,
                                                  shape::record_seed(options->seed, rec.id));
        rec.boundary_potentials = profile.values;
        traces.push_back(std::move(rec));
      }
      shape::write_file_atomic(options->traces_path, [&](std::ostream& os) {
        for (const auto& r : traces) os << shape::serialize_record(r) << '\n';
      });
    }

    if (summary) {
      summary->final_success = result.final_stats.success;
      summary->final_mean_tokens = result.final_stats.mean_tokens;
      const auto& last = result.curve.back();
      summary->last_window_success = last.success_rate;
      summary->last_window_tokens = last.mean_tokens;
      summary->last_window_drop_rate = last.potential_drop_rate;
    }
    return SHAPE_OK;
  });
}

shape_status shape_sandbag(const shape_config* config, const char* out_path,
                           shape_sandbag_summary* summary) {
  SHAPE_REQUIRE(config && out_path, "null argument");
  return guarded([&] {
    namespace sim = shape::sim;
    const auto env = sim::ChainEnv::make_default();
    const auto report = sim::sandbag_comparison(env, config->value);
    const auto cfg = sim::simulator_config(env, config->value);
    const auto floor_len = static_cast<std::size_t>(std::ceil(cfg.l_ref));

    shape::write_file_atomic(out_path, [&](std::ostream& os) {
      os << "path,segment,phi_start,phi_end,length,gamma,mrt_bonus,shape_bonus,"
            "shape_bonus_equal_length\n";
      auto rows = [&](const char* name, const std::vector<double>& path,
                      const std::vector<std::size_t>& lengths) {
        const auto gammas = shape::segment_gammas(lengths, cfg);
        const double equal_gamma = shape::segment_gammas(std::vector<std::size_t>{floor_len}, cfg)[0];
        const double outcome = path.back();
        for (std::size_t k = 0; k + 1 < path.size(); ++k) {
          os << name << ',' << k << ',' << shape::format_double(path[k]) << ','
             << shape::format_double(path[k + 1]) << ',' << lengths[k] << ','
             << shape::format_double(gammas[k]) << ','
             << shape::format_double(cfg.alpha * (outcome - path[k])) << ','
             << shape::format_double(cfg.alpha * shape::shaping_term(path[k], path[k + 1], gammas[k]))
             << ','
             << shape::format_double(cfg.alpha *
                                     shape::shaping_term(path[k], path[k + 1], equal_gamma))
             << '\n';
        }
      };
      rows("monotone", report.monotone_path, report.monotone_lengths);
      rows("dip", report.dip_path, report.dip_lengths);
      auto total = [&](const char* name, double mrt, double shp, double eq) {
        os << name << ",total,,,,," << shape::format_double(mrt) << ','
           << shape::format_double(shp) << ',' << shape::format_double(eq) << '\n';
      };
      total("monotone", report.mrt_bonus_mono, report.shape_bonus_mono,
            report.shape_bonus_mono_equal_length);
      total("dip", report.mrt_bonus_dip, report.shape_bonus_dip,
            report.shape_bonus_dip_equal_length);
    });

    if (summary) {
      *summary = shape_sandbag_summary{report.mrt_bonus_mono,
                                       report.mrt_bonus_dip,
                                       report.shape_bonus_mono,
                                       report.shape_bonus_dip,
                                       report.shape_bonus_mono_equal_length,
                                       report.shape_bonus_dip_equal_length};
    }
    return SHAPE_OK;
  });
}

shape_status shape_check(const shape_config* config, const char* suite, size_t trials,
                         uint64_t seed, shape_check_callback callback, void* user) {
  SHAPE_REQUIRE(config && suite, "null argument");
  return guarded([&] {
    const auto results = shape::theory::run_suite(suite, trials, seed, config->value);
    bool ok = true;
    for (const auto& r : results) {
      ok = ok && r.passed;
      if (callback) callback(r.name.c_str(), r.passed ? 1 : 0, r.detail.c_str(), user);
    }
    if (!ok) return fail(SHAPE_ERR_CHECK_FAILED, "check suite '" + std::string(suite) + "' failed");
    return SHAPE_OK;
  });
}

shape_status shape_report(const shape_records* records, shape_report_kind kind, size_t stride,
                          const char* out_path) {
  SHAPE_REQUIRE(records && out_path, "null argument");
  return guarded([&] {
    const auto transitions = shape::collect_transitions(records->loaded.records, stride);
    if (kind == SHAPE_REPORT_REGRESSION) {
      const auto fit = shape::gain_regression(transitions);
      shape::write_file_atomic(out_path, [&](std::ostream& os) {
        os << "group,slope,raw_intercept,points\n";
        os << "low," << shape::format_double(fit.low.slope) << ','
           << shape::format_double(fit.low.intercept) << ',' << fit.low.points << '\n';
        os << "high," << shape::format_double(fit.high.slope) << ','
           << shape::format_double(fit.high.intercept) << ',' << fit.high.points << '\n';
      });
    } else if (kind == SHAPE_REPORT_DISTRIBUTION) {
      const auto d = shape::gain_distribution(transitions);
      static constexpr const char* kLabels[] = {"low", "mid-low", "mid-high", "high"};
      shape::write_file_atomic(out_path, [&](std::ostream& os) {
        os << "bin,count,mean_gain,percent\n";
        for (std::size_t b = 0; b < shape::kGainBins; ++b) {
          os << kLabels[b] << ',' << d.count[b] << ',' << shape::format_double(d.mean_gain[b])
             << ',' << shape::format_double(d.percent[b]) << '\n';
        }
      });
    } else {
      return fail(SHAPE_ERR_INVALID_INPUT, "unknown report kind");
    }
    return SHAPE_OK;
  });
}

double shape_dynamic_gamma(double length, double l_ref, double gamma_min) {
  return shape::dynamic_gamma(length, l_ref, gamma_min);
}

double shape_shaping_term(double phi_k, double phi_next, double gamma) {
  return shape::shaping_term(phi_k, phi_next, gamma);
}

shape_status shape_segment_advantages(const shape_config* config, const double* profile,
                                      const size_t* lengths, size_t k, double outcome,
                                      double* out) {
  SHAPE_REQUIRE(config && profile && lengths && out, "null argument");
  return guarded([&] {
    shape::require_valid(config->value);
    const std::vector<std::size_t> lens(lengths, lengths + k);
    const auto adv = shape::shape_advantages(std::span<const double>(profile, k + 1), lens,
                                             outcome, config->value);
    std::copy(adv.begin(), adv.end(), out);
    return SHAPE_OK;
  });
}

shape_status shape_entropy_weights(const shape_config* config, const double* entropies,
                                   size_t n, double* out) {
  SHAPE_REQUIRE(config && entropies && out, "null argument");
  return guarded([&] {
    const auto w = shape::entropy_weights(std::span<const double>(entropies, n),
                                          shape::WeightParams::from(config->value));
    std::copy(w.begin(), w.end(), out);
    return SHAPE_OK;
  });
}

shape_status shape_segment_entropies(const double* entropies, size_t n, double tau, size_t k,
                                     size_t* out, size_t capacity, size_t* n_out) {
  SHAPE_REQUIRE(entropies && n_out, "null argument");
  return guarded([&] {
    const auto plan = shape::segment_entropy(std::span<const double>(entropies, n), tau, k);
    *n_out = plan.boundaries.size();
    if (plan.boundaries.size() > capacity || (!out && !plan.boundaries.empty())) {
      return fail(SHAPE_ERR_DIMENSION, "output buffer holds " + std::to_string(capacity) +
                                           " cutpoints, need " +
                                           std::to_string(plan.boundaries.size()));
    }
    std::copy(plan.boundaries.begin(), plan.boundaries.end(), out);
    return SHAPE_OK;
  });
}

}  // extern "C"
