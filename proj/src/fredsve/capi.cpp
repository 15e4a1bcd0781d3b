#include "fredsve.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <string>

#include <json.hpp>

#include "fredsve/bench.hpp"
#include "fredsve/errors.hpp"
#include "fredsve/problems.hpp"

struct fredsve_session {
  fredsve::bench::ProblemRunner runner;
};

namespace {

using nlohmann::json;

thread_local std::string t_last_error;

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

fredsve_status fail(fredsve_status code, const std::string& message) {
  t_last_error = message;
  return code;
}

template <typename Fn>
fredsve_status guarded(Fn&& fn) {
  using namespace fredsve;
  try {
    fn();
    return FREDSVE_OK;
  } catch (const UnknownProblem& e) {
    return fail(FREDSVE_ERR_UNKNOWN_PROBLEM, e.what());
  } catch (const ConfigError& e) {
    return fail(FREDSVE_ERR_CONFIG, e.what());
  } catch (const OutOfRange& e) {
    return fail(FREDSVE_ERR_INVALID_ARGUMENT, e.what());
  } catch (const OutOfDomain& e) {
    return fail(FREDSVE_ERR_INVALID_ARGUMENT, e.what());
  } catch (const DomainMismatch& e) {
    return fail(FREDSVE_ERR_INVALID_ARGUMENT, e.what());
  } catch (const Error& e) {
    return fail(FREDSVE_ERR_NUMERIC, e.what());
  } catch (const json::exception& e) {
    return fail(FREDSVE_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::exception& e) {
    return fail(FREDSVE_ERR_INTERNAL, e.what());
  }
}

json parse_object(const char* text, const char* what) {
  if (!text || !*text) return json::object();
  json j = json::parse(text);
  if (!j.is_object())
    throw fredsve::ConfigError(std::string(what) + ": expected a JSON object");
  return j;
}

fredsve::bench::ExperimentConfig config_from_json(const char* config_json) {
  fredsve::bench::ExperimentConfig cfg;
  json j = parse_object(config_json, "config");
  for (const auto& [key, value] : j.items()) {
    if (key == "problems")
      cfg.problems = value.get<std::vector<std::string>>();
    else if (key == "alphas")
      cfg.alphas = value.get<std::vector<double>>();
    else if (key == "methods")
      cfg.methods = value.get<std::vector<std::string>>();
    else if (key == "seeds")
      cfg.seeds = value.get<std::vector<std::uint64_t>>();
    else if (key == "eta")
      cfg.eta = value.get<double>();
    else if (key == "cutoff_eps")
      cfg.cutoff_eps = value.get<double>();
    else if (key == "aca_tol")
      cfg.aca_tol = value.get<double>();
    else if (key == "output_dir")
      cfg.output_dir = value.get<std::string>();
    else
      throw fredsve::ConfigError("config: unknown field '" + key + "'");
  }
  return cfg;
}

json number_or_null(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

json row_to_json(const fredsve::bench::ResultRow& row) {
  json j{{"problem", row.problem},
         {"method", row.method},
         {"alpha", row.alpha},
         {"seed", row.seed},
         {"param", number_or_null(row.param)},
         {"re", number_or_null(row.re)},
         {"residual", number_or_null(row.residual)},
         {"delta", number_or_null(row.delta)},
         {"bound_lhs", number_or_null(row.bound_lhs)},
         {"bound_rhs", number_or_null(row.bound_rhs)},
         {"wall_time_ms", row.wall_time_ms}};
  if (!row.error.empty()) j["error"] = row.error;
  return j;
}

}  // namespace

extern "C" {

const char* fredsve_version(void) { return "1.0.0"; }

const char* fredsve_last_error(void) { return t_last_error.c_str(); }

void fredsve_string_free(char* s) { std::free(s); }

fredsve_status fredsve_problem_list(char** out_json) {
  if (!out_json) return fail(FREDSVE_ERR_INVALID_ARGUMENT, "out_json is NULL");
  return guarded([&] {
    json j = fredsve::problems::problem_names();
    *out_json = dup_string(j.dump());
  });
}

fredsve_status fredsve_session_open(const char* problem, double aca_tol,
                                    double cutoff_eps, fredsve_session** out) {
  if (!out) return fail(FREDSVE_ERR_INVALID_ARGUMENT, "out is NULL");
  if (!problem) return fail(FREDSVE_ERR_INVALID_ARGUMENT, "problem is NULL");
  if (aca_tol < 0.0 || cutoff_eps < 0.0)
    return fail(FREDSVE_ERR_INVALID_ARGUMENT, "tolerances must be nonnegative");
  if (aca_tol == 0.0) aca_tol = 1e-13;
  if (cutoff_eps == 0.0) cutoff_eps = 1e-10;
  return guarded([&] {
    *out = new fredsve_session{
        fredsve::bench::ProblemRunner(problem, aca_tol, cutoff_eps)};
  });
}

void fredsve_session_close(fredsve_session* s) { delete s; }

fredsve_status fredsve_session_info(const fredsve_session* s, char** out_json) {
  if (!s) return fail(FREDSVE_ERR_INVALID_ARGUMENT, "session is NULL");
  if (!out_json) return fail(FREDSVE_ERR_INVALID_ARGUMENT, "out_json is NULL");
  return guarded([&] {
    const auto& S1 = s->runner.expansion();
    json j{{"problem", s->runner.problem().name},
           {"is_2d", s->runner.problem().is_2d()},
           {"rank", S1.rank()},
           {"sigmas", S1.sigmas}};
    if (const auto* S2 = s->runner.expansion2()) {
      j["rank2"] = S2->rank();
      j["sigmas2"] = S2->sigmas;
    }
    *out_json = dup_string(j.dump());
  });
}

fredsve_status fredsve_solve(const fredsve_session* s, const char* options_json,
                             char** out_json) {
  if (!s) return fail(FREDSVE_ERR_INVALID_ARGUMENT, "session is NULL");
  if (!out_json) return fail(FREDSVE_ERR_INVALID_ARGUMENT, "out_json is NULL");
  return guarded([&] {
    json opt = parse_object(options_json, "options");
    std::string method;
    double alpha = 0.0, eta = 1.0;
    std::uint64_t seed = 1;
    for (const auto& [key, value] : opt.items()) {
      if (key == "method")
        method = value.get<std::string>();
      else if (key == "alpha")
        alpha = value.get<double>();
      else if (key == "seed")
        seed = value.get<std::uint64_t>();
      else if (key == "eta")
        eta = value.get<double>();
      else
        throw fredsve::ConfigError("options: unknown field '" + key + "'");
    }
    if (method != "tsve" && method != "tikhonov")
      throw fredsve::ConfigError("options: method must be \"tsve\" or \"tikhonov\"");
    if (!(alpha > 0.0)) throw fredsve::ConfigError("options: alpha must be positive");
    if (!(eta >= 1.0)) throw fredsve::ConfigError("options: eta must be >= 1");
    fredsve::bench::ResultRow row = s->runner.solve(method, alpha, seed, eta);
    if (!row.error.empty()) throw fredsve::Error(row.error);
    *out_json = dup_string(row_to_json(row).dump());
  });
}

fredsve_status fredsve_oracle_csv(const fredsve_session* s, int n, char** out_csv) {
  if (!s) return fail(FREDSVE_ERR_INVALID_ARGUMENT, "session is NULL");
  if (!out_csv) return fail(FREDSVE_ERR_INVALID_ARGUMENT, "out_csv is NULL");
  return guarded([&] {
    *out_csv = dup_string(fredsve::bench::oracle_comparison_csv(s->runner, n));
  });
}

fredsve_status fredsve_bench_run(const char* config_json, char** out_csv,
                                 char** out_summary_json) {
  return guarded([&] {
    auto cfg = config_from_json(config_json);
    std::vector<fredsve::bench::ResultRow> rows = fredsve::bench::run_bench(cfg);
    if (out_csv) *out_csv = dup_string(fredsve::bench::to_csv(rows));
    if (out_summary_json)
      *out_summary_json = dup_string(fredsve::bench::summary_json(rows));
  });
}

fredsve_status fredsve_bound_run(const char* config_json, char** out_csv) {
  if (!out_csv) return fail(FREDSVE_ERR_INVALID_ARGUMENT, "out_csv is NULL");
  return guarded([&] {
    auto cfg = config_from_json(config_json);
    auto rows = fredsve::bench::run_bound_figure(cfg);
    std::string csv = "problem,lhs,rhs\n";
    char buf[96];
    for (const auto& r : rows) {
      std::snprintf(buf, sizeof(buf), "%s,%.17g,%.17g\n", r.problem.c_str(), r.lhs,
                    r.rhs);
      csv += buf;
    }
    *out_csv = dup_string(csv);
  });
}

fredsve_status fredsve_blur2d_run(const char* config_json, int grid_points,
                                  char** out_json) {
  if (!out_json) return fail(FREDSVE_ERR_INVALID_ARGUMENT, "out_json is NULL");
  return guarded([&] {
    auto cfg = config_from_json(config_json);
    fredsve::bench::Blur2dResult res = fredsve::bench::run_blur2d(cfg, grid_points);
    json j{{"tsve", row_to_json(res.tsve)}, {"tikhonov", row_to_json(res.tikhonov)}};
    *out_json = dup_string(j.dump());
  });
}

}  // extern "C"
