#include "fredsve/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include <json.hpp>

#include "fredsve/errors.hpp"
#include "fredsve/oracle.hpp"

namespace fredsve::bench {
namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

ResultRow blank_row(const std::string& problem, const std::string& method,
                    double alpha, std::uint64_t seed) {
  return ResultRow{.problem = problem,
                   .method = method,
                   .alpha = alpha,
                   .seed = seed,
                   .param = kNan,
                   .re = kNan,
                   .residual = kNan,
                   .delta = kNan,
                   .bound_lhs = kNan,
                   .bound_rhs = kNan};
}

std::filesystem::path prepare_output_dir(const std::string& dir) {
  std::filesystem::path p(dir);
  std::filesystem::create_directories(p);
  return p;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << text;
}

nlohmann::json summarize(const std::vector<ResultRow>& rows) {
  struct Cell {
    std::vector<double> re, param, residual, lhs, rhs;
    int errors = 0;
  };
  std::vector<std::tuple<std::string, std::string, double>> order;
  std::map<std::tuple<std::string, std::string, double>, Cell> cells;
  for (const auto& r : rows) {
    auto key = std::make_tuple(r.problem, r.method, r.alpha);
    if (!cells.count(key)) order.push_back(key);
    Cell& c = cells[key];
    if (!r.error.empty()) {
      ++c.errors;
      continue;
    }
    c.re.push_back(r.re);
    c.param.push_back(r.param);
    c.residual.push_back(r.residual);
    if (std::isfinite(r.bound_lhs)) c.lhs.push_back(r.bound_lhs);
    if (std::isfinite(r.bound_rhs)) c.rhs.push_back(r.bound_rhs);
  }
  nlohmann::json out = nlohmann::json::array();
  for (const auto& key : order) {
    Cell& c = cells[key];
    nlohmann::json j{{"problem", std::get<0>(key)},
                     {"method", std::get<1>(key)},
                     {"alpha", std::get<2>(key)},
                     {"runs", c.re.size() + c.errors},
                     {"errors", c.errors}};
    auto put = [&](const char* name, std::vector<double>& v) {
      if (v.empty())
        j[name] = nullptr;
      else
        j[name] = median(v);
    };
    put("median_re", c.re);
    put("median_param", c.param);
    put("median_residual", c.residual);
    put("median_bound_lhs", c.lhs);
    put("median_bound_rhs", c.rhs);
    out.push_back(std::move(j));
  }
  return nlohmann::json{{"cells", std::move(out)}};
}

}  // namespace

ProblemRunner::ProblemRunner(const std::string& name, double aca_tol,
                             double cutoff_eps)
    : prob_(problems::make_problem(name)) {
  constexpr double kConstructionTol = 1e-13;
  auto expand = [&](const problems::TestProblem& p) {
    if (aca_tol == kConstructionTol)
      return sve::sve_from_lowrank(p.lowrank, cutoff_eps);
    auto [K, trace] = bivariate::aca(p.kernel, p.omega2, p.omega1, {.tol = aca_tol});
    return sve::sve_from_lowrank(K, cutoff_eps);
  };
  S1_ = expand(prob_);
  if (prob_.is_2d()) {
    S2_ = expand(*prob_.axis2);
    gdata_ = bivariate::LowRankKernel{{prob_.g_exact},
                                      Eigen::MatrixXd::Identity(1, 1),
                                      {prob_.axis2->g_exact}};
  } else {
    exact_ = regularize::project_rhs(S1_, prob_.g_exact);
    exact_betas_ = regularize::tsve_solve(S1_, exact_, S1_.rank()).betas;
  }
}

const bivariate::LowRankKernel& ProblemRunner::exact_data() const {
  if (!gdata_) throw OutOfRange("exact_data: one-dimensional problem");
  return *gdata_;
}

void ProblemRunner::solve_1d(double eta, ResultRow& row) const {
  problems::NoiseSpec spec{.alpha = row.alpha, .seed = row.seed};
  auto [gd, delta] = problems::contaminate(prob_.g_exact, spec);
  row.delta = delta;
  regularize::RhsProjection P = regularize::project_rhs(S1_, gd);
  if (row.method == "tsve") {
    auto pick = regularize::discrepancy_truncation(S1_, P, delta, eta);
    auto sol = regularize::tsve_solve(S1_, P, pick.ell);
    row.param = pick.ell;
    row.residual = sol.residual_norm;
    row.re = regularize::relative_error(sol, prob_.x_exact);
    row.bound_lhs = regularize::inspan_distance(exact_betas_, sol);
    row.bound_rhs = regularize::tsve_error_bound(S1_, exact_betas_, pick.ell, delta);
  } else {
    auto pick = regularize::discrepancy_lambda(S1_, P, delta, eta);
    auto sol = regularize::tikhonov_solve(S1_, P, pick.lambda);
    row.param = pick.lambda;
    row.residual = sol.residual_norm;
    row.re = regularize::relative_error(sol, prob_.x_exact);
  }
}

void ProblemRunner::solve_2d(double eta, ResultRow& row) const {
  problems::NoiseSpec spec{.alpha = row.alpha, .seed = row.seed};
  auto [gd, delta] = problems::contaminate_2d(*gdata_, spec);
  row.delta = delta;
  regularize::Solution2D sol =
      row.method == "tsve" ? regularize::solve_2d_tsve(S1_, *S2_, gd, delta, eta)
                           : regularize::solve_2d_tikhonov(S1_, *S2_, gd, delta, eta);
  if (std::holds_alternative<regularize::TruncationIndex>(sol.param))
    row.param = std::get<regularize::TruncationIndex>(sol.param).ell;
  else
    row.param = std::get<regularize::TikhonovLambda>(sol.param).lambda;
  row.residual = sol.residual_norm;
  row.re = regularize::relative_error_2d(sol, prob_.x_exact, prob_.axis2->x_exact);
}

ResultRow ProblemRunner::solve(const std::string& method, double alpha,
                               std::uint64_t seed, double eta) const {
  ResultRow row = blank_row(prob_.name, method, alpha, seed);
  auto t0 = std::chrono::steady_clock::now();
  try {
    if (method != "tsve" && method != "tikhonov")
      throw ConfigError("unknown method '" + method + "'");
    if (prob_.is_2d())
      solve_2d(eta, row);
    else
      solve_1d(eta, row);
  } catch (const std::exception& e) {
    row.error = e.what();
  }
  row.wall_time_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
          .count();
  return row;
}

void validate(const ExperimentConfig& cfg) {
  if (cfg.problems.empty()) throw ConfigError("config: problems list is empty");
  if (cfg.alphas.empty()) throw ConfigError("config: alphas list is empty");
  if (cfg.methods.empty()) throw ConfigError("config: methods list is empty");
  if (cfg.seeds.empty()) throw ConfigError("config: seeds list is empty");
  for (const auto& m : cfg.methods)
    if (m != "tsve" && m != "tikhonov")
      throw ConfigError("config: unknown method '" + m + "'");
  for (double a : cfg.alphas)
    if (!(a > 0.0)) throw ConfigError("config: alphas must be positive");
  if (!(cfg.eta >= 1.0)) throw ConfigError("config: eta must be >= 1");
  if (!(cfg.cutoff_eps > 0.0 && cfg.cutoff_eps < 1.0))
    throw ConfigError("config: cutoff_eps must lie in (0, 1)");
  if (!(cfg.aca_tol > 0.0 && cfg.aca_tol < 1.0))
    throw ConfigError("config: aca_tol must lie in (0, 1)");
}

double median(std::vector<double> values) {
  if (values.empty()) throw OutOfRange("median of an empty sample");
  std::sort(values.begin(), values.end());
  size_t n = values.size();
  return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

std::string summary_json(const std::vector<ResultRow>& rows) {
  return summarize(rows).dump(2) + "\n";
}

std::string to_csv(const std::vector<ResultRow>& rows) {
  std::ostringstream out;
  out << "problem,method,alpha,seed,param,re,residual,delta,bound_lhs,"
         "bound_rhs,wall_time_ms,error\n";
  for (const auto& r : rows) {
    out << r.problem << ',' << r.method << ',' << fmt(r.alpha) << ',' << r.seed << ','
        << fmt(r.param) << ',' << fmt(r.re) << ',' << fmt(r.residual) << ','
        << fmt(r.delta) << ',' << fmt(r.bound_lhs) << ',' << fmt(r.bound_rhs) << ','
        << fmt(r.wall_time_ms) << ',' << r.error << '\n';
  }
  return out.str();
}

std::vector<ResultRow> run_bench(const ExperimentConfig& cfg) {
  validate(cfg);
  std::vector<ResultRow> rows;
  rows.reserve(cfg.problems.size() * cfg.methods.size() * cfg.alphas.size() *
               cfg.seeds.size());
  for (const auto& name : cfg.problems) {
    std::optional<ProblemRunner> runner;
    std::string setup_error;
    try {
      runner.emplace(name, cfg.aca_tol, cfg.cutoff_eps);
    } catch (const std::exception& e) {
      setup_error = e.what();
    }
    for (const auto& method : cfg.methods)
      for (double alpha : cfg.alphas)
        for (std::uint64_t seed : cfg.seeds) {
          if (runner) {
            rows.push_back(runner->solve(method, alpha, seed, cfg.eta));
          } else {
            ResultRow row = blank_row(name, method, alpha, seed);
            row.error = setup_error;
            rows.push_back(row);
          }
        }
  }
  if (!cfg.output_dir.empty()) {
    auto dir = prepare_output_dir(cfg.output_dir);
    write_file(dir / "results.csv", to_csv(rows));
    write_file(dir / "summary.json", summary_json(rows));
  }
  return rows;
}

std::vector<BoundRow> run_bound_figure(const ExperimentConfig& cfg) {
  validate(cfg);
  std::vector<BoundRow> out;
  for (const auto& name : cfg.problems) {
    ProblemRunner runner(name, cfg.aca_tol, cfg.cutoff_eps);
    if (runner.problem().is_2d())
      throw ConfigError("bound figure is defined for one-dimensional problems only");
    std::vector<double> lhs, rhs;
    for (std::uint64_t seed : cfg.seeds) {
      ResultRow row = runner.solve("tsve", 1e-2, seed, cfg.eta);
      if (!row.error.empty()) throw Error(name + ": " + row.error);
      if (row.bound_lhs > row.bound_rhs)
        throw Error(name + ": truncation bound violated at seed " +
                    std::to_string(seed));
      lhs.push_back(row.bound_lhs);
      rhs.push_back(row.bound_rhs);
    }
    out.push_back({name, median(lhs), median(rhs)});
  }
  if (!cfg.output_dir.empty()) {
    auto dir = prepare_output_dir(cfg.output_dir);
    std::ostringstream csv;
    csv << "problem,lhs,rhs\n";
    for (const auto& r : out)
      csv << r.problem << ',' << fmt(r.lhs) << ',' << fmt(r.rhs) << '\n';
    write_file(dir / "bound.csv", csv.str());
  }
  return out;
}

namespace {

std::vector<double> linspace(const funapprox::Interval& iv, int n) {
  std::vector<double> x(n);
  for (int i = 0; i < n; ++i)
    x[i] = iv.lo + (iv.hi - iv.lo) * i / double(n - 1);
  x.front() = iv.lo;
  x.back() = iv.hi;
  return x;
}

Eigen::MatrixXd sample_lowrank(const bivariate::LowRankKernel& K,
                               const std::vector<double>& s,
                               const std::vector<double>& t) {
  Eigen::MatrixXd C(s.size(), K.rank()), R(K.rank(), t.size());
  for (int p = 0; p < K.rank(); ++p) {
    for (size_t i = 0; i < s.size(); ++i) C(i, p) = K.cols[p](s[i]);
    for (size_t j = 0; j < t.size(); ++j) R(p, j) = K.rows[p](t[j]);
  }
  return C * K.middle * R;
}

std::string grid_csv(const Eigen::MatrixXd& M) {
  std::ostringstream out;
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    for (Eigen::Index j = 0; j < M.cols(); ++j) {
      if (j) out << ',';
      out << fmt(M(i, j));
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace

Blur2dResult run_blur2d(const ExperimentConfig& cfg, int grid_points) {
  validate(cfg);
  if (grid_points < 2) throw OutOfRange("blur grid needs at least 2 points per axis");
  ProblemRunner runner("blur2d", cfg.aca_tol, cfg.cutoff_eps);
  const double alpha = cfg.alphas.front();
  const std::uint64_t seed = cfg.seeds.front();

  Blur2dResult res;
  res.tsve = runner.solve("tsve", alpha, seed, cfg.eta);
  res.tikhonov = runner.solve("tikhonov", alpha, seed, cfg.eta);
  if (!res.tsve.error.empty()) throw Error("blur2d tsve: " + res.tsve.error);
  if (!res.tikhonov.error.empty()) throw Error("blur2d tikhonov: " + res.tikhonov.error);

  const auto& p1 = runner.problem();
  const auto& p2 = *runner.problem().axis2;
  std::vector<double> t1 = linspace(p1.omega1, grid_points);
  std::vector<double> t2 = linspace(p2.omega1, grid_points);
  std::vector<double> s1 = linspace(p1.omega2, grid_points);
  std::vector<double> s2 = linspace(p2.omega2, grid_points);

  res.exact.resize(grid_points, grid_points);
  for (int i = 0; i < grid_points; ++i)
    for (int j = 0; j < grid_points; ++j)
      res.exact(i, j) = p1.x_exact(t1[i]) * p2.x_exact(t2[j]);

  problems::NoiseSpec spec{.alpha = alpha, .seed = seed};
  auto [gd, delta] = problems::contaminate_2d(runner.exact_data(), spec);
  res.data = sample_lowrank(gd, s1, s2);

  auto recon = [&](const std::string& method) {
    regularize::Solution2D sol =
        method == "tsve"
            ? regularize::solve_2d_tsve(runner.expansion(), *runner.expansion2(), gd,
                                        delta, cfg.eta)
            : regularize::solve_2d_tikhonov(runner.expansion(), *runner.expansion2(),
                                            gd, delta, cfg.eta);
    return regularize::sample_grid(sol, t1, t2);
  };
  res.recon_tsve = recon("tsve");
  res.recon_tikhonov = recon("tikhonov");

  if (!cfg.output_dir.empty()) {
    auto dir = prepare_output_dir(cfg.output_dir);
    write_file(dir / "blur2d_exact.csv", grid_csv(res.exact));
    write_file(dir / "blur2d_data.csv", grid_csv(res.data));
    write_file(dir / "blur2d_tsve.csv", grid_csv(res.recon_tsve));
    write_file(dir / "blur2d_tikhonov.csv", grid_csv(res.recon_tikhonov));
    write_file(dir / "blur2d_rows.csv", to_csv({res.tsve, res.tikhonov}));
  }
  return res;
}

std::string oracle_comparison_csv(const ProblemRunner& runner, int n) {
  if (runner.problem().is_2d())
    throw ConfigError("oracle comparison is defined for one-dimensional problems only");
  oracle::DiscreteOperator D = oracle::discretize(runner.problem(), n);
  oracle::DiscreteSvd S = oracle::decompose(D);
  const auto& sig = runner.expansion().sigmas;
  std::ostringstream out;
  out << "index,sigma,sigma_discrete,rel_gap\n";
  for (size_t i = 0; i < sig.size(); ++i) {
    double sd = i < size_t(S.sigma.size()) ? S.sigma(i) : 0.0;
    double gap = std::abs(sig[i] - sd) / sig.front();
    out << (i + 1) << ',' << fmt(sig[i]) << ',' << fmt(sd) << ',' << fmt(gap) << '\n';
  }
  return out.str();
}

}  // namespace fredsve::bench
