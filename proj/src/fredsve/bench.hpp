#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fredsve/problems.hpp"
#include "fredsve/regularize.hpp"
#include "fredsve/sve.hpp"

namespace fredsve::bench {

// Grid of benchmark cells: every (problem, method, alpha, seed) combination
// is run once. Tolerances apply to kernel construction (aca_tol) and the
// singular-value cutoff (cutoff_eps); eta is the discrepancy-principle
// safety factor. When output_dir is nonempty, runners write their CSV/JSON
// artifacts there (the directory is created as needed).
struct ExperimentConfig {
  std::vector<std::string> problems = {"baart", "foxgood", "gravity", "shaw", "wing"};
  std::vector<double> alphas = {1e-3, 1e-2, 1e-1};
  std::vector<std::string> methods = {"tsve", "tikhonov"};
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  double eta = 1.0;
  double cutoff_eps = 1e-10;
  double aca_tol = 1e-13;
  std::string output_dir;
};

// Throws ConfigError unless every list is nonempty, methods are known,
// alphas are positive, eta >= 1, and both tolerances lie in (0, 1).
void validate(const ExperimentConfig& cfg);

// One benchmark cell. param holds the truncation index (as a real) or the
// Tikhonov parameter. bound_lhs/bound_rhs are the truncation error-bound
// pair, present for 1D TSVE rows and NaN elsewhere. A failed cell carries
// the failure text in `error` and NaN in every numeric column.
struct ResultRow {
  std::string problem;
  std::string method;
  double alpha = 0.0;
  std::uint64_t seed = 0;
  double param = 0.0;
  double re = 0.0;
  double residual = 0.0;
  double delta = 0.0;
  double bound_lhs = 0.0;
  double bound_rhs = 0.0;
  double wall_time_ms = 0.0;
  std::string error;
};

// One problem's reusable state — kernel factorization, singular value
// expansion(s), exact-data coefficients — built once and solved many times.
class ProblemRunner {
 public:
  ProblemRunner(const std::string& name, double aca_tol = 1e-13,
                double cutoff_eps = 1e-10);

  const problems::TestProblem& problem() const { return prob_; }
  const sve::SveExpansion& expansion() const { return S1_; }
  // Second-axis expansion; null for one-dimensional problems.
  const sve::SveExpansion* expansion2() const { return S2_ ? &*S2_ : nullptr; }

  // Runs one cell; failures are captured in the row's error field.
  ResultRow solve(const std::string& method, double alpha, std::uint64_t seed,
                  double eta) const;

  // Separable representation of the exact data (two-axis problems only).
  const bivariate::LowRankKernel& exact_data() const;

 private:
  void solve_1d(double eta, ResultRow& row) const;
  void solve_2d(double eta, ResultRow& row) const;

  problems::TestProblem prob_;
  sve::SveExpansion S1_;
  std::optional<sve::SveExpansion> S2_;
  regularize::RhsProjection exact_;
  std::vector<double> exact_betas_;
  std::optional<bivariate::LowRankKernel> gdata_;
};

// Runs the full grid sequentially in configuration order (problem, method,
// alpha, seed innermost). Deterministic apart from wall_time_ms. With an
// output_dir set, writes results.csv (one row per cell) and summary.json
// (per (problem, method, alpha) medians over seeds).
std::vector<ResultRow> run_bench(const ExperimentConfig& cfg);

// Per-problem medians of the truncation error bound at alpha = 1e-2:
// lhs is the realized in-span error of the discrepancy-chosen TSVE solve,
// rhs the a-priori bound. Every individual run is checked for lhs <= rhs.
// With an output_dir set, writes bound.csv.
struct BoundRow {
  std::string problem;
  double lhs = 0.0;
  double rhs = 0.0;
};
std::vector<BoundRow> run_bound_figure(const ExperimentConfig& cfg);

// Two-axis blur benchmark at the first configured alpha and seed: solves
// with both methods and samples everything on tensor grids (rows indexed by
// the first axis). `exact` and the reconstructions live on the solution
// domains, `data` on the data domains. With an output_dir set, writes
// blur2d_{exact,data,tsve,tikhonov}.csv and blur2d_rows.csv.
struct Blur2dResult {
  ResultRow tsve;
  ResultRow tikhonov;
  Eigen::MatrixXd exact;
  Eigen::MatrixXd data;
  Eigen::MatrixXd recon_tsve;
  Eigen::MatrixXd recon_tikhonov;
};
Blur2dResult run_blur2d(const ExperimentConfig& cfg, int grid_points = 256);

// Singular values of the continuous expansion next to those of the discrete
// collocation operator on n quadrature nodes, with the relative gap, as CSV
// (index, sigma, sigma_discrete, rel_gap). One-dimensional problems only.
std::string oracle_comparison_csv(const ProblemRunner& runner, int n);

// Sample medians (mean of the middle pair for even counts).
double median(std::vector<double> values);

std::string to_csv(const std::vector<ResultRow>& rows);

// Medians per (problem, method, alpha) over seeds as pretty-printed JSON:
// {"cells": [{problem, method, alpha, runs, errors, median_re,
// median_param, median_residual, median_bound_lhs, median_bound_rhs}]}.
std::string summary_json(const std::vector<ResultRow>& rows);

}  // namespace fredsve::bench
