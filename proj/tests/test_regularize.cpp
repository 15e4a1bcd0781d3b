#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <map>
#include <numeric>

#include "fredsve/problems.hpp"
#include "fredsve/regularize.hpp"

using namespace fredsve;
using namespace fredsve::regularize;

#define CHECK_NEAR(a, b, tol) CHECK(std::abs((a) - (b)) <= (tol))

namespace {

const problems::TestProblem& prob(const std::string& name) {
  static std::map<std::string, problems::TestProblem> cache;
  auto it = cache.find(name);
  if (it == cache.end()) it = cache.emplace(name, problems::make_problem(name)).first;
  return it->second;
}

const sve::SveExpansion& expansion(const std::string& name, double cutoff = 1e-10) {
  static std::map<std::pair<std::string, double>, sve::SveExpansion> cache;
  auto key = std::make_pair(name, cutoff);
  auto it = cache.find(key);
  if (it == cache.end())
    it = cache.emplace(key, sve::sve_from_lowrank(prob(name).lowrank, cutoff)).first;
  return it->second;
}

double sum_sq(const std::vector<double>& v) {
  return std::inner_product(v.begin(), v.end(), v.begin(), 0.0);
}

}  // namespace

TEST_CASE("projection splits data into span and remainder") {
  const auto& S = expansion("baart");
  const auto& P = prob("baart");

  funapprox::FuncApprox phi1 = S.phis[0];
  RhsProjection pr = project_rhs(S, phi1);
  CHECK_NEAR(pr.c[0], 1.0, 1e-10);
  for (int i = 1; i < S.rank(); ++i) CHECK_NEAR(pr.c[i], 0.0, 1e-10);
  CHECK(pr.g_perp_norm_sq <= 1e-10);

  RhsProjection zero = project_rhs(S, funapprox::FuncApprox({0.0}, P.omega2));
  CHECK(sum_sq(zero.c) == 0.0);
  CHECK(zero.g_perp_norm_sq == 0.0);

  RhsProjection pg = project_rhs(S, P.g_exact);
  CHECK(std::sqrt(pg.g_perp_norm_sq) <= 1e-8 * pg.g_norm);

  CHECK_THROWS_AS(project_rhs(S, funapprox::FuncApprox({1.0}, P.omega1)), DomainMismatch);
}

TEST_CASE("truncated solve recovers a pure mode and rejects bad indices") {
  const auto& S = expansion("baart");
  funapprox::FuncApprox g = funapprox::scale(S.sigmas[0], S.phis[0]);
  RhsProjection P = project_rhs(S, g);

  RegularizedSolution sol = tsve_solve(S, P, 1);
  CHECK_NEAR(sol.betas[0], 1.0, 1e-10);
  CHECK(sol.residual_norm <= 1e-5 * S.sigmas[0]);
  CHECK_NEAR(eval(sol, 0.7), S.psis[0](0.7), 1e-9);

  CHECK_THROWS_AS(tsve_solve(S, P, 0), OutOfRange);
  CHECK_THROWS_AS(tsve_solve(S, P, S.rank() + 1), OutOfRange);

  double prev = 1e300;
  for (int ell = 1; ell <= S.rank(); ++ell) {
    double r = tsve_solve(S, P, ell).residual_norm;
    CHECK(r <= prev + 1e-15);
    prev = r;
  }
}

TEST_CASE("noise-free full-rank solve reconstructs smooth solutions") {
  const auto& S = expansion("gravity", 3e-11);
  RhsProjection P = project_rhs(S, prob("gravity").g_exact);
  RegularizedSolution sol = tsve_solve(S, P, S.rank());
  // The error bottoms out where the solution's spectral tail crosses the
  // rounding-level junk in the deepest retained coefficients; for this
  // problem the floor sits near 1.1e-6.
  CHECK(relative_error(sol, prob("gravity").x_exact) <= 2e-6);
}

TEST_CASE("spectral filtering damps, reduces to truncation, and is monotone") {
  const auto& S = expansion("baart");
  problems::NoiseSpec spec{.alpha = 1e-2, .seed = 5};
  auto [gd, delta] = problems::contaminate(prob("baart").g_exact, spec);
  RhsProjection P = project_rhs(S, gd);

  RegularizedSolution full = tsve_solve(S, P, S.rank());
  RegularizedSolution t0 = tikhonov_solve(S, P, 0.0);
  REQUIRE(t0.betas.size() == full.betas.size());
  for (size_t j = 0; j < full.betas.size(); ++j)
    CHECK_NEAR(t0.betas[j], full.betas[j], 1e-13 * std::abs(full.betas[j]) + 1e-300);

  RegularizedSolution damped = tikhonov_solve(S, P, 1e8 * S.sigmas[0]);
  CHECK(solution_norm(damped) <= 1e-6 * solution_norm(t0));
  CHECK_THROWS_AS(tikhonov_solve(S, P, -1.0), Error);

  double prev_res = -1.0, prev_norm = 1e300;
  for (int i = 0; i < 50; ++i) {
    double lam = S.sigmas[0] * std::pow(10.0, -10.0 + 11.0 * i / 49.0);
    RegularizedSolution sol = tikhonov_solve(S, P, lam);
    CHECK(sol.residual_norm >= prev_res - 1e-15);
    CHECK(solution_norm(sol) <= prev_norm + 1e-15);
    prev_res = sol.residual_norm;
    prev_norm = solution_norm(sol);
  }
}

TEST_CASE("reported residual matches the operator residual") {
  const auto& S = expansion("baart");
  const auto& P = prob("baart");
  problems::NoiseSpec spec{.alpha = 1e-2, .seed = 9};
  auto [gd, delta] = problems::contaminate(P.g_exact, spec);
  RhsProjection pr = project_rhs(S, gd);

  for (int ell : {3, 5}) {
    RegularizedSolution sol = tsve_solve(S, pr, ell);
    std::vector<double> w(sol.betas);
    std::vector<const funapprox::FuncApprox*> fs;
    for (int j = 0; j < ell; ++j) fs.push_back(&S.psis[j]);
    funapprox::FuncApprox xf = funapprox::lincomb(w, fs);
    funapprox::FuncApprox resid = funapprox::sub(bivariate::apply(P.lowrank, xf), gd);
    CHECK_NEAR(funapprox::norm(resid), sol.residual_norm, 1e-8);
  }
}

TEST_CASE("truncation rule picks the smallest index meeting the target") {
  const auto& S = expansion("baart");
  const auto& P = prob("baart");
  problems::NoiseSpec spec{.alpha = 1e-2, .seed = 3};
  auto [gd, delta] = problems::contaminate(P.g_exact, spec);
  RhsProjection pr = project_rhs(S, gd);
  const double eta = 1.0;

  TruncationChoice pick = discrepancy_truncation(S, pr, delta, eta);
  CHECK_FALSE(pick.warning);
  CHECK(tsve_solve(S, pr, pick.ell).residual_norm <= eta * delta);
  if (pick.ell > 1)
    CHECK(tsve_solve(S, pr, pick.ell - 1).residual_norm > eta * delta);

  int scan = S.rank();
  for (int ell = 1; ell <= S.rank(); ++ell)
    if (tsve_solve(S, pr, ell).residual_norm <= eta * delta) {
      scan = ell;
      break;
    }
  CHECK(pick.ell == scan);

  funapprox::FuncApprox pure = funapprox::scale(S.sigmas[0], S.phis[0]);
  TruncationChoice one = discrepancy_truncation(S, project_rhs(S, pure), 1e-3, 1.0);
  CHECK(one.ell == 1);
  CHECK_FALSE(one.warning);

  TruncationChoice hopeless = discrepancy_truncation(S, pr, 1e-300, 1.0);
  CHECK(hopeless.warning);
  CHECK(hopeless.ell == S.rank());
  CHECK_THROWS_AS(discrepancy_truncation(S, pr, 0.0, 1.0), Error);

  TruncationChoice srule = sigma_rule_truncation(S, delta, 3.0);
  CHECK_FALSE(srule.warning);
  CHECK(S.sigmas[srule.ell - 1] >= 3.0 * delta);
  if (srule.ell < S.rank()) CHECK(S.sigmas[srule.ell] < 3.0 * delta);
  CHECK(sigma_rule_truncation(S, 10.0 * S.sigmas[0], 3.0).warning);
}

TEST_CASE("lambda rule finds the residual root") {
  const auto& S = expansion("baart");
  const auto& P = prob("baart");
  problems::NoiseSpec spec{.alpha = 1e-2, .seed = 3};
  auto [gd, delta] = problems::contaminate(P.g_exact, spec);
  RhsProjection pr = project_rhs(S, gd);
  const double eta = 1.0;
  const double gd_norm = funapprox::norm(gd);

  LambdaChoice pick = discrepancy_lambda(S, pr, delta, eta);
  CHECK_FALSE(pick.warning);
  CHECK_NEAR(tikhonov_solve(S, pr, pick.lambda).residual_norm, eta * delta,
             1e-6 * gd_norm);

  double lo = std::log(1e-12 * S.sigmas[0]), hi = std::log(10.0 * S.sigmas[0]);
  for (int i = 0; i < 80; ++i) {
    double mid = 0.5 * (lo + hi);
    if (tikhonov_solve(S, pr, std::exp(mid)).residual_norm <= eta * delta)
      lo = mid;
    else
      hi = mid;
  }
  CHECK_NEAR(std::log(pick.lambda), 0.5 * (lo + hi), 1e-6);

  double prev_lambda = 0.0;
  for (double alpha : {1e-3, 1e-2, 1e-1}) {
    problems::NoiseSpec sp{.alpha = alpha, .seed = 3};
    auto [gda, da] = problems::contaminate(P.g_exact, sp);
    LambdaChoice c = discrepancy_lambda(S, project_rhs(S, gda), da, eta);
    CHECK(c.lambda > prev_lambda);
    prev_lambda = c.lambda;
  }

  LambdaChoice low = discrepancy_lambda(S, pr, 1e-300, 1.0);
  CHECK(low.warning);
  CHECK_NEAR(low.lambda, 1e-12 * S.sigmas[0], 1e-22);
  LambdaChoice high = discrepancy_lambda(S, pr, 10.0 * gd_norm, 1.0);
  CHECK(high.warning);
  CHECK_NEAR(high.lambda, 10.0 * S.sigmas[0], 1e-12);
}

TEST_CASE("truncation error bound holds on every draw") {
  const auto& S = expansion("gravity");
  const auto& P = prob("gravity");
  RhsProjection exact = project_rhs(S, P.g_exact);
  std::vector<double> exact_betas = tsve_solve(S, exact, S.rank()).betas;

  CHECK(tsve_error_bound(S, exact_betas, S.rank(), 0.0) == 0.0);
  CHECK_THROWS_AS(tsve_error_bound(S, exact_betas, 0, 1e-3), OutOfRange);

  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    problems::NoiseSpec spec{.alpha = 1e-2, .seed = seed};
    auto [gd, delta] = problems::contaminate(P.g_exact, spec);
    RhsProjection pr = project_rhs(S, gd);

    funapprox::FuncApprox noise = funapprox::sub(gd, P.g_exact);
    RhsProjection gamma = project_rhs(S, noise);
    CHECK(sum_sq(gamma.c) <= delta * delta * (1.0 + 1e-10));

    TruncationChoice pick = discrepancy_truncation(S, pr, delta, 1.0);
    RegularizedSolution sol = tsve_solve(S, pr, pick.ell);
    double lhs = inspan_distance(exact_betas, sol);
    double rhs = tsve_error_bound(S, exact_betas, pick.ell, delta);
    CHECK(lhs <= rhs * (1.0 + 1e-12));
  }
}

TEST_CASE("relative error on in-span targets hits the textbook values") {
  const auto& S = expansion("baart");
  funapprox::PiecewiseFunc target = funapprox::PiecewiseFunc::single(S.psis[0]);

  RegularizedSolution sol;
  sol.basis = &S;
  sol.param = TruncationIndex{1};
  sol.betas = {1.0};
  CHECK(relative_error(sol, target) <= 1e-6);
  sol.betas = {2.0};
  CHECK_NEAR(relative_error(sol, target), 1.0, 1e-6);
  sol.betas = {0.0};
  CHECK_NEAR(relative_error(sol, target), 1.0, 1e-6);

  funapprox::PiecewiseFunc zero = funapprox::PiecewiseFunc::single(
      funapprox::FuncApprox({0.0}, S.psis[0].domain()));
  CHECK_THROWS_AS(relative_error(sol, zero), ZeroExactNorm);
}

TEST_CASE("separable data solves reduce to their factors") {
  const auto& P = prob("blur2d");
  const auto& S1 = expansion("blur2d");
  static sve::SveExpansion S2 = sve::sve_from_lowrank(P.axis2->lowrank);

  Eigen::MatrixXd mid = Eigen::MatrixXd::Identity(1, 1) *
                        (S1.sigmas[0] * S2.sigmas[0]);
  LowRankKernel G{{S1.phis[0]}, mid, {S2.phis[0]}};
  Solution2D sol = solve_2d_tsve(S1, S2, G, 1e-5 * S1.sigmas[0] * S2.sigmas[0], 1.0);
  CHECK_NEAR(sol.betas(0, 0), 1.0, 1e-8);
  CHECK(sol.betas.norm() <= 1.0 + 1e-8);
  CHECK_NEAR(eval(sol, 0.1, -0.4), S1.psis[0](0.1) * S2.psis[0](-0.4), 1e-8);

  problems::NoiseSpec spec{.alpha = 1e-2, .seed = 7};
  LowRankKernel gdata{{P.g_exact}, Eigen::MatrixXd::Identity(1, 1),
                      {P.axis2->g_exact}};
  auto [gd, delta] = problems::contaminate_2d(gdata, spec);
  Solution2D ts = solve_2d_tsve(S1, S2, gd, delta, 10.0);
  CHECK_FALSE(ts.warning);
  CHECK(ts.residual_norm <= 10.0 * delta);
  Solution2D tk = solve_2d_tikhonov(S1, S2, gd, delta, 10.0);
  CHECK_FALSE(tk.warning);
  CHECK_NEAR(tk.residual_norm, 10.0 * delta, 1e-6 * bivariate::norm(gd));

  double re_ts = relative_error_2d(ts, P.x_exact, P.axis2->x_exact);
  double re_tk = relative_error_2d(tk, P.x_exact, P.axis2->x_exact);
  CHECK(re_ts < 1.0);
  CHECK(re_tk < 1.0);
  CHECK(re_ts / re_tk <= 1.5);
  CHECK(re_tk / re_ts <= 1.5);

  // Noise-free separable data keeps every product, so the coefficient matrix
  // factors and is numerically rank one.
  Solution2D full = solve_2d_tsve(S1, S2, gdata, 1e-300, 1.0);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(full.betas);
  CHECK(svd.singularValues()(1) <= 1e-8 * svd.singularValues()(0));
}

TEST_CASE("a flat second axis reproduces the one-dimensional solve") {
  const auto& S1 = expansion("baart");
  const auto& P = prob("baart");

  funapprox::Interval unit(0.0, 1.0);
  auto flat = [](double, double) { return 1.0; };
  auto [K2, trace] = bivariate::aca(flat, unit, unit, {.tol = 1e-13, .max_rank = 5});
  static sve::SveExpansion S2 = sve::sve_from_lowrank(K2);
  REQUIRE(S2.rank() == 1);
  CHECK_NEAR(S2.sigmas[0], 1.0, 1e-12);

  problems::NoiseSpec spec{.alpha = 1e-2, .seed = 21};
  auto [gd, delta] = problems::contaminate(P.g_exact, spec);
  RhsProjection pr = project_rhs(S1, gd);
  TruncationChoice pick = discrepancy_truncation(S1, pr, delta, 1.0);
  RegularizedSolution sol1 = tsve_solve(S1, pr, pick.ell);

  funapprox::FuncApprox one({1.0}, unit);
  LowRankKernel G{{gd}, Eigen::MatrixXd::Identity(1, 1), {one}};
  Solution2D sol2 = solve_2d_tsve(S1, S2, G, delta, 1.0);

  REQUIRE(std::get<TruncationIndex>(sol2.param).ell == pick.ell);
  for (int k = 0; k < S1.rank(); ++k) {
    double expected = k < pick.ell ? sol1.betas[k] : 0.0;
    CHECK_NEAR(sol2.betas(k, 0), expected, 1e-8);
  }
  CHECK_NEAR(sol2.residual_norm, sol1.residual_norm, 1e-8);
}
