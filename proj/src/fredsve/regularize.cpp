#include "regularize.hpp"

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "errors.hpp"

namespace fredsve::regularize {

namespace {

double suffix_residual_sq(const std::vector<double>& c, double g_perp_sq, int ell) {
  double acc = g_perp_sq;
  for (size_t j = ell; j < c.size(); ++j) acc += c[j] * c[j];
  return acc;
}

double filtered_residual(const std::vector<double>& s, const std::vector<double>& c,
                         double g_perp_sq, double lambda) {
  double acc = g_perp_sq;
  for (size_t j = 0; j < c.size(); ++j) {
    const double rf = lambda * lambda / (s[j] * s[j] + lambda * lambda);
    acc += rf * rf * c[j] * c[j];
  }
  return std::sqrt(acc);
}

// Root of filtered_residual(lambda) = target over [1e-12 s1, 10 s1], located
// by Brent minimization of the squared gap in log lambda. The residual is
// non-decreasing in lambda, so an unbracketed root means the target is only
// approachable from one side; the nearer boundary is returned with a warning.
LambdaChoice lambda_root(const std::vector<double>& s, const std::vector<double>& c,
                         double g_perp_sq, double target) {
  const double s1 = s.front();
  const double lo = std::log(1e-12 * s1), hi = std::log(10.0 * s1);
  if (filtered_residual(s, c, g_perp_sq, std::exp(lo)) >= target)
    return {std::exp(lo), true};
  if (filtered_residual(s, c, g_perp_sq, std::exp(hi)) <= target)
    return {std::exp(hi), true};
  auto gap_sq = [&](double loglam) {
    const double d = filtered_residual(s, c, g_perp_sq, std::exp(loglam)) - target;
    return d * d;
  };
  std::uintmax_t max_iter = 200;
  auto found = boost::math::tools::brent_find_minima(gap_sq, lo, hi, 45, max_iter);
  double loglam = found.first;
  // The residual grows with lambda, so settle on the feasible side of the
  // crossing: the largest lambda whose residual does not exceed the target.
  if (filtered_residual(s, c, g_perp_sq, std::exp(loglam)) > target) {
    double below = loglam, step = 1e-12;
    do {
      below = std::max(lo, loglam - step);
      step *= 2.0;
    } while (below > lo &&
             filtered_residual(s, c, g_perp_sq, std::exp(below)) > target);
    double above = loglam;
    for (int i = 0; i < 100; ++i) {
      double mid = 0.5 * (below + above);
      if (filtered_residual(s, c, g_perp_sq, std::exp(mid)) > target)
        above = mid;
      else
        below = mid;
    }
    loglam = below;
  }
  return {std::exp(loglam), false};
}

}  // namespace

RhsProjection project_rhs(const SveExpansion& S, const FuncApprox& g) {
  if (S.rank() == 0) throw EmptyExpansion("project_rhs: empty expansion");
  if (!g.domain().same_as(S.phis.front().domain()))
    throw DomainMismatch("project_rhs: g must live on the data-side domain");
  RhsProjection P;
  P.c.resize(S.rank());
  for (int i = 0; i < S.rank(); ++i) P.c[i] = funapprox::inner(S.phis[i], g);
  P.g_norm = funapprox::norm(g);
  const double csq = std::inner_product(P.c.begin(), P.c.end(), P.c.begin(), 0.0);
  P.g_perp_norm_sq = std::max(P.g_norm * P.g_norm - csq, 0.0);
  return P;
}

RegularizedSolution tsve_solve(const SveExpansion& S, const RhsProjection& P, int ell) {
  if (ell < 1 || ell > S.rank()) throw OutOfRange("tsve_solve: truncation index out of range");
  RegularizedSolution sol;
  sol.basis = &S;
  sol.param = TruncationIndex{ell};
  sol.betas.resize(ell);
  for (int j = 0; j < ell; ++j) sol.betas[j] = P.c[j] / S.sigmas[j];
  sol.residual_norm = std::sqrt(suffix_residual_sq(P.c, P.g_perp_norm_sq, ell));
  return sol;
}

RegularizedSolution tikhonov_solve(const SveExpansion& S, const RhsProjection& P,
                                   double lambda) {
  if (lambda < 0.0) throw Error("tikhonov_solve: lambda must be >= 0");
  RegularizedSolution sol;
  sol.basis = &S;
  sol.param = TikhonovLambda{lambda};
  sol.betas.resize(S.rank());
  for (int j = 0; j < S.rank(); ++j) {
    const double s = S.sigmas[j];
    sol.betas[j] = s * P.c[j] / (s * s + lambda * lambda);
  }
  sol.residual_norm = filtered_residual(S.sigmas, P.c, P.g_perp_norm_sq, lambda);
  return sol;
}

double eval(const RegularizedSolution& sol, double t) {
  double acc = 0.0;
  for (size_t j = 0; j < sol.betas.size(); ++j)
    acc += sol.betas[j] * sol.basis->psis[j](t);
  return acc;
}

double solution_norm(const RegularizedSolution& sol) {
  return std::sqrt(
      std::inner_product(sol.betas.begin(), sol.betas.end(), sol.betas.begin(), 0.0));
}

TruncationChoice discrepancy_truncation(const SveExpansion& S, const RhsProjection& P,
                                        double delta, double eta) {
  if (!(delta > 0.0)) throw Error("discrepancy_truncation: delta must be positive");
  if (!(eta >= 1.0)) throw Error("discrepancy_truncation: eta must be >= 1");
  const double target_sq = (eta * delta) * (eta * delta);
  for (int ell = 1; ell <= S.rank(); ++ell)
    if (suffix_residual_sq(P.c, P.g_perp_norm_sq, ell) <= target_sq)
      return {ell, false};
  return {S.rank(), true};
}

TruncationChoice sigma_rule_truncation(const SveExpansion& S, double delta, double eta) {
  if (!(delta > 0.0)) throw Error("sigma_rule_truncation: delta must be positive");
  if (!(eta > 0.0)) throw Error("sigma_rule_truncation: eta must be positive");
  int ell = 0;
  for (int j = 0; j < S.rank(); ++j)
    if (S.sigmas[j] >= eta * delta) ell = j + 1;
  if (ell == 0) return {1, true};
  return {ell, false};
}

LambdaChoice discrepancy_lambda(const SveExpansion& S, const RhsProjection& P,
                                double delta, double eta) {
  if (!(delta > 0.0)) throw Error("discrepancy_lambda: delta must be positive");
  if (!(eta >= 1.0)) throw Error("discrepancy_lambda: eta must be >= 1");
  return lambda_root(S.sigmas, P.c, P.g_perp_norm_sq, eta * delta);
}

double tsve_error_bound(const SveExpansion& S, const std::vector<double>& exact_betas,
                        int ell, double delta) {
  if (ell < 1 || ell > S.rank())
    throw OutOfRange("tsve_error_bound: truncation index out of range");
  double acc = (delta / S.sigmas[ell - 1]) * (delta / S.sigmas[ell - 1]);
  for (size_t i = ell; i < exact_betas.size(); ++i) acc += exact_betas[i] * exact_betas[i];
  return std::sqrt(acc);
}

double inspan_distance(const std::vector<double>& exact_betas,
                       const RegularizedSolution& sol) {
  double acc = 0.0;
  const size_t n = std::max(exact_betas.size(), sol.betas.size());
  for (size_t j = 0; j < n; ++j) {
    const double a = j < sol.betas.size() ? sol.betas[j] : 0.0;
    const double b = j < exact_betas.size() ? exact_betas[j] : 0.0;
    acc += (a - b) * (a - b);
  }
  return std::sqrt(acc);
}

double relative_error(const RegularizedSolution& sol, const PiecewiseFunc& x_exact) {
  const double xn = funapprox::norm(x_exact);
  if (xn == 0.0) throw ZeroExactNorm("relative_error: exact solution has zero norm");
  double cross = 0.0, self_sq = 0.0;
  for (size_t j = 0; j < sol.betas.size(); ++j) {
    cross += sol.betas[j] * funapprox::inner(sol.basis->psis[j], x_exact);
    self_sq += sol.betas[j] * sol.betas[j];
  }
  return std::sqrt(std::max(self_sq - 2.0 * cross + xn * xn, 0.0)) / xn;
}

namespace {

struct Projection2D {
  Eigen::MatrixXd chat;  // r1 x r2 data coefficients
  double g_perp_sq = 0.0;
  std::vector<double> prod;     // product spectrum, flattened and sorted
  std::vector<double> cflat;    // chat flattened in the same order
  std::vector<std::pair<int, int>> order;  // (k, l) per flattened position
};

Projection2D project_2d(const SveExpansion& S1, const SveExpansion& S2,
                        const LowRankKernel& G) {
  if (S1.rank() == 0 || S2.rank() == 0)
    throw EmptyExpansion("solve_2d: empty expansion");
  if (!G.domain_s().same_as(S1.phis.front().domain()) ||
      !G.domain_t().same_as(S2.phis.front().domain()))
    throw DomainMismatch("solve_2d: data domains do not match the expansions");
  const int r1 = S1.rank(), r2 = S2.rank(), p = G.rank();
  Eigen::MatrixXd P1(r1, p), P2(r2, p);
  for (int k = 0; k < r1; ++k)
    for (int q = 0; q < p; ++q) P1(k, q) = funapprox::inner(S1.phis[k], G.cols[q]);
  for (int l = 0; l < r2; ++l)
    for (int q = 0; q < p; ++q) P2(l, q) = funapprox::inner(S2.phis[l], G.rows[q]);

  Projection2D out;
  out.chat = P1 * G.middle * P2.transpose();
  const double gn = bivariate::norm(G);
  out.g_perp_sq = std::max(gn * gn - out.chat.squaredNorm(), 0.0);

  out.order.reserve(static_cast<size_t>(r1) * r2);
  for (int k = 0; k < r1; ++k)
    for (int l = 0; l < r2; ++l) out.order.emplace_back(k, l);
  std::sort(out.order.begin(), out.order.end(), [&](auto a, auto b) {
    return S1.sigmas[a.first] * S2.sigmas[a.second] >
           S1.sigmas[b.first] * S2.sigmas[b.second];
  });
  out.prod.reserve(out.order.size());
  out.cflat.reserve(out.order.size());
  for (auto [k, l] : out.order) {
    out.prod.push_back(S1.sigmas[k] * S2.sigmas[l]);
    out.cflat.push_back(out.chat(k, l));
  }
  return out;
}

}  // namespace

Solution2D solve_2d_tsve(const SveExpansion& S1, const SveExpansion& S2,
                         const LowRankKernel& G, double delta, double eta) {
  if (!(delta > 0.0)) throw Error("solve_2d_tsve: delta must be positive");
  Projection2D pr = project_2d(S1, S2, G);
  const int total = static_cast<int>(pr.prod.size());
  const double target_sq = (eta * delta) * (eta * delta);

  int m = total;
  bool warning = true;
  for (int cut = 1; cut <= total; ++cut) {
    if (suffix_residual_sq(pr.cflat, pr.g_perp_sq, cut) <= target_sq) {
      m = cut;
      warning = false;
      break;
    }
  }
  Solution2D sol;
  sol.basis1 = &S1;
  sol.basis2 = &S2;
  sol.param = TruncationIndex{m};
  sol.warning = warning;
  sol.betas = Eigen::MatrixXd::Zero(S1.rank(), S2.rank());
  for (int i = 0; i < m; ++i) {
    auto [k, l] = pr.order[i];
    sol.betas(k, l) = pr.cflat[i] / pr.prod[i];
  }
  sol.residual_norm = std::sqrt(suffix_residual_sq(pr.cflat, pr.g_perp_sq, m));
  return sol;
}

Solution2D solve_2d_tikhonov(const SveExpansion& S1, const SveExpansion& S2,
                             const LowRankKernel& G, double delta, double eta) {
  if (!(delta > 0.0)) throw Error("solve_2d_tikhonov: delta must be positive");
  Projection2D pr = project_2d(S1, S2, G);
  LambdaChoice pick = lambda_root(pr.prod, pr.cflat, pr.g_perp_sq, eta * delta);

  Solution2D sol;
  sol.basis1 = &S1;
  sol.basis2 = &S2;
  sol.param = TikhonovLambda{pick.lambda};
  sol.warning = pick.warning;
  sol.betas = Eigen::MatrixXd::Zero(S1.rank(), S2.rank());
  const double lam_sq = pick.lambda * pick.lambda;
  for (size_t i = 0; i < pr.order.size(); ++i) {
    auto [k, l] = pr.order[i];
    const double s = pr.prod[i];
    sol.betas(k, l) = s * pr.cflat[i] / (s * s + lam_sq);
  }
  sol.residual_norm = filtered_residual(pr.prod, pr.cflat, pr.g_perp_sq, pick.lambda);
  return sol;
}

double eval(const Solution2D& sol, double t1, double t2) {
  Eigen::VectorXd a(sol.betas.rows()), b(sol.betas.cols());
  for (Eigen::Index k = 0; k < a.size(); ++k) a(k) = sol.basis1->psis[k](t1);
  for (Eigen::Index l = 0; l < b.size(); ++l) b(l) = sol.basis2->psis[l](t2);
  return a.dot(sol.betas * b);
}

Eigen::MatrixXd sample_grid(const Solution2D& sol, const std::vector<double>& t1,
                            const std::vector<double>& t2) {
  Eigen::MatrixXd A(sol.betas.rows(), t1.size()), B(sol.betas.cols(), t2.size());
  for (Eigen::Index k = 0; k < A.rows(); ++k)
    for (size_t i = 0; i < t1.size(); ++i) A(k, i) = sol.basis1->psis[k](t1[i]);
  for (Eigen::Index l = 0; l < B.rows(); ++l)
    for (size_t j = 0; j < t2.size(); ++j) B(l, j) = sol.basis2->psis[l](t2[j]);
  return A.transpose() * sol.betas * B;
}

double relative_error_2d(const Solution2D& sol, const PiecewiseFunc& x1,
                         const PiecewiseFunc& x2) {
  const double xn = funapprox::norm(x1) * funapprox::norm(x2);
  if (xn == 0.0) throw ZeroExactNorm("relative_error_2d: exact solution has zero norm");
  Eigen::VectorXd q1(sol.betas.rows()), q2(sol.betas.cols());
  for (Eigen::Index k = 0; k < q1.size(); ++k)
    q1(k) = funapprox::inner(sol.basis1->psis[k], x1);
  for (Eigen::Index l = 0; l < q2.size(); ++l)
    q2(l) = funapprox::inner(sol.basis2->psis[l], x2);
  const double cross = q1.dot(sol.betas * q2);
  const double self_sq = sol.betas.squaredNorm();
  return std::sqrt(std::max(self_sq - 2.0 * cross + xn * xn, 0.0)) / xn;
}

}  // namespace fredsve::regularize
