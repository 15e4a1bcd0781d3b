#pragma once

#include <variant>
#include <vector>

#include "sve.hpp"

namespace fredsve::regularize {

using bivariate::LowRankKernel;
using funapprox::FuncApprox;
using funapprox::PiecewiseFunc;
using sve::SveExpansion;

// Data coefficients in the left singular basis. g_perp_norm_sq is the part
// of ||g||^2 outside the span of the retained phis; it participates in every
// residual below, since no choice of coefficients can reduce it.
struct RhsProjection {
  std::vector<double> c;
  double g_perp_norm_sq = 0.0;
  double g_norm = 0.0;
};

RhsProjection project_rhs(const SveExpansion& S, const FuncApprox& g);

struct TruncationIndex {
  int ell;
};
struct TikhonovLambda {
  double lambda;
};
using RegParam = std::variant<TruncationIndex, TikhonovLambda>;

// Expansion coefficients of a regularized solution over the right singular
// functions of `basis` (which must outlive the solution). Truncated solves
// carry ell coefficients; spectrally filtered ones carry the full rank.
struct RegularizedSolution {
  std::vector<double> betas;
  const SveExpansion* basis = nullptr;
  RegParam param;
  double residual_norm = 0.0;
  bool warning = false;
};

RegularizedSolution tsve_solve(const SveExpansion& S, const RhsProjection& P, int ell);
RegularizedSolution tikhonov_solve(const SveExpansion& S, const RhsProjection& P,
                                   double lambda);

double eval(const RegularizedSolution& sol, double t);
double solution_norm(const RegularizedSolution& sol);

// Smallest truncation index whose residual meets eta*delta; full rank with
// `warning` set when even that residual stays above the target.
struct TruncationChoice {
  int ell;
  bool warning;
};
TruncationChoice discrepancy_truncation(const SveExpansion& S, const RhsProjection& P,
                                        double delta, double eta);

// Largest index still carrying a singular value >= eta*delta; `warning` when
// even sigma_1 falls short.
TruncationChoice sigma_rule_truncation(const SveExpansion& S, double delta, double eta);

// Root of residual(lambda) = eta*delta located over lambda in
// [1e-12 sigma_1, 10 sigma_1] by Brent minimization of the squared gap on a
// log scale; a boundary value with `warning` set when the root is not
// bracketed.
struct LambdaChoice {
  double lambda;
  bool warning;
};
LambdaChoice discrepancy_lambda(const SveExpansion& S, const RhsProjection& P,
                                double delta, double eta);

// Error-data coefficients gamma_i = <phi_i, g_delta - g>; their sum of
// squares never exceeds ||g_delta - g||^2 (Bessel), which is what makes the
// truncation bound below an actual bound.
double tsve_error_bound(const SveExpansion& S, const std::vector<double>& exact_betas,
                        int ell, double delta);

// L2 distance between a regularized solution and the expansion with the
// given coefficients, both living in the span of the basis.
double inspan_distance(const std::vector<double>& exact_betas,
                       const RegularizedSolution& sol);

double relative_error(const RegularizedSolution& sol, const PiecewiseFunc& x_exact);

// Separable 2D solves: data given as a separated bivariate function, the
// operator as the pair of per-axis expansions. Coefficients are indexed by
// (left index k, right index l); the effective spectrum is sigma_k * mu_l.
struct Solution2D {
  Eigen::MatrixXd betas;
  const SveExpansion* basis1 = nullptr;
  const SveExpansion* basis2 = nullptr;
  RegParam param;
  double residual_norm = 0.0;
  bool warning = false;
};

Solution2D solve_2d_tsve(const SveExpansion& S1, const SveExpansion& S2,
                         const LowRankKernel& G, double delta, double eta);
Solution2D solve_2d_tikhonov(const SveExpansion& S1, const SveExpansion& S2,
                             const LowRankKernel& G, double delta, double eta);

double eval(const Solution2D& sol, double t1, double t2);

// Solution values tabulated on a tensor grid, rows indexed by t1.
Eigen::MatrixXd sample_grid(const Solution2D& sol, const std::vector<double>& t1,
                            const std::vector<double>& t2);

// Relative error against a separable exact solution x(t1,t2) = x1(t1) x2(t2).
double relative_error_2d(const Solution2D& sol, const PiecewiseFunc& x1,
                         const PiecewiseFunc& x2);

}  // namespace fredsve::regularize
