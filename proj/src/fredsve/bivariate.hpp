#pragma once

#include <functional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "chebfun.hpp"

namespace fredsve::bivariate {

using funapprox::FuncApprox;
using funapprox::Interval;

// Bivariate function in separated form: K(s,t) = Σ_{p,q} cols_p(s) · D_{pq} · rows_q(t).
// A rank-0 object (empty cols/rows) represents the zero kernel.
struct LowRankKernel {
  std::vector<FuncApprox> cols;  // functions of s
  Eigen::MatrixXd middle;
  std::vector<FuncApprox> rows;  // functions of t

  int rank() const { return static_cast<int>(cols.size()); }
  const Interval& domain_s() const;
  const Interval& domain_t() const;
};

struct PivotStep {
  double s;
  double t;
  double magnitude;  // |residual| at the pivot when it was selected
};
using PivotTrace = std::vector<PivotStep>;

struct AcaOptions {
  double tol = 1e-13;   // stop when |pivot| <= tol * |first pivot|
  int max_rank = 100;
  int grid = 65;        // coarse pivot-search grid per axis
};

// Adaptive cross approximation of kernel(s,t) on domain_s x domain_t.
// Each step picks an approximate maximizer of the current residual (coarse
// Chebyshev grid scan plus a few alternating 1D refinement sweeps) and
// subtracts the rank-1 cross residual(s,y)·residual(x,t)/residual(x,y).
// Throws RankOverflow if max_rank crosses do not reach the tolerance.
std::pair<LowRankKernel, PivotTrace> aca(
    const std::function<double(double, double)>& kernel, Interval domain_s,
    Interval domain_t, const AcaOptions& opt = {});

double eval2(const LowRankKernel& K, double s, double t);

// (K x)(s) = ∫ K(s,t) x(t) dt.
FuncApprox apply(const LowRankKernel& K, const FuncApprox& x);
FuncApprox apply(const LowRankKernel& K, const funapprox::PiecewiseFunc& x);

// L2 norm over the rectangle, computed from the separated form.
double norm(const LowRankKernel& K);

// Pointwise sum and scaling, staying in separated form.
LowRankKernel add(const LowRankKernel& a, const LowRankKernel& b);
LowRankKernel scale(double c, const LowRankKernel& K);

}  // namespace fredsve::bivariate
