#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "interval.hpp"

namespace fredsve::funapprox {

struct ApproxOptions {
  double tol = 1e-14;       // relative coefficient chop threshold
  int max_degree = 1 << 16; // resolution ceiling (number of coefficients - 1)
  double abs_floor = 0.0;   // additional absolute chop threshold
};

// A univariate function represented by a Chebyshev-T coefficient series on an
// interval. coeffs[k] multiplies T_k of the affinely mapped argument.
class FuncApprox {
 public:
  FuncApprox(std::vector<double> coeffs, Interval domain);

  // Adaptive construction: sample at second-kind Chebyshev points, doubling
  // 9, 17, 33, ... until the trailing three coefficients fall below
  // max(tol * max|coeff|, abs_floor), then chop at that threshold.
  static FuncApprox approximate(const std::function<double(double)>& f,
                                Interval domain, ApproxOptions opt = {});

  // Same ladder, but the caller supplies values on the full n-point grid per
  // stage (useful when batch evaluation is much cheaper than pointwise) plus
  // a pointwise evaluator for the off-grid anti-aliasing probe.
  static FuncApprox approximate_grid(
      const std::function<std::vector<double>(int)>& values_on_grid,
      const std::function<double(double)>& probe_eval, Interval domain,
      ApproxOptions opt = {});

  // Interpolant through values at second-kind points; values[j] corresponds
  // to x_j = cos(j*pi/(n-1)) mapped to the domain (so values[0] is at hi).
  static FuncApprox from_values(const std::vector<double>& values, Interval domain,
                                double chop_tol = 0.0, double abs_floor = 0.0);

  double operator()(double t) const;

  const std::vector<double>& coeffs() const { return coeffs_; }
  const Interval& domain() const { return domain_; }
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  double max_abs_coeff() const;

 private:
  std::vector<double> coeffs_;
  Interval domain_;
};

// Second-kind Chebyshev points (n of them, n >= 2), index 0 at domain.hi.
std::vector<double> cheb_points(int n, const Interval& domain);

// Values at second-kind points -> Chebyshev-T coefficients (DCT-I structure).
std::vector<double> values_to_coeffs(const std::vector<double>& values);

// Coefficients -> values at n second-kind points (inverse of the above when
// n == coeffs.size()).
std::vector<double> coeffs_to_values(const std::vector<double>& coeffs, int n);

// Clenshaw-Curtis quadrature weights for n second-kind points on [-1,1],
// matching the cheb_points ordering.
std::vector<double> cc_weights(int n);

double integrate(const FuncApprox& f);
double inner(const FuncApprox& a, const FuncApprox& b);
double norm(const FuncApprox& f);

FuncApprox lincomb(const std::vector<double>& w, const std::vector<const FuncApprox*>& fs);
FuncApprox add(const FuncApprox& a, const FuncApprox& b);
FuncApprox sub(const FuncApprox& a, const FuncApprox& b);
FuncApprox scale(double c, const FuncApprox& f);
FuncApprox multiply(const FuncApprox& a, const FuncApprox& b);

// A function given piecewise by abutting FuncApprox pieces (used for
// discontinuous exact solutions; never fed to the low-rank machinery).
class PiecewiseFunc {
 public:
  explicit PiecewiseFunc(std::vector<std::pair<Interval, FuncApprox>> pieces);

  static PiecewiseFunc single(FuncApprox f);
  // Indicator of (a,b) inside domain, value `height` inside and 0 outside.
  static PiecewiseFunc indicator(const Interval& domain, double a, double b,
                                 double height = 1.0);

  double operator()(double t) const;
  const std::vector<std::pair<Interval, FuncApprox>>& pieces() const { return pieces_; }
  Interval domain() const;

 private:
  std::vector<std::pair<Interval, FuncApprox>> pieces_;
};

double norm(const PiecewiseFunc& f);

// Exact integral of f*g over the piece intervals of g (f is any evaluable
// function; the quadrature order covers deg(f_hint) + deg(piece)).
double inner(const FuncApprox& f, const PiecewiseFunc& g);

// || f - g || with f global and g piecewise; quadrature split at g's breakpoints.
double dist(const FuncApprox& f, const PiecewiseFunc& g);

}  // namespace fredsve::funapprox
