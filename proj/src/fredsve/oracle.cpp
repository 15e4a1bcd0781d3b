#include "oracle.hpp"

#include <cmath>

#include "errors.hpp"
#include "gauss.hpp"

namespace fredsve::oracle {

namespace {

void gl_on(const Interval& dom, int n, std::vector<double>& nodes,
           std::vector<double>& weights) {
  const quad::GaussRule& rule = quad::gauss_legendre(n);
  const double mid = 0.5 * (dom.lo + dom.hi);
  const double half = 0.5 * dom.length();
  nodes.resize(n);
  weights.resize(n);
  for (int i = 0; i < n; ++i) {
    nodes[i] = mid + half * rule.nodes[i];
    weights[i] = half * rule.weights[i];
  }
}

Eigen::VectorXd weighted_rhs(const DiscreteOperator& D,
                             const Eigen::VectorXd& g_samples) {
  if (g_samples.size() != static_cast<Eigen::Index>(D.nodes_s.size()))
    throw Error("oracle: g_samples length does not match nodes_s");
  Eigen::VectorXd b(g_samples.size());
  for (Eigen::Index i = 0; i < b.size(); ++i)
    b(i) = std::sqrt(D.weights_s[i]) * g_samples(i);
  return b;
}

Eigen::VectorXd unweight_solution(const DiscreteOperator& D,
                                  const Eigen::VectorXd& xw) {
  Eigen::VectorXd x(xw.size());
  for (Eigen::Index j = 0; j < x.size(); ++j)
    x(j) = xw(j) / std::sqrt(D.weights_t[j]);
  return x;
}

double out_of_span_sq(const Eigen::VectorXd& b, const Eigen::VectorXd& c) {
  return std::max(b.squaredNorm() - c.squaredNorm(), 0.0);
}

DiscreteSolution tikhonov_at(const DiscreteOperator& D, const DiscreteSvd& S,
                             const Eigen::VectorXd& b, const Eigen::VectorXd& c,
                             double lambda) {
  const Eigen::Index r = S.sigma.size();
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(r);
  double res_sq = out_of_span_sq(b, c);
  for (Eigen::Index j = 0; j < r; ++j) {
    const double s = S.sigma(j);
    if (s == 0.0) {
      res_sq += c(j) * c(j);
      continue;
    }
    const double d = s * s + lambda * lambda;
    beta(j) = s * c(j) / d;
    const double rf = lambda * lambda / d;
    res_sq += rf * rf * c(j) * c(j);
  }
  DiscreteSolution out;
  out.x = unweight_solution(D, S.v * beta);
  out.param = lambda;
  out.residual_norm = std::sqrt(res_sq);
  return out;
}

}  // namespace

DiscreteOperator discretize(const std::function<double(double, double)>& kernel,
                            Interval domain_s, Interval domain_t, int n) {
  if (n < 2) throw Error("discretize: n must be >= 2");
  DiscreteOperator D;
  gl_on(domain_s, n, D.nodes_s, D.weights_s);
  gl_on(domain_t, n, D.nodes_t, D.weights_t);
  D.matrix.resize(n, n);
  for (int i = 0; i < n; ++i) {
    const double rs = std::sqrt(D.weights_s[i]);
    for (int j = 0; j < n; ++j) {
      const double k = kernel(D.nodes_s[i], D.nodes_t[j]);
      if (!std::isfinite(k)) throw NonFinite("discretize: non-finite kernel value");
      D.matrix(i, j) = rs * k * std::sqrt(D.weights_t[j]);
    }
  }
  return D;
}

DiscreteOperator discretize(const problems::TestProblem& P, int n) {
  return discretize(P.kernel, P.omega2, P.omega1, n);
}

DiscreteSvd decompose(const DiscreteOperator& D) {
  Eigen::BDCSVD<Eigen::MatrixXd> svd(D.matrix,
                                     Eigen::ComputeThinU | Eigen::ComputeThinV);
  return DiscreteSvd{svd.singularValues(), svd.matrixU(), svd.matrixV()};
}

DiscreteSolution tsvd_solve(const DiscreteOperator& D, const DiscreteSvd& S,
                            const Eigen::VectorXd& g_samples, int ell) {
  const Eigen::Index r = S.sigma.size();
  if (ell < 1 || ell > r) throw OutOfRange("tsvd_solve: truncation index out of range");
  const Eigen::VectorXd b = weighted_rhs(D, g_samples);
  const Eigen::VectorXd c = S.u.transpose() * b;
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(r);
  double res_sq = out_of_span_sq(b, c);
  for (Eigen::Index j = 0; j < r; ++j) {
    if (j < ell && S.sigma(j) > 0.0)
      beta(j) = c(j) / S.sigma(j);
    else
      res_sq += c(j) * c(j);
  }
  DiscreteSolution out;
  out.x = unweight_solution(D, S.v * beta);
  out.param = ell;
  out.residual_norm = std::sqrt(res_sq);
  return out;
}

DiscreteSolution tsvd_solve(const DiscreteOperator& D, const DiscreteSvd& S,
                            const Eigen::VectorXd& g_samples, double delta,
                            double eta) {
  const Eigen::Index r = S.sigma.size();
  const Eigen::VectorXd b = weighted_rhs(D, g_samples);
  const Eigen::VectorXd c = S.u.transpose() * b;
  const double target_sq = (eta * delta) * (eta * delta);
  // res_sq[l] is the squared residual when the first l components are kept.
  std::vector<double> res_sq(r + 1, 0.0);
  res_sq[r] = out_of_span_sq(b, c);
  for (Eigen::Index j = r; j-- > 0;) res_sq[j] = res_sq[j + 1] + c(j) * c(j);
  int ell = static_cast<int>(r);
  bool warning = true;
  for (Eigen::Index l = 1; l <= r; ++l) {
    if (res_sq[l] <= target_sq) {
      ell = static_cast<int>(l);
      warning = false;
      break;
    }
  }
  DiscreteSolution out = tsvd_solve(D, S, g_samples, ell);
  out.warning = warning;
  return out;
}

DiscreteSolution tikhonov_solve(const DiscreteOperator& D, const DiscreteSvd& S,
                                const Eigen::VectorXd& g_samples, double lambda) {
  if (lambda < 0.0) throw Error("tikhonov_solve: lambda must be >= 0");
  const Eigen::VectorXd b = weighted_rhs(D, g_samples);
  const Eigen::VectorXd c = S.u.transpose() * b;
  if (lambda == 0.0) {
    DiscreteSolution out = tsvd_solve(D, S, g_samples, static_cast<int>(S.sigma.size()));
    out.param = 0.0;
    return out;
  }
  return tikhonov_at(D, S, b, c, lambda);
}

DiscreteSolution tikhonov_solve(const DiscreteOperator& D, const DiscreteSvd& S,
                                const Eigen::VectorXd& g_samples, double delta,
                                double eta) {
  const Eigen::VectorXd b = weighted_rhs(D, g_samples);
  const Eigen::VectorXd c = S.u.transpose() * b;
  const double s1 = S.sigma.size() > 0 ? S.sigma(0) : 0.0;
  if (s1 <= 0.0) {
    DiscreteSolution out;
    out.x = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(D.nodes_t.size()));
    out.residual_norm = b.norm();
    out.warning = true;
    return out;
  }
  const double target = eta * delta;
  double lo = std::log(1e-12 * s1), hi = std::log(10.0 * s1);
  auto res_at = [&](double loglam) {
    return tikhonov_at(D, S, b, c, std::exp(loglam)).residual_norm;
  };
  if (res_at(lo) >= target) {
    DiscreteSolution out = tikhonov_at(D, S, b, c, std::exp(lo));
    out.warning = true;
    return out;
  }
  if (res_at(hi) <= target) {
    DiscreteSolution out = tikhonov_at(D, S, b, c, std::exp(hi));
    out.warning = true;
    return out;
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (res_at(mid) <= target)
      lo = mid;
    else
      hi = mid;
  }
  return tikhonov_at(D, S, b, c, std::exp(0.5 * (lo + hi)));
}

double relative_error(const DiscreteOperator& D, const Eigen::VectorXd& x_samples,
                      const funapprox::PiecewiseFunc& x_exact) {
  if (x_samples.size() != static_cast<Eigen::Index>(D.nodes_t.size()))
    throw Error("relative_error: sample length does not match nodes_t");
  double num = 0.0, den = 0.0;
  for (Eigen::Index j = 0; j < x_samples.size(); ++j) {
    const double xe = x_exact(D.nodes_t[j]);
    const double d = x_samples(j) - xe;
    num += D.weights_t[j] * d * d;
    den += D.weights_t[j] * xe * xe;
  }
  if (den == 0.0) throw ZeroExactNorm("relative_error: exact solution has zero norm");
  return std::sqrt(num / den);
}

}  // namespace fredsve::oracle
