#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "interval.hpp"
#include "problems.hpp"

namespace fredsve::oracle {

using funapprox::Interval;

// Weighted collocation matrix on Gauss-Legendre nodes. With the symmetric
// sqrt-weight scaling, matrix singular values approximate the operator's
// singular values directly, and Euclidean norms of weighted sample vectors
// approximate L2 norms.
struct DiscreteOperator {
  std::vector<double> nodes_s, weights_s;  // data side
  std::vector<double> nodes_t, weights_t;  // solution side
  Eigen::MatrixXd matrix;                  // sqrt(ws_i) k(s_i,t_j) sqrt(wt_j)
};

DiscreteOperator discretize(const std::function<double(double, double)>& kernel,
                            Interval domain_s, Interval domain_t, int n);
DiscreteOperator discretize(const problems::TestProblem& P, int n);

struct DiscreteSvd {
  Eigen::VectorXd sigma;  // non-increasing
  Eigen::MatrixXd u, v;
};

DiscreteSvd decompose(const DiscreteOperator& D);

// Solution samples are plain function values at nodes_t (the sqrt-weight
// scaling is internal). `param` is the truncation index or lambda; `warning`
// marks a discrepancy target that was unattainable inside the search range.
struct DiscreteSolution {
  Eigen::VectorXd x;
  double param = 0.0;
  double residual_norm = 0.0;
  bool warning = false;
};

// g_samples are plain g(s_i) values at nodes_s.
DiscreteSolution tsvd_solve(const DiscreteOperator& D, const DiscreteSvd& S,
                            const Eigen::VectorXd& g_samples, int ell);
DiscreteSolution tsvd_solve(const DiscreteOperator& D, const DiscreteSvd& S,
                            const Eigen::VectorXd& g_samples, double delta,
                            double eta);
DiscreteSolution tikhonov_solve(const DiscreteOperator& D, const DiscreteSvd& S,
                                const Eigen::VectorXd& g_samples, double lambda);
DiscreteSolution tikhonov_solve(const DiscreteOperator& D, const DiscreteSvd& S,
                                const Eigen::VectorXd& g_samples, double delta,
                                double eta);

// Quadrature L2 relative error of solution samples against the exact
// solution evaluated at the same nodes.
double relative_error(const DiscreteOperator& D, const Eigen::VectorXd& x_samples,
                      const funapprox::PiecewiseFunc& x_exact);

}  // namespace fredsve::oracle
