#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "bivariate.hpp"

namespace fredsve::problems {

using bivariate::LowRankKernel;
using bivariate::PivotTrace;
using funapprox::FuncApprox;
using funapprox::Interval;
using funapprox::PiecewiseFunc;

// A named integral-equation instance: kernel on omega2 x omega1, exact
// solution on omega1, error-free right-hand side on omega2. `lowrank` holds
// the separated form of the kernel built at construction (tolerance 1e-13);
// construction verifies ||K x_exact - g_exact|| <= 1e-8 ||g_exact||.
// For the 2D problem the struct describes the first axis and `axis2` the
// second; the full kernel, solution, and data are the per-axis products.
struct TestProblem {
  std::string name;
  std::function<double(double, double)> kernel;
  Interval omega1;  // t-domain (solution side)
  Interval omega2;  // s-domain (data side)
  PiecewiseFunc x_exact;
  FuncApprox g_exact;
  LowRankKernel lowrank;
  PivotTrace trace;
  std::shared_ptr<TestProblem> axis2;

  bool is_2d() const { return axis2 != nullptr; }
};

const std::vector<std::string>& problem_names();

// Throws UnknownProblem for names outside problem_names().
TestProblem make_problem(const std::string& name);

struct NoiseSpec {
  double alpha = 0.0;      // noise level: delta = alpha * ||g||
  double vartheta = 1e-2;  // reciprocal frequency band: m = ceil(length / vartheta)
  std::uint64_t seed = 0;
};

// Band-limited random function: sum over frequencies 0..m of
// a_k cos(k w (s-lo)) + b_k sin(k w (s-lo)), w = 2 pi / length, with
// standard normal coefficients drawn deterministically from the seed.
FuncApprox smooth_noise(const Interval& domain, const NoiseSpec& spec);

// g_delta = g + alpha (||g|| / ||F||) F, so that delta = alpha ||g|| exactly.
std::pair<FuncApprox, double> contaminate(const FuncApprox& g, const NoiseSpec& spec);

// 2D analogue: a rank-r_noise sum of products of independent 1D draws.
LowRankKernel smooth_noise_2d(const Interval& d1, const Interval& d2,
                              const NoiseSpec& spec, int r_noise = 10);
std::pair<LowRankKernel, double> contaminate_2d(const LowRankKernel& g,
                                                const NoiseSpec& spec, int r_noise = 10);

}  // namespace fredsve::problems
