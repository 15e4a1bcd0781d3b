#include "problems.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace fredsve::problems {

namespace {

constexpr double kPi = std::numbers::pi;

TestProblem build(std::string name, std::function<double(double, double)> kernel,
                  Interval o1, Interval o2, PiecewiseFunc x,
                  const std::function<double(double)>* g_formula) {
  auto [K, trace] = bivariate::aca(kernel, o2, o1, {.tol = 1e-13});
  FuncApprox gx = bivariate::apply(K, x);
  FuncApprox g = g_formula ? FuncApprox::approximate(*g_formula, o2) : gx;
  if (funapprox::norm(funapprox::sub(gx, g)) > 1e-8 * funapprox::norm(g))
    throw Error(name + ": right-hand side inconsistent with kernel and solution");
  return TestProblem{std::move(name), std::move(kernel), o1,      o2,
                     std::move(x),    std::move(g),      std::move(K),
                     std::move(trace), nullptr};
}

TestProblem make_baart() {
  Interval o1(0.0, kPi), o2(0.0, kPi / 2);
  auto kernel = [](double s, double t) { return std::exp(s * std::cos(t)); };
  auto x = PiecewiseFunc::single(
      FuncApprox::approximate([](double t) { return std::sin(t); }, o1));
  std::function<double(double)> g = [](double s) {
    if (std::abs(s) < 1e-4) return 2.0 * (1.0 + s * s / 6.0 + s * s * s * s / 120.0);
    return 2.0 * std::sinh(s) / s;
  };
  return build("baart", kernel, o1, o2, std::move(x), &g);
}

TestProblem make_foxgood() {
  Interval d(0.0, 1.0);
  auto kernel = [](double s, double t) { return std::sqrt(s * s + t * t); };
  auto x = PiecewiseFunc::single(FuncApprox({0.5, 0.5}, d));
  std::function<double(double)> g = [](double s) {
    return (std::pow(1.0 + s * s, 1.5) - s * s * s) / 3.0;
  };
  return build("foxgood", kernel, d, d, std::move(x), &g);
}

TestProblem make_gravity() {
  Interval d(0.0, 1.0);
  const double depth = 0.25;
  auto kernel = [depth](double s, double t) {
    double dd = depth * depth + (s - t) * (s - t);
    return depth / (dd * std::sqrt(dd));
  };
  auto x = PiecewiseFunc::single(FuncApprox::approximate(
      [](double t) { return std::sin(kPi * t) + 0.5 * std::sin(2.0 * kPi * t); }, d));
  return build("gravity", kernel, d, d, std::move(x), nullptr);
}

double sinc_sq(double u) {
  if (std::abs(u) < 1e-4) {
    double u2 = u * u;
    return 1.0 - u2 / 3.0 + 2.0 * u2 * u2 / 45.0;
  }
  double r = std::sin(u) / u;
  return r * r;
}

TestProblem make_shaw() {
  Interval d(-kPi / 2, kPi / 2);
  auto kernel = [](double s, double t) {
    double c = std::cos(s) + std::cos(t);
    double u = kPi * (std::sin(s) + std::sin(t));
    return c * c * sinc_sq(u);
  };
  auto x = PiecewiseFunc::single(FuncApprox::approximate(
      [](double t) {
        return 2.0 * std::exp(-6.0 * (t - 0.8) * (t - 0.8)) +
               std::exp(-2.0 * (t + 0.5) * (t + 0.5));
      },
      d));
  return build("shaw", kernel, d, d, std::move(x), nullptr);
}

TestProblem make_wing() {
  Interval d(0.0, 1.0);
  auto kernel = [](double s, double t) { return t * std::exp(-s * t * t); };
  auto x = PiecewiseFunc::indicator(d, 1.0 / 3, 2.0 / 3);
  std::function<double(double)> g = [](double s) {
    if (std::abs(s) < 1e-4)
      return 1.0 / 6.0 - 5.0 * s / 108.0 + 7.0 * s * s / 972.0;
    return (std::exp(-s / 9.0) - std::exp(-4.0 * s / 9.0)) / (2.0 * s);
  };
  return build("wing", kernel, d, d, std::move(x), &g);
}

TestProblem make_blur_axis(const Interval& d, double a, double b) {
  const double width = 0.2;
  auto kernel = [width](double s, double t) {
    return std::exp(-(t - s) * (t - s) / (2.0 * width * width)) /
           std::sqrt(2.0 * kPi * width * width);
  };
  auto x = PiecewiseFunc::indicator(d, a, b);
  std::function<double(double)> g = [width, a, b](double s) {
    double c = width * std::sqrt(2.0);
    return 0.5 * (std::erf((b - s) / c) - std::erf((a - s) / c));
  };
  return build("blur2d", kernel, d, d, std::move(x), &g);
}

TestProblem make_blur2d() {
  TestProblem p = make_blur_axis(Interval(-1.0, 1.0), -0.5, 0.2);
  p.axis2 = std::make_shared<TestProblem>(make_blur_axis(Interval(-2.0, 2.0), -0.6, -0.2));
  return p;
}

FuncApprox draw_noise(const Interval& dom, double vartheta, std::mt19937_64& rng) {
  const int m = static_cast<int>(std::ceil(dom.length() / vartheta));
  const double w = 2.0 * kPi / dom.length();
  std::vector<double> a(m + 1), b(m + 1);
  std::normal_distribution<double> gauss;
  for (int k = 0; k <= m; ++k) {
    a[k] = gauss(rng);
    b[k] = gauss(rng);
  }
  return FuncApprox::approximate(
      [a = std::move(a), b = std::move(b), w, lo = dom.lo, m](double s) {
        double acc = 0.0;
        for (int k = 0; k <= m; ++k) {
          double arg = k * w * (s - lo);
          acc += a[k] * std::cos(arg) + b[k] * std::sin(arg);
        }
        return acc;
      },
      dom);
}

}  // namespace

const std::vector<std::string>& problem_names() {
  static const std::vector<std::string> names = {"baart", "foxgood", "gravity",
                                                 "shaw",  "wing",    "blur2d"};
  return names;
}

TestProblem make_problem(const std::string& name) {
  if (name == "baart") return make_baart();
  if (name == "foxgood") return make_foxgood();
  if (name == "gravity") return make_gravity();
  if (name == "shaw") return make_shaw();
  if (name == "wing") return make_wing();
  if (name == "blur2d") return make_blur2d();
  throw UnknownProblem("make_problem: unknown problem '" + name + "'");
}

FuncApprox smooth_noise(const Interval& domain, const NoiseSpec& spec) {
  if (!(spec.vartheta > 0.0)) throw Error("smooth_noise: vartheta must be positive");
  std::mt19937_64 rng(spec.seed);
  return draw_noise(domain, spec.vartheta, rng);
}

std::pair<FuncApprox, double> contaminate(const FuncApprox& g, const NoiseSpec& spec) {
  if (spec.alpha < 0.0) throw Error("contaminate: alpha must be nonnegative");
  if (spec.alpha == 0.0) return {g, 0.0};
  FuncApprox F = smooth_noise(g.domain(), spec);
  double nF = funapprox::norm(F);
  if (nF == 0.0) throw ZeroNoiseNorm("contaminate: noise draw has zero norm");
  double ng = funapprox::norm(g);
  double delta = spec.alpha * ng;
  FuncApprox gd = funapprox::add(g, funapprox::scale(spec.alpha * ng / nF, F));
  double measured = funapprox::norm(funapprox::sub(gd, g));
  if (std::abs(measured - delta) > 1e-12 * std::max(delta, ng))
    throw Error("contaminate: perturbation norm drifted from alpha * ||g||");
  return {std::move(gd), delta};
}

LowRankKernel smooth_noise_2d(const Interval& d1, const Interval& d2,
                              const NoiseSpec& spec, int r_noise) {
  if (!(spec.vartheta > 0.0)) throw Error("smooth_noise_2d: vartheta must be positive");
  if (r_noise < 1) throw Error("smooth_noise_2d: r_noise must be >= 1");
  std::mt19937_64 rng(spec.seed);
  LowRankKernel F;
  for (int p = 0; p < r_noise; ++p) {
    F.cols.push_back(draw_noise(d1, spec.vartheta, rng));
    F.rows.push_back(draw_noise(d2, spec.vartheta, rng));
  }
  F.middle = Eigen::MatrixXd::Identity(r_noise, r_noise);
  return F;
}

std::pair<LowRankKernel, double> contaminate_2d(const LowRankKernel& g,
                                                const NoiseSpec& spec, int r_noise) {
  if (spec.alpha < 0.0) throw Error("contaminate_2d: alpha must be nonnegative");
  if (spec.alpha == 0.0) return {g, 0.0};
  LowRankKernel F = smooth_noise_2d(g.domain_s(), g.domain_t(), spec, r_noise);
  double nF = bivariate::norm(F);
  if (nF == 0.0) throw ZeroNoiseNorm("contaminate_2d: noise draw has zero norm");
  double ng = bivariate::norm(g);
  double delta = spec.alpha * ng;
  LowRankKernel gd = bivariate::add(g, bivariate::scale(spec.alpha * ng / nF, F));
  return {std::move(gd), delta};
}

}  // namespace fredsve::problems
