#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>
#include <numbers>

#include "fredsve/chebfun.hpp"
#include "fredsve/gauss.hpp"

#define CHECK_NEAR(a, b, tol) CHECK(std::abs((a) - (b)) <= (tol))

using namespace fredsve;
using namespace fredsve::funapprox;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("interval mapping and containment") {
  Interval iv(-1.0, 3.0);
  CHECK(iv.length() == doctest::Approx(4.0));
  CHECK(iv.to_unit(-1.0) == doctest::Approx(-1.0));
  CHECK(iv.to_unit(3.0) == doctest::Approx(1.0));
  CHECK(iv.from_unit(0.0) == doctest::Approx(1.0));
  CHECK(iv.contains(3.0));
  CHECK(iv.contains(3.0 + 1e-14));
  CHECK_FALSE(iv.contains(3.1));
  CHECK(iv.same_as(Interval(-1.0, 3.0 + 1e-14)));
  CHECK_FALSE(iv.same_as(Interval(-1.0, 2.0)));
  CHECK_THROWS_AS(Interval(2.0, 2.0), Error);
  CHECK_THROWS_AS(Interval(0.0, std::numeric_limits<double>::infinity()), Error);
}

TEST_CASE("gauss-legendre rules") {
  for (int n : {1, 2, 5, 17, 64}) {
    const quad::GaussRule& r = quad::gauss_legendre(n);
    REQUIRE(static_cast<int>(r.nodes.size()) == n);
    double wsum = 0.0;
    for (double w : r.weights) {
      CHECK(w > 0.0);
      wsum += w;
    }
    CHECK(wsum == doctest::Approx(2.0).epsilon(1e-14));
    // Exact for degree 2n-1.
    int d = 2 * n - 1;
    double quad_val = 0.0;
    for (int i = 0; i < n; ++i) quad_val += r.weights[i] * std::pow(r.nodes[i], d);
    CHECK(std::abs(quad_val) < 1e-12);  // odd power integrates to zero
    if (n >= 2) {
      double quad_even = 0.0;
      for (int i = 0; i < n; ++i) quad_even += r.weights[i] * std::pow(r.nodes[i], d - 1);
      CHECK(quad_even == doctest::Approx(2.0 / d).epsilon(1e-12));
    }
  }
}

TEST_CASE("constant collapses to a single coefficient") {
  auto f = FuncApprox::approximate([](double) { return 3.7; }, Interval(0.0, 1.0));
  REQUIRE(f.coeffs().size() == 1);
  CHECK(f.coeffs()[0] == doctest::Approx(3.7));
  CHECK(f(0.25) == doctest::Approx(3.7));
}

TEST_CASE("sin is resolved to near machine precision") {
  Interval iv(0.0, kPi);
  auto f = FuncApprox::approximate([](double t) { return std::sin(t); }, iv);
  CHECK(f.degree() >= 10);
  CHECK(f.degree() < 40);
  for (int i = 0; i <= 100; ++i) {
    double t = iv.from_unit(-1.0 + 2.0 * i / 100.0);
    CHECK(std::abs(f(t) - std::sin(t)) <= 1e-12);
  }
}

TEST_CASE("chebyshev basis functions reproduce unit coefficient vectors") {
  Interval iv(-1.0, 1.0);
  for (int k : {0, 1, 2, 5, 17, 64}) {
    auto tk = [k](double u) { return std::cos(k * std::acos(std::clamp(u, -1.0, 1.0))); };
    auto f = FuncApprox::approximate(tk, iv);
    REQUIRE(f.degree() == k);
    for (int j = 0; j <= k; ++j)
      CHECK_NEAR(f.coeffs()[j], j == k ? 1.0 : 0.0, 1e-12);
  }
}

TEST_CASE("transform round trip") {
  std::vector<double> c = {0.3, -1.2, 0.0, 0.7, 2.5e-3};
  auto v = coeffs_to_values(c, 5);
  auto c2 = values_to_coeffs(v);
  REQUIRE(c2.size() == c.size());
  for (size_t k = 0; k < c.size(); ++k) CHECK(c2[k] == doctest::Approx(c[k]).epsilon(1e-14));
  // And synthesis at more points than coefficients still transforms back.
  auto v9 = coeffs_to_values(c, 9);
  auto c9 = values_to_coeffs(v9);
  for (size_t k = 0; k < c9.size(); ++k)
    CHECK_NEAR(c9[k], k < c.size() ? c[k] : 0.0, 1e-14);
}

TEST_CASE("clenshaw-curtis weights integrate polynomials exactly") {
  for (int n : {2, 3, 9, 17}) {
    auto w = cc_weights(n);
    auto x = cheb_points(n, Interval(-1.0, 1.0));
    for (int d = 0; d < n; ++d) {
      double acc = 0.0;
      for (int j = 0; j < n; ++j) acc += w[j] * std::pow(x[j], d);
      double exact = (d % 2 == 0) ? 2.0 / (d + 1) : 0.0;
      CHECK_NEAR(acc, exact, 1e-13);
    }
  }
}

TEST_CASE("integrate, inner, norm") {
  Interval iv(0.0, kPi);
  auto s = FuncApprox::approximate([](double t) { return std::sin(t); }, iv);
  auto c = FuncApprox::approximate([](double t) { return std::cos(t); }, iv);
  CHECK(integrate(s) == doctest::Approx(2.0).epsilon(1e-13));
  CHECK_NEAR(inner(s, c), 0.0, 1e-13);
  CHECK(norm(s) == doctest::Approx(std::sqrt(kPi / 2)).epsilon(1e-13));
  CHECK_THROWS_AS(
      inner(s, FuncApprox::approximate([](double t) { return t; }, Interval(0.0, 1.0))),
      DomainMismatch);
}

TEST_CASE("arithmetic and product identity") {
  Interval iv(-1.0, 1.0);
  FuncApprox t1({0.0, 1.0}, iv);
  auto p = multiply(t1, t1);  // T1*T1 = (T0+T2)/2
  REQUIRE(p.coeffs().size() == 3);
  CHECK(p.coeffs()[0] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK_NEAR(p.coeffs()[1], 0.0, 1e-14);
  CHECK(p.coeffs()[2] == doctest::Approx(0.5).epsilon(1e-14));

  auto sum = add(p, scale(-0.5, FuncApprox({1.0}, iv)));
  CHECK(sum(0.3) == doctest::Approx(0.3 * 0.3 - 0.5).epsilon(1e-14));
  auto diff = sub(t1, t1);
  CHECK_NEAR(norm(diff), 0.0, 1e-14);

  auto lc = lincomb({2.0, -1.0}, {&t1, &p});
  CHECK(lc(0.5) == doctest::Approx(2.0 * 0.5 - 0.25).epsilon(1e-13));
}

TEST_CASE("error paths") {
  Interval iv(0.0, 1.0);
  CHECK_THROWS_AS(FuncApprox::approximate([](double t) { return std::sin(300.0 * t); }, iv,
                                          {.tol = 1e-14, .max_degree = 16}),
                  NonConvergence);
  CHECK_THROWS_AS(FuncApprox::approximate(
                      [](double t) { return t < 0.5 ? 1.0 : std::nan(""); }, iv),
                  NonFinite);
  auto f = FuncApprox::approximate([](double t) { return t; }, iv);
  CHECK_THROWS_AS(f(1.5), OutOfDomain);
  CHECK_THROWS_AS(f(-0.2), OutOfDomain);
}

TEST_CASE("abs_floor raises the chop threshold") {
  Interval iv(0.0, 1.0);
  auto f = [](double t) { return std::exp(t) + 1e-9 * std::sin(40.0 * t); };
  auto tight = FuncApprox::approximate(f, iv);
  auto floored = FuncApprox::approximate(f, iv, {.abs_floor = 1e-6});
  CHECK(floored.degree() < tight.degree());
  CHECK(std::abs(floored(0.5) - std::exp(0.5)) < 1e-6);
}

TEST_CASE("from_values interpolates") {
  Interval iv(0.0, 2.0);
  auto x = cheb_points(9, iv);
  std::vector<double> v(9);
  for (int j = 0; j < 9; ++j) v[j] = x[j] * x[j] * x[j];
  auto f = FuncApprox::from_values(v, iv, 1e-14);
  REQUIRE(f.degree() == 3);
  CHECK(f(1.3) == doctest::Approx(1.3 * 1.3 * 1.3).epsilon(1e-13));
}

TEST_CASE("piecewise indicator") {
  Interval iv(0.0, 1.0);
  auto ind = PiecewiseFunc::indicator(iv, 1.0 / 3, 2.0 / 3);
  CHECK(ind(0.1) == 0.0);
  CHECK(ind(0.5) == 1.0);
  CHECK(ind(0.9) == 0.0);
  CHECK(norm(ind) == doctest::Approx(std::sqrt(1.0 / 3)).epsilon(1e-13));
  CHECK_THROWS_AS(ind(1.2), OutOfDomain);
  REQUIRE(ind.pieces().size() == 3);
  CHECK(ind.domain().same_as(iv));
}

TEST_CASE("inner and dist against a piecewise function") {
  Interval iv(0.0, 1.0);
  auto ind = PiecewiseFunc::indicator(iv, 0.25, 0.75, 2.0);
  auto one = FuncApprox({1.0}, iv);
  CHECK(inner(one, ind) == doctest::Approx(1.0).epsilon(1e-13));
  auto lin = FuncApprox::approximate([](double t) { return t; }, iv);
  CHECK(inner(lin, ind) == doctest::Approx(0.5).epsilon(1e-13));  // 2 * (t^2/2) from .25 to .75
  // ||1 - ind||^2 = 0.25 + 0.5*1 + 0.25 = 1.0
  CHECK(dist(one, ind) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK_THROWS_AS(inner(FuncApprox({1.0}, Interval(0.0, 2.0)), ind), DomainMismatch);
}

TEST_CASE("piecewise construction validation") {
  Interval a(0.0, 0.5), b(0.6, 1.0);
  std::vector<std::pair<Interval, FuncApprox>> gap;
  gap.emplace_back(a, FuncApprox({1.0}, a));
  gap.emplace_back(b, FuncApprox({1.0}, b));
  CHECK_THROWS_AS(PiecewiseFunc(std::move(gap)), Error);
  CHECK_THROWS_AS(PiecewiseFunc::indicator(Interval(0.0, 1.0), 0.7, 0.3), Error);
}
