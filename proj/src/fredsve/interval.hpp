#pragma once

#include <cmath>

#include "errors.hpp"

namespace fredsve::funapprox {

struct Interval {
  double lo;
  double hi;

  Interval(double lo_, double hi_) : lo(lo_), hi(hi_) {
    if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi))
      throw Error("Interval: require finite lo < hi");
  }

  double length() const { return hi - lo; }

  // Map t in [lo,hi] to u in [-1,1] and back.
  double to_unit(double t) const { return (2.0 * t - lo - hi) / (hi - lo); }
  double from_unit(double u) const { return lo + 0.5 * (u + 1.0) * (hi - lo); }

  double slack() const { return 1e-12 * (length() + std::abs(lo) + std::abs(hi)); }

  bool contains(double t) const { return t >= lo - slack() && t <= hi + slack(); }

  bool same_as(const Interval& o) const {
    double s = slack() + o.slack();
    return std::abs(lo - o.lo) <= s && std::abs(hi - o.hi) <= s;
  }
};

}  // namespace fredsve::funapprox
