#include "bivariate.hpp"

#include <cmath>

namespace fredsve::bivariate {

using funapprox::cheb_points;

const Interval& LowRankKernel::domain_s() const {
  if (cols.empty()) throw EmptyExpansion("LowRankKernel: rank-0 kernel has no domain");
  return cols.front().domain();
}

const Interval& LowRankKernel::domain_t() const {
  if (rows.empty()) throw EmptyExpansion("LowRankKernel: rank-0 kernel has no domain");
  return rows.front().domain();
}

namespace {

// Residual of the kernel against the crosses accumulated so far.
struct Residual {
  const std::function<double(double, double)>& kernel;
  const std::vector<FuncApprox>& us;
  const std::vector<FuncApprox>& vs;
  const std::vector<double>& ds;

  double operator()(double s, double t) const {
    double acc = kernel(s, t);
    for (size_t p = 0; p < us.size(); ++p) acc -= us[p](s) * ds[p] * vs[p](t);
    return acc;
  }
};

void argmax_abs(const Eigen::MatrixXd& m, Eigen::Index& i, Eigen::Index& j) {
  m.cwiseAbs().maxCoeff(&i, &j);
}

}  // namespace

std::pair<LowRankKernel, PivotTrace> aca(
    const std::function<double(double, double)>& kernel, Interval domain_s,
    Interval domain_t, const AcaOptions& opt) {
  if (!(opt.tol > 0.0 && opt.tol < 1.0)) throw Error("aca: tol out of (0,1)");
  if (opt.max_rank < 1) throw Error("aca: max_rank must be >= 1");
  if (opt.grid < 9) throw Error("aca: grid too small");

  const std::vector<double> xs = cheb_points(opt.grid, domain_s);
  const std::vector<double> ts = cheb_points(opt.grid, domain_t);
  Eigen::MatrixXd R(opt.grid, opt.grid);
  for (int i = 0; i < opt.grid; ++i)
    for (int j = 0; j < opt.grid; ++j) {
      R(i, j) = kernel(xs[i], ts[j]);
      if (!std::isfinite(R(i, j))) throw NonFinite("aca: kernel returned a non-finite value");
    }

  std::vector<FuncApprox> us, vs;
  std::vector<double> ds;
  Residual res{kernel, us, vs, ds};
  PivotTrace trace;
  double first_mag = -1.0;

  const int fine = 513;
  const std::vector<double> xs_fine = cheb_points(fine, domain_s);
  const std::vector<double> ts_fine = cheb_points(fine, domain_t);
  // Cross values tabulated on the fine grids, so the pivot sweeps and the
  // residual slices cost one multiply per cross instead of one polynomial
  // evaluation per cross.
  std::vector<std::vector<double>> ucf, vcf;

  for (int step = 0; step <= opt.max_rank; ++step) {
    Eigen::Index gi, gj;
    argmax_abs(R, gi, gj);
    double x = xs[gi], y = ts[gj];
    int xi = 0, yi = 0;

    // Alternating 1D refinement around the coarse-grid maximizer.
    for (int sweep = 0; sweep < 3; ++sweep) {
      int xi_prev = xi, yi_prev = yi;
      std::vector<double> wy(us.size());
      for (size_t p = 0; p < us.size(); ++p)
        wy[p] = ds[p] * (sweep == 0 ? vs[p](y) : vcf[p][yi]);
      double best = -1.0;
      for (int i = 0; i < fine; ++i) {
        double v = kernel(xs_fine[i], y);
        for (size_t p = 0; p < us.size(); ++p) v -= ucf[p][i] * wy[p];
        if (std::abs(v) > best) { best = std::abs(v); xi = i; }
      }
      x = xs_fine[xi];
      std::vector<double> wx(us.size());
      for (size_t p = 0; p < us.size(); ++p) wx[p] = ds[p] * ucf[p][xi];
      best = -1.0;
      for (int j = 0; j < fine; ++j) {
        double v = kernel(x, ts_fine[j]);
        for (size_t p = 0; p < us.size(); ++p) v -= wx[p] * vcf[p][j];
        if (std::abs(v) > best) { best = std::abs(v); yi = j; }
      }
      y = ts_fine[yi];
      if (sweep > 0 && xi == xi_prev && yi == yi_prev) break;
    }

    double pval = kernel(x, y);
    for (size_t p = 0; p < us.size(); ++p) pval -= ucf[p][xi] * ds[p] * vcf[p][yi];
    double mag = std::abs(pval);
    trace.push_back({x, y, mag});

    if (first_mag < 0.0) {
      first_mag = mag;
      if (mag == 0.0) return {LowRankKernel{{}, Eigen::MatrixXd(0, 0), {}}, trace};
    }
    if (mag <= opt.tol * first_mag) {
      Eigen::MatrixXd D = Eigen::MatrixXd::Zero(us.size(), us.size());
      for (size_t p = 0; p < ds.size(); ++p) D(p, p) = ds[p];
      return {LowRankKernel{std::move(us), std::move(D), std::move(vs)}, trace};
    }
    if (step == opt.max_rank)
      throw RankOverflow("aca: max_rank reached before the pivot tolerance");

    funapprox::ApproxOptions slice_opt{
        .tol = 1e-14, .max_degree = 1 << 14, .abs_floor = opt.tol * first_mag / 1000.0};
    std::vector<double> wy(us.size()), wx(us.size());
    for (size_t p = 0; p < us.size(); ++p) {
      wy[p] = ds[p] * vcf[p][yi];
      wx[p] = ds[p] * ucf[p][xi];
    }
    // Slice values are assembled gridwise: fresh kernel samples (nested under
    // grid doubling) minus the accumulated crosses synthesized on the grid.
    std::vector<double> ku, kv;
    auto u_grid = [&](int n) {
      std::vector<double> xg = cheb_points(n, domain_s);
      std::vector<double> vals(n);
      if (ku.empty()) {
        for (int i = 0; i < n; ++i) vals[i] = kernel(xg[i], y);
      } else {
        for (size_t j = 0; j < ku.size(); ++j) vals[2 * j] = ku[j];
        for (int i = 1; i < n; i += 2) vals[i] = kernel(xg[i], y);
      }
      ku = vals;
      for (size_t p = 0; p < us.size(); ++p) {
        std::vector<double> ug = funapprox::coeffs_to_values(us[p].coeffs(), n);
        for (int i = 0; i < n; ++i) vals[i] -= ug[i] * wy[p];
      }
      return vals;
    };
    auto v_grid = [&](int n) {
      std::vector<double> tg = cheb_points(n, domain_t);
      std::vector<double> vals(n);
      if (kv.empty()) {
        for (int j = 0; j < n; ++j) vals[j] = kernel(x, tg[j]);
      } else {
        for (size_t j = 0; j < kv.size(); ++j) vals[2 * j] = kv[j];
        for (int j = 1; j < n; j += 2) vals[j] = kernel(x, tg[j]);
      }
      kv = vals;
      for (size_t p = 0; p < vs.size(); ++p) {
        std::vector<double> vg = funapprox::coeffs_to_values(vs[p].coeffs(), n);
        for (int j = 0; j < n; ++j) vals[j] -= vg[j] * wx[p];
      }
      return vals;
    };
    FuncApprox u = FuncApprox::approximate_grid(
        u_grid, [&](double s) { return res(s, y); }, domain_s, slice_opt);
    FuncApprox v = FuncApprox::approximate_grid(
        v_grid, [&](double t) { return res(x, t); }, domain_t, slice_opt);
    us.push_back(std::move(u));
    vs.push_back(std::move(v));
    ds.push_back(1.0 / pval);
    ucf.push_back(funapprox::coeffs_to_values(us.back().coeffs(), fine));
    vcf.push_back(funapprox::coeffs_to_values(vs.back().coeffs(), fine));

    const std::vector<double> ugc = funapprox::coeffs_to_values(us.back().coeffs(), opt.grid);
    const std::vector<double> vgc = funapprox::coeffs_to_values(vs.back().coeffs(), opt.grid);
    for (int i = 0; i < opt.grid; ++i) {
      double uval = ugc[i] / pval;
      for (int j = 0; j < opt.grid; ++j) R(i, j) -= uval * vgc[j];
    }
  }
  throw RankOverflow("aca: max_rank reached before the pivot tolerance");
}

double eval2(const LowRankKernel& K, double s, double t) {
  if (K.rank() == 0) return 0.0;
  Eigen::VectorXd c(K.rank()), r(K.rank());
  for (int p = 0; p < K.rank(); ++p) {
    c(p) = K.cols[p](s);
    r(p) = K.rows[p](t);
  }
  return c.dot(K.middle * r);
}

FuncApprox apply(const LowRankKernel& K, const FuncApprox& x) {
  if (K.rank() == 0) throw EmptyExpansion("apply: rank-0 kernel");
  if (!x.domain().same_as(K.domain_t()))
    throw DomainMismatch("apply: x must live on the kernel's t-domain");
  Eigen::VectorXd w(K.rank());
  for (int q = 0; q < K.rank(); ++q) w(q) = funapprox::inner(K.rows[q], x);
  Eigen::VectorXd coef = K.middle * w;
  std::vector<double> wts(coef.data(), coef.data() + coef.size());
  std::vector<const FuncApprox*> ptrs;
  for (const FuncApprox& c : K.cols) ptrs.push_back(&c);
  return funapprox::lincomb(wts, ptrs);
}

FuncApprox apply(const LowRankKernel& K, const funapprox::PiecewiseFunc& x) {
  if (K.rank() == 0) throw EmptyExpansion("apply: rank-0 kernel");
  if (!x.domain().same_as(K.domain_t()))
    throw DomainMismatch("apply: x must live on the kernel's t-domain");
  Eigen::VectorXd w(K.rank());
  for (int q = 0; q < K.rank(); ++q) w(q) = funapprox::inner(K.rows[q], x);
  Eigen::VectorXd coef = K.middle * w;
  std::vector<double> wts(coef.data(), coef.data() + coef.size());
  std::vector<const FuncApprox*> ptrs;
  for (const FuncApprox& c : K.cols) ptrs.push_back(&c);
  return funapprox::lincomb(wts, ptrs);
}

double norm(const LowRankKernel& K) {
  if (K.rank() == 0) return 0.0;
  const int k = K.rank();
  Eigen::MatrixXd Gc(k, k), Gr(k, k);
  for (int p = 0; p < k; ++p)
    for (int q = p; q < k; ++q) {
      Gc(p, q) = Gc(q, p) = funapprox::inner(K.cols[p], K.cols[q]);
      Gr(p, q) = Gr(q, p) = funapprox::inner(K.rows[p], K.rows[q]);
    }
  double val = (K.middle.transpose() * Gc * K.middle * Gr).trace();
  return std::sqrt(std::max(val, 0.0));
}

LowRankKernel add(const LowRankKernel& a, const LowRankKernel& b) {
  if (a.rank() == 0) return b;
  if (b.rank() == 0) return a;
  if (!a.domain_s().same_as(b.domain_s()) || !a.domain_t().same_as(b.domain_t()))
    throw DomainMismatch("add: kernel domains differ");
  LowRankKernel out;
  out.cols = a.cols;
  out.cols.insert(out.cols.end(), b.cols.begin(), b.cols.end());
  out.rows = a.rows;
  out.rows.insert(out.rows.end(), b.rows.begin(), b.rows.end());
  const int ka = a.rank(), kb = b.rank();
  out.middle = Eigen::MatrixXd::Zero(ka + kb, ka + kb);
  out.middle.topLeftCorner(ka, ka) = a.middle;
  out.middle.bottomRightCorner(kb, kb) = b.middle;
  return out;
}

LowRankKernel scale(double c, const LowRankKernel& K) {
  LowRankKernel out = K;
  out.middle *= c;
  return out;
}

}  // namespace fredsve::bivariate
