#include "chebfun.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "gauss.hpp"

namespace fredsve::funapprox {

namespace {

constexpr double kPi = std::numbers::pi;

// Chop a coefficient vector in place at threshold `thresh`, keeping at least
// one coefficient.
void chop_at(std::vector<double>& c, double thresh) {
  size_t keep = 1;
  for (size_t k = c.size(); k-- > 1;) {
    if (std::abs(c[k]) > thresh) {
      keep = k + 1;
      break;
    }
  }
  c.resize(keep);
}

// DCT-I of length n (REDFT00): out_k = in_0 + (-1)^k in_{n-1}
//                                     + 2 sum_{j=1}^{n-2} in_j cos(pi j k / (n-1)).
// Plans are cached per length; FFTW planning and execution are serialized.
void dct1(const double* in, double* out, int n) {
  static std::map<int, fftw_plan> plans;
  static std::mutex mtx;
  std::lock_guard<std::mutex> lock(mtx);
  auto it = plans.find(n);
  if (it == plans.end()) {
    std::vector<double> a(n), b(n);
    fftw_plan p = fftw_plan_r2r_1d(n, a.data(), b.data(), FFTW_REDFT00,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
    it = plans.emplace(n, p).first;
  }
  fftw_execute_r2r(it->second, const_cast<double*>(in), out);
}

constexpr int kFftCutover = 129;  // below this, direct O(n^2) loops win

}  // namespace

std::vector<double> cheb_points(int n, const Interval& domain) {
  std::vector<double> x(n);
  const int N = n - 1;
  for (int j = 0; j <= N; ++j) x[j] = domain.from_unit(std::cos(kPi * j / N));
  return x;
}

std::vector<double> values_to_coeffs(const std::vector<double>& values) {
  const int n = static_cast<int>(values.size());
  if (n == 1) return values;
  const int N = n - 1;
  std::vector<double> c(n);
  if (n >= kFftCutover) {
    dct1(values.data(), c.data(), n);
    for (int k = 0; k <= N; ++k) {
      double fk = (k == 0 || k == N) ? 0.5 : 1.0;
      c[k] *= fk / N;
    }
    return c;
  }
  for (int k = 0; k <= N; ++k) {
    double acc = 0.5 * values[0];
    for (int j = 1; j < N; ++j) acc += values[j] * std::cos(kPi * k * j / N);
    acc += 0.5 * ((k % 2 == 0) ? values[N] : -values[N]);
    double fk = (k == 0 || k == N) ? 0.5 : 1.0;
    c[k] = 2.0 / N * fk * acc;
  }
  return c;
}

std::vector<double> coeffs_to_values(const std::vector<double>& coeffs, int n) {
  const int N = n - 1;
  if (n >= kFftCutover) {
    // Fold coefficients beyond degree N back onto the grid's alias classes,
    // then synthesize with a DCT-I.
    std::vector<double> folded(n, 0.0);
    for (size_t k = 0; k < coeffs.size(); ++k) {
      int r = static_cast<int>(k) % (2 * N);
      int m = (r <= N) ? r : 2 * N - r;
      folded[m] += coeffs[k];
    }
    std::vector<double> in(n);
    in[0] = folded[0];
    in[N] = folded[N];
    for (int k = 1; k < N; ++k) in[k] = 0.5 * folded[k];
    std::vector<double> v(n);
    dct1(in.data(), v.data(), n);
    return v;
  }
  std::vector<double> v(n, 0.0);
  for (int j = 0; j <= N; ++j) {
    double acc = 0.0;
    for (size_t k = 0; k < coeffs.size(); ++k)
      acc += coeffs[k] * std::cos(kPi * static_cast<double>(k) * j / N);
    v[j] = acc;
  }
  return v;
}

std::vector<double> cc_weights(int n) {
  const int N = n - 1;
  std::vector<double> w(n);
  for (int j = 0; j <= N; ++j) {
    double acc = 0.0;
    for (int k = 0; k <= N; k += 2) {
      double fk = (k == 0 || k == N) ? 0.5 : 1.0;
      acc += fk * 2.0 / (1.0 - k * k) * std::cos(kPi * k * j / N);
    }
    double ej = (j == 0 || j == N) ? 0.5 : 1.0;
    w[j] = 2.0 / N * ej * acc;
  }
  return w;
}

FuncApprox::FuncApprox(std::vector<double> coeffs, Interval domain)
    : coeffs_(std::move(coeffs)), domain_(domain) {
  if (coeffs_.empty()) throw Error("FuncApprox: empty coefficient vector");
  for (double c : coeffs_)
    if (!std::isfinite(c)) throw NonFinite("FuncApprox: non-finite coefficient");
}

FuncApprox FuncApprox::approximate_grid(
    const std::function<std::vector<double>(int)>& values_on_grid,
    const std::function<double(double)>& probe_eval, Interval domain,
    ApproxOptions opt) {
  if (!(opt.tol > 0.0 && opt.tol < 1.0)) throw Error("approximate: tol out of (0,1)");
  for (int n = 9; n <= opt.max_degree + 1; n = 2 * n - 1) {
    std::vector<double> values = values_on_grid(n);
    if (static_cast<int>(values.size()) != n)
      throw Error("approximate: grid evaluator returned the wrong count");
    for (double val : values)
      if (!std::isfinite(val)) throw NonFinite("approximate: f returned a non-finite value");

    std::vector<double> c = values_to_coeffs(values);
    double maxc = 0.0;
    for (double ck : c) maxc = std::max(maxc, std::abs(ck));
    if (maxc == 0.0) return FuncApprox({0.0}, domain);
    double thresh = std::max(opt.tol * maxc, opt.abs_floor);
    bool tail_ok = true;
    for (size_t k = c.size() - 3; k < c.size(); ++k)
      if (std::abs(c[k]) > thresh) tail_ok = false;
    if (tail_ok) {
      chop_at(c, thresh);
      FuncApprox cand(std::move(c), domain);
      // Guard against grid aliasing: a tail that vanishes on the sample grid
      // must also match the function off-grid before we accept it.
      bool probe_ok = true;
      for (double u : {-0.35614593, 0.48719013}) {
        double t = domain.from_unit(u);
        if (!(std::abs(probe_eval(t) - cand(t)) <= 1e3 * thresh)) probe_ok = false;
      }
      if (probe_ok) return cand;
    }
  }
  throw NonConvergence("approximate: max_degree reached without coefficient decay");
}

FuncApprox FuncApprox::approximate(const std::function<double(double)>& f,
                                   Interval domain, ApproxOptions opt) {
  std::vector<double> values;
  auto on_grid = [&](int n) {
    std::vector<double> x = cheb_points(n, domain);
    std::vector<double> v(n);
    if (values.empty()) {
      for (int j = 0; j < n; ++j) v[j] = f(x[j]);
    } else {
      // Second-kind points nest under doubling: old node j is new node 2j.
      for (size_t j = 0; j < values.size(); ++j) v[2 * j] = values[j];
      for (int j = 1; j < n; j += 2) v[j] = f(x[j]);
    }
    values = v;
    return v;
  };
  return approximate_grid(on_grid, f, domain, opt);
}

FuncApprox FuncApprox::from_values(const std::vector<double>& values, Interval domain,
                                   double chop_tol, double abs_floor) {
  std::vector<double> c = values_to_coeffs(values);
  double maxc = 0.0;
  for (double ck : c) maxc = std::max(maxc, std::abs(ck));
  double thresh = std::max(chop_tol * maxc, abs_floor);
  if (thresh > 0.0 && maxc > 0.0) chop_at(c, thresh);
  if (maxc == 0.0) c.assign(1, 0.0);
  return FuncApprox(std::move(c), domain);
}

double FuncApprox::operator()(double t) const {
  if (!domain_.contains(t)) throw OutOfDomain("FuncApprox: evaluation outside domain");
  double u = std::clamp(domain_.to_unit(t), -1.0, 1.0);
  // Clenshaw recurrence.
  double b1 = 0.0, b2 = 0.0;
  for (size_t k = coeffs_.size(); k-- > 1;) {
    double b0 = 2.0 * u * b1 - b2 + coeffs_[k];
    b2 = b1;
    b1 = b0;
  }
  return u * b1 - b2 + coeffs_[0];
}

double FuncApprox::max_abs_coeff() const {
  double m = 0.0;
  for (double c : coeffs_) m = std::max(m, std::abs(c));
  return m;
}

double integrate(const FuncApprox& f) {
  const std::vector<double>& c = f.coeffs();
  double acc = 0.0;
  for (size_t k = 0; k < c.size(); k += 2) acc += c[k] * 2.0 / (1.0 - static_cast<double>(k) * k);
  return acc * 0.5 * f.domain().length();
}

double inner(const FuncApprox& a, const FuncApprox& b) {
  if (!a.domain().same_as(b.domain())) throw DomainMismatch("inner: domains differ");
  int m = std::max(a.degree() + b.degree() + 1, 2);
  std::vector<double> va = coeffs_to_values(a.coeffs(), m);
  std::vector<double> vb = coeffs_to_values(b.coeffs(), m);
  for (int j = 0; j < m; ++j) va[j] *= vb[j];
  FuncApprox prod(values_to_coeffs(va), a.domain());
  return integrate(prod);
}

double norm(const FuncApprox& f) { return std::sqrt(std::max(inner(f, f), 0.0)); }

FuncApprox lincomb(const std::vector<double>& w, const std::vector<const FuncApprox*>& fs) {
  if (w.size() != fs.size() || fs.empty()) throw Error("lincomb: size mismatch");
  const Interval dom = fs[0]->domain();
  size_t len = 1;
  for (const FuncApprox* f : fs) {
    if (!f->domain().same_as(dom)) throw DomainMismatch("lincomb: domains differ");
    len = std::max(len, f->coeffs().size());
  }
  std::vector<double> c(len, 0.0);
  for (size_t i = 0; i < fs.size(); ++i) {
    const std::vector<double>& ci = fs[i]->coeffs();
    for (size_t k = 0; k < ci.size(); ++k) c[k] += w[i] * ci[k];
  }
  while (c.size() > 1 && c.back() == 0.0) c.pop_back();
  return FuncApprox(std::move(c), dom);
}

FuncApprox add(const FuncApprox& a, const FuncApprox& b) { return lincomb({1.0, 1.0}, {&a, &b}); }
FuncApprox sub(const FuncApprox& a, const FuncApprox& b) { return lincomb({1.0, -1.0}, {&a, &b}); }
FuncApprox scale(double c, const FuncApprox& f) { return lincomb({c}, {&f}); }

FuncApprox multiply(const FuncApprox& a, const FuncApprox& b) {
  if (!a.domain().same_as(b.domain())) throw DomainMismatch("multiply: domains differ");
  int m = std::max(a.degree() + b.degree() + 1, 2);
  std::vector<double> va = coeffs_to_values(a.coeffs(), m);
  std::vector<double> vb = coeffs_to_values(b.coeffs(), m);
  for (int j = 0; j < m; ++j) va[j] *= vb[j];
  return FuncApprox(values_to_coeffs(va), a.domain());
}

PiecewiseFunc::PiecewiseFunc(std::vector<std::pair<Interval, FuncApprox>> pieces)
    : pieces_(std::move(pieces)) {
  if (pieces_.empty()) throw Error("PiecewiseFunc: no pieces");
  for (size_t i = 0; i + 1 < pieces_.size(); ++i) {
    double gap = std::abs(pieces_[i + 1].first.lo - pieces_[i].first.hi);
    if (gap > pieces_[i].first.slack())
      throw Error("PiecewiseFunc: pieces must abut");
  }
}

PiecewiseFunc PiecewiseFunc::single(FuncApprox f) {
  Interval dom = f.domain();
  std::vector<std::pair<Interval, FuncApprox>> p;
  p.emplace_back(dom, std::move(f));
  return PiecewiseFunc(std::move(p));
}

PiecewiseFunc PiecewiseFunc::indicator(const Interval& domain, double a, double b,
                                       double height) {
  if (!(domain.lo <= a && a < b && b <= domain.hi))
    throw Error("indicator: breakpoints outside domain");
  std::vector<std::pair<Interval, FuncApprox>> p;
  auto flat = [](const Interval& iv, double v) {
    return std::make_pair(iv, FuncApprox({v}, iv));
  };
  if (a > domain.lo) p.push_back(flat(Interval(domain.lo, a), 0.0));
  p.push_back(flat(Interval(a, b), height));
  if (b < domain.hi) p.push_back(flat(Interval(b, domain.hi), 0.0));
  return PiecewiseFunc(std::move(p));
}

double PiecewiseFunc::operator()(double t) const {
  for (const auto& [iv, fn] : pieces_)
    if (iv.contains(t)) return fn(t);
  throw OutOfDomain("PiecewiseFunc: evaluation outside domain");
}

Interval PiecewiseFunc::domain() const {
  return Interval(pieces_.front().first.lo, pieces_.back().first.hi);
}

double norm(const PiecewiseFunc& f) {
  double acc = 0.0;
  for (const auto& [iv, fn] : f.pieces()) {
    double n = norm(fn);
    acc += n * n;
  }
  return std::sqrt(acc);
}

double inner(const FuncApprox& f, const PiecewiseFunc& g) {
  if (!f.domain().same_as(g.domain())) throw DomainMismatch("inner: domains differ");
  double acc = 0.0;
  for (const auto& [iv, gp] : g.pieces()) {
    int q = (f.degree() + gp.degree()) / 2 + 1;
    const quad::GaussRule& rule = quad::gauss_legendre(q);
    double part = 0.0;
    for (int i = 0; i < q; ++i) {
      double t = iv.from_unit(rule.nodes[i]);
      part += rule.weights[i] * f(t) * gp(t);
    }
    acc += part * 0.5 * iv.length();
  }
  return acc;
}

double dist(const FuncApprox& f, const PiecewiseFunc& g) {
  if (!f.domain().same_as(g.domain())) throw DomainMismatch("dist: domains differ");
  double acc = 0.0;
  for (const auto& [iv, gp] : g.pieces()) {
    int q = std::max(f.degree(), gp.degree()) + 1;
    const quad::GaussRule& rule = quad::gauss_legendre(std::max(q, 2));
    double part = 0.0;
    for (size_t i = 0; i < rule.nodes.size(); ++i) {
      double t = iv.from_unit(rule.nodes[i]);
      double d = f(t) - gp(t);
      part += rule.weights[i] * d * d;
    }
    acc += part * 0.5 * iv.length();
  }
  return std::sqrt(acc);
}

}  // namespace fredsve::funapprox
