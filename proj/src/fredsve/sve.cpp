#include "sve.hpp"

#include <algorithm>
#include <cmath>

namespace fredsve::sve {

using funapprox::cc_weights;
using funapprox::coeffs_to_values;
using funapprox::values_to_coeffs;

QrResult qr_quasimatrix(const std::vector<FuncApprox>& fs) {
  if (fs.empty()) throw Error("qr_quasimatrix: no columns");
  const Interval dom = fs.front().domain();
  int maxdeg = 0;
  for (const FuncApprox& f : fs) {
    if (!f.domain().same_as(dom)) throw DomainMismatch("qr_quasimatrix: domains differ");
    maxdeg = std::max(maxdeg, f.degree());
  }
  // Grid size from the sampling ladder, fine enough that products of two
  // columns are integrated exactly by the Clenshaw-Curtis weights.
  int n = 9;
  while (n < 2 * maxdeg + 2) n = 2 * n - 1;

  const int k = static_cast<int>(fs.size());
  Eigen::MatrixXd V(n, k);
  for (int j = 0; j < k; ++j) {
    std::vector<double> vals = coeffs_to_values(fs[j].coeffs(), n);
    for (int i = 0; i < n; ++i) V(i, j) = vals[i];
  }
  std::vector<double> wv = cc_weights(n);
  Eigen::VectorXd w = Eigen::Map<Eigen::VectorXd>(wv.data(), n) * (0.5 * dom.length());

  auto wdot = [&](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    return (w.array() * a.array() * b.array()).sum();
  };

  QrResult out;
  Eigen::MatrixXd Q(n, k);
  std::vector<std::vector<double>> rcols;  // column j of R, over retained rows
  int m = 0;  // retained columns so far
  double max_diag = 0.0;
  for (int j = 0; j < k; ++j) {
    Eigen::VectorXd v = V.col(j);
    std::vector<double> rj(m, 0.0);
    for (int pass = 0; pass < 2; ++pass)
      for (int i = 0; i < m; ++i) {
        double s = wdot(Q.col(i), v);
        v -= s * Q.col(i);
        rj[i] += s;
      }
    double rjj = std::sqrt(std::max(wdot(v, v), 0.0));
    if (rjj <= 1e-14 * max_diag || rjj == 0.0) {
      out.dropped.push_back(j);
      rj.push_back(0.0);
      rcols.push_back(std::move(rj));
      continue;
    }
    max_diag = std::max(max_diag, rjj);
    Q.col(m) = v / rjj;
    rj.push_back(rjj);
    rcols.push_back(std::move(rj));
    ++m;
  }
  if (m == 0) throw Error("qr_quasimatrix: all columns numerically zero");

  out.r = Eigen::MatrixXd::Zero(m, k);
  for (int j = 0; j < k; ++j)
    for (size_t i = 0; i < rcols[j].size() && i < static_cast<size_t>(m); ++i)
      out.r(i, j) = rcols[j][i];

  for (int i = 0; i < m; ++i) {
    std::vector<double> vals(Q.col(i).data(), Q.col(i).data() + n);
    out.q.push_back(FuncApprox::from_values(vals, dom, 1e-15));
  }
  return out;
}

namespace {

// Flip the sign pair so phi is positive where it is largest in magnitude on
// its own Chebyshev grid.
void fix_sign(FuncApprox& phi, FuncApprox& psi) {
  int n = std::max(phi.degree() + 1, 2);
  std::vector<double> vals = coeffs_to_values(phi.coeffs(), n);
  double best = 0.0;
  for (double v : vals)
    if (std::abs(v) > std::abs(best)) best = v;
  if (best < 0.0) {
    phi = funapprox::scale(-1.0, phi);
    psi = funapprox::scale(-1.0, psi);
  }
}

}  // namespace

SveExpansion sve_from_lowrank(const LowRankKernel& K, double cutoff_eps) {
  if (K.rank() == 0) throw EmptyExpansion("sve_from_lowrank: rank-0 kernel");
  if (!(cutoff_eps >= 0.0 && cutoff_eps < 1.0))
    throw Error("sve_from_lowrank: cutoff_eps out of [0,1)");

  QrResult qc = qr_quasimatrix(K.cols);
  QrResult qr = qr_quasimatrix(K.rows);
  Eigen::MatrixXd folded = qc.r * K.middle * qr.r.transpose();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(folded, Eigen::ComputeThinU | Eigen::ComputeThinV);

  const Eigen::VectorXd& sig = svd.singularValues();
  if (sig.size() == 0 || sig(0) <= 0.0)
    throw EmptyExpansion("sve_from_lowrank: kernel is numerically zero");

  SveExpansion S;
  S.cutoff_eps = cutoff_eps;
  std::vector<const FuncApprox*> qc_ptrs, qr_ptrs;
  for (const FuncApprox& f : qc.q) qc_ptrs.push_back(&f);
  for (const FuncApprox& f : qr.q) qr_ptrs.push_back(&f);
  for (int i = 0; i < sig.size(); ++i) {
    if (sig(i) <= cutoff_eps * sig(0) || sig(i) <= 0.0) break;
    Eigen::VectorXd ui = svd.matrixU().col(i);
    Eigen::VectorXd vi = svd.matrixV().col(i);
    FuncApprox phi = funapprox::lincomb(
        std::vector<double>(ui.data(), ui.data() + ui.size()), qc_ptrs);
    FuncApprox psi = funapprox::lincomb(
        std::vector<double>(vi.data(), vi.data() + vi.size()), qr_ptrs);
    fix_sign(phi, psi);
    S.sigmas.push_back(sig(i));
    S.phis.push_back(std::move(phi));
    S.psis.push_back(std::move(psi));
  }
  if (S.sigmas.empty()) throw EmptyExpansion("sve_from_lowrank: nothing above cutoff");
  return S;
}

LowRankKernel reconstruct(const SveExpansion& S, int ell) {
  if (ell < 1 || ell > S.rank()) throw OutOfRange("reconstruct: ell outside [1, rank]");
  LowRankKernel K;
  K.cols.assign(S.phis.begin(), S.phis.begin() + ell);
  K.rows.assign(S.psis.begin(), S.psis.begin() + ell);
  K.middle = Eigen::MatrixXd::Zero(ell, ell);
  for (int i = 0; i < ell; ++i) K.middle(i, i) = S.sigmas[i];
  return K;
}

}  // namespace fredsve::sve
