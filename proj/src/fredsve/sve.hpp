#pragma once

#include <vector>

#include "bivariate.hpp"

namespace fredsve::sve {

using bivariate::LowRankKernel;
using funapprox::FuncApprox;
using funapprox::Interval;

struct QrResult {
  std::vector<FuncApprox> q;  // orthonormal columns
  Eigen::MatrixXd r;          // q.size() x fs.size(), upper-trapezoidal, diag >= 0
  std::vector<int> dropped;   // indices of input columns found numerically dependent
};

// Continuous QR of a list of functions sharing one domain: modified
// Gram-Schmidt with one full reorthogonalization pass, carried out on a
// Clenshaw-Curtis grid fine enough to make all inner products exact.
// A column whose residual diagonal falls below 1e-14 x (largest diagonal so
// far) is dropped and its index recorded.
QrResult qr_quasimatrix(const std::vector<FuncApprox>& fs);

struct SveExpansion {
  std::vector<double> sigmas;   // positive, non-increasing
  std::vector<FuncApprox> phis; // left singular functions, on the s-domain
  std::vector<FuncApprox> psis; // right singular functions, on the t-domain
  double cutoff_eps;

  int rank() const { return static_cast<int>(sigmas.size()); }
};

// Singular value expansion of a separated kernel: QR of both quasimatrices,
// dense SVD of the folded middle matrix, singular values below
// cutoff_eps * sigma_1 discarded. Each phi_i is normalized to be positive at
// its own maximum-magnitude Chebyshev grid point; psi_i absorbs the sign.
SveExpansion sve_from_lowrank(const LowRankKernel& K, double cutoff_eps = 1e-10);

// Rank-ell partial sum as a separated kernel (1 <= ell <= rank).
LowRankKernel reconstruct(const SveExpansion& S, int ell);

}  // namespace fredsve::sve
