#include "usm/linalg.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

namespace usm {

NumericPolicy& numeric_policy() {
  static NumericPolicy policy;
  return policy;
}

namespace {

// Rotates column k of u (and v) so the largest-magnitude entry of u.col(k)
// is real positive; ties broken by lowest row index.
void fix_column_phase(CMatrix& u, CMatrix& v, int k) {
  int best = 0;
  double best_mag = -1.0;
  for (int i = 0; i < u.rows(); ++i) {
    double mag = std::abs(u(i, k));
    if (mag > best_mag * (1.0 + 1e-14)) {
      best_mag = mag;
      best = i;
    }
  }
  if (best_mag <= 0.0) return;
  Complex ph = u(best, k) / best_mag;
  u.col(k) *= std::conj(ph);
  v.col(k) *= std::conj(ph);
}

}  // namespace

SvdResult svd(const CMatrix& a) {
  if (!is_finite(a)) throw InvalidInput("svd: non-finite input");
  Eigen::JacobiSVD<CMatrix> dec(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  SvdResult res;
  res.u = dec.matrixU();
  res.s = dec.singularValues();
  res.v = dec.matrixV();
  for (int k = 0; k < res.u.cols(); ++k) fix_column_phase(res.u, res.v, k);
  return res;
}

SymEig eig_real_sym(const RealMatrix& r) {
  if (!r.allFinite()) throw InvalidInput("eig_real_sym: non-finite input");
  if (r.rows() != r.cols()) throw DimensionError("eig_real_sym: not square");
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(r);
  const int n = static_cast<int>(r.rows());
  SymEig out;
  out.vectors.resize(n, n);
  out.values.resize(n);
  // Eigen returns ascending order; flip to descending.
  for (int k = 0; k < n; ++k) {
    out.values(k) = es.eigenvalues()(n - 1 - k);
    out.vectors.col(k) = es.eigenvectors().col(n - 1 - k);
    // Deterministic sign: largest-|entry| positive.
    int best = 0;
    double best_mag = -1.0;
    for (int i = 0; i < n; ++i) {
      double mag = std::abs(out.vectors(i, k));
      if (mag > best_mag * (1.0 + 1e-14)) {
        best_mag = mag;
        best = i;
      }
    }
    if (out.vectors(best, k) < 0.0) out.vectors.col(k) = -out.vectors.col(k);
  }
  return out;
}

SymEig eig_real_sym(const RealSym& r) {
  if (!r.all_finite()) throw InvalidInput("eig_real_sym: non-finite input");
  return eig_real_sym(r.full());
}

void real_orth_diagonalize(const CMatrix& w, RealMatrix& v_out,
                           RealVector& thetas_out) {
  const int n = static_cast<int>(w.rows());
  RealMatrix wr = 0.5 * (w.real() + w.real().transpose());
  RealMatrix wi = 0.5 * (w.imag() + w.imag().transpose());

  // Re(w) and Im(w) commute for unitary symmetric w: diagonalize Re(w),
  // then diagonalize Im(w) inside each eigenvalue cluster.
  SymEig er = eig_real_sym(wr);
  RealMatrix v = er.vectors;
  double scale = er.values.size() ? std::max(std::abs(er.values(0)),
                                             std::abs(er.values(er.values.size() - 1)))
                                  : 0.0;
  double thr = numeric_policy().cluster_tol * std::max(1.0, scale);

  int i0 = 0;
  while (i0 < n) {
    int i1 = i0 + 1;
    while (i1 < n && std::abs(er.values(i1) - er.values(i0)) <= thr) ++i1;
    if (i1 - i0 > 1) {
      RealMatrix sub = v.middleCols(i0, i1 - i0).transpose() * wi *
                       v.middleCols(i0, i1 - i0);
      SymEig es = eig_real_sym(RealMatrix(0.5 * (sub + sub.transpose())));
      v.middleCols(i0, i1 - i0) = v.middleCols(i0, i1 - i0) * es.vectors;
    }
    i0 = i1;
  }

  thetas_out.resize(n);
  for (int k = 0; k < n; ++k) {
    double c = v.col(k).dot(wr * v.col(k));
    double s = v.col(k).dot(wi * v.col(k));
    double th = std::atan2(s, c);
    if (th <= -M_PI + 0.0) th = M_PI;  // angle convention (-pi, pi]
    thetas_out(k) = th;
  }
  v_out = std::move(v);
}

CMatrix principal_sqrt_unitary_sym(const CMatrix& w) {
  const int n = static_cast<int>(w.rows());
  if (w.rows() != w.cols()) throw DimensionError("principal_sqrt: not square");
  double tol = numeric_policy().symmetry_tol * n;
  if ((w * w.adjoint() - CMatrix::Identity(n, n)).norm() > tol)
    throw NotUnitarySymmetric("principal_sqrt: input not unitary");
  if ((w - w.transpose()).norm() > tol)
    throw NotUnitarySymmetric("principal_sqrt: input not symmetric");

  RealMatrix v;
  RealVector thetas;
  real_orth_diagonalize(w, v, thetas);
  CMatrix s = CMatrix::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    Complex half = std::polar(1.0, 0.5 * thetas(k));  // phase in (-pi/2, pi/2]
    s += half * (v.col(k) * v.col(k).transpose()).cast<Complex>();
  }
  return s;
}

CMatrix orthonormal_basis(const CMatrix& z, double tol) {
  if (!is_finite(z)) throw InvalidInput("orthonormal_basis: non-finite input");
  SvdResult dec = svd(z);
  double smax = dec.s.size() ? dec.s(0) : 0.0;
  int rank = 0;
  for (int k = 0; k < dec.s.size(); ++k)
    if (dec.s(k) > tol * smax) ++rank;
  return dec.u.leftCols(rank);
}

}  // namespace usm
