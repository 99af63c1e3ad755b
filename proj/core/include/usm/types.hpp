#ifndef USM_TYPES_HPP
#define USM_TYPES_HPP

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "usm/errors.hpp"

namespace usm {

using CMatrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using Complex = std::complex<double>;

/// Tolerances shared across the library. Defaults are 1e-10 scaled by
/// dimension where a check is dimension-dependent.
struct NumericPolicy {
  double base_tol = 1e-10;
  double symmetry_tol = 1e-8;
  double unitary_tol = 1e-9;
  double takagi_tol = 1e-8;
  double rank_tol = 1e-10;           // relative to largest singular value
  double cluster_tol = 1e-8;         // eigenvalue clustering, relative
  double cayley_singular_tol = 1e-8; // distance of eigenvalue to -1
  double degenerate_retraction_tol = 1e-12;
};

NumericPolicy& numeric_policy();

inline bool is_finite(const CMatrix& a) { return a.allFinite(); }

/// Real symmetric matrix; only the lower triangle is stored, so reads of
/// (i,j) and (j,i) always agree exactly.
class RealSym {
 public:
  RealSym() : n_(0) {}
  explicit RealSym(int n) : n_(n), tri_(static_cast<size_t>(n) * (n + 1) / 2, 0.0) {
    if (n < 1) throw InvalidInput("RealSym: dimension must be positive");
  }

  /// Builds from the lower triangle of m (upper triangle ignored).
  static RealSym from_lower(const RealMatrix& m) {
    if (m.rows() != m.cols()) throw DimensionError("RealSym: matrix not square");
    RealSym r(static_cast<int>(m.rows()));
    for (int i = 0; i < r.n_; ++i)
      for (int j = 0; j <= i; ++j) r.set(i, j, m(i, j));
    return r;
  }

  /// Builds from (m + m^T)/2.
  static RealSym symmetrize(const RealMatrix& m) {
    if (m.rows() != m.cols()) throw DimensionError("RealSym: matrix not square");
    RealSym r(static_cast<int>(m.rows()));
    for (int i = 0; i < r.n_; ++i)
      for (int j = 0; j <= i; ++j) r.set(i, j, 0.5 * (m(i, j) + m(j, i)));
    return r;
  }

  int n() const { return n_; }

  double operator()(int i, int j) const {
    return i >= j ? tri_[idx(i, j)] : tri_[idx(j, i)];
  }

  void set(int i, int j, double v) {
    if (i >= j)
      tri_[idx(i, j)] = v;
    else
      tri_[idx(j, i)] = v;
  }

  RealMatrix full() const {
    RealMatrix m(n_, n_);
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) m(i, j) = (*this)(i, j);
    return m;
  }

  double norm() const { return full().norm(); }

  bool all_finite() const {
    for (double v : tri_)
      if (!std::isfinite(v)) return false;
    return true;
  }

 private:
  size_t idx(int i, int j) const {
    return static_cast<size_t>(i) * (i + 1) / 2 + j;
  }
  int n_;
  std::vector<double> tri_;
};

}  // namespace usm

#endif
