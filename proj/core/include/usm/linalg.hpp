#ifndef USM_LINALG_HPP
#define USM_LINALG_HPP

#include "usm/types.hpp"

namespace usm {

struct SvdResult {
  CMatrix u;      // left singular vectors, orthonormal columns
  RealVector s;   // singular values, descending
  CMatrix v;      // right singular vectors, A = u * diag(s) * v^H
};

struct SymEig {
  RealMatrix vectors;  // orthogonal, columns are eigenvectors
  RealVector values;   // descending
};

/// Thin SVD with a deterministic phase convention: each left singular vector
/// is rotated so that its largest-magnitude entry is real positive (ties by
/// lowest row index); the matching right vector gets the same rotation.
SvdResult svd(const CMatrix& a);

SymEig eig_real_sym(const RealSym& r);
SymEig eig_real_sym(const RealMatrix& r);

/// Diagonalizes a unitary symmetric matrix with a real orthogonal basis:
/// w = V diag(e^{j theta}) V^T, theta in (-pi, pi]. Works for any spectrum,
/// including eigenvalues at -1.
void real_orth_diagonalize(const CMatrix& w, RealMatrix& v_out, RealVector& thetas_out);

/// Principal square root of a unitary symmetric matrix: s*s = w with s
/// unitary symmetric and eigenphases in (-pi/2, pi/2].
CMatrix principal_sqrt_unitary_sym(const CMatrix& w);

/// Orthonormal basis of the column space of z, keeping singular directions
/// with sigma > tol * sigma_max.
CMatrix orthonormal_basis(const CMatrix& z, double tol);

}  // namespace usm

#endif
