#ifndef USM_MANIFOLD_HPP
#define USM_MANIFOLD_HPP

#include <cstdint>
#include <utility>

#include "usm/linalg.hpp"
#include "usm/types.hpp"

namespace usm {

/// A point on U_s(n): U unitary symmetric with cached Takagi factor Q,
/// U = Q Q^T.
struct UsPoint {
  CMatrix u;
  CMatrix q;

  int n() const { return static_cast<int>(u.rows()); }

  /// Residual-checks the invariants (unitary, symmetric, Takagi consistency).
  bool valid(double tol_scale = 1.0) const;

  /// Reconstructs the Takagi factor from u and verifies it.
  static UsPoint from_unitary_symmetric(const CMatrix& u);
};

/// Tangent vector at a UsPoint, stored as the real symmetric matrix R with
/// ambient form B = j Q R Q^T.
struct TangentDirection {
  const UsPoint* base;
  RealSym r;

  CMatrix ambient() const;
  double norm() const { return r.norm(); }  // ||B||_F == ||R||_F
};

/// Geodesic through a base point: U(phi) = Q_R diag(e^{j phi_m}) Q_R^T.
struct GeodesicFrame {
  CMatrix q_r;         // base.q * V_R, unitary
  RealVector thetas;   // eigenvalues of R; phi = mu * thetas walks the geodesic
  CMatrix base_u;      // point at phi = 0
};

/// Takagi factorization a = q diag(sigma) q^T of a complex symmetric matrix;
/// sigma are the singular values of a, descending.
std::pair<CMatrix, RealVector> takagi(const CMatrix& a);

/// Frobenius-closest unitary symmetric matrix, via the Takagi factor.
/// If degenerate is non-null it is set when the smallest singular value is
/// below the degeneracy threshold (closest point not unique).
UsPoint retract(const CMatrix& a, bool* degenerate = nullptr);

/// Orthogonal projection of an ambient matrix onto the tangent space,
/// R = Imag(Q^H (J + J^T) Q^* / 2).
TangentDirection project_tangent(const UsPoint& base, const CMatrix& j_ambient);

GeodesicFrame geodesic_frame(const UsPoint& base, const TangentDirection& dir);

/// Point on the geodesic with per-axis phases; the Takagi factor is updated
/// with half phases so that Q Q^T = U holds by construction.
UsPoint geodesic_point(const GeodesicFrame& frame, const RealVector& phases);

/// Cayley map (I + jB)^{-1} (I - jB), computed through the eigendecomposition
/// of B; total on real symmetric matrices.
UsPoint cayley(const RealSym& b);

/// Inverse Cayley map; throws CayleySingular if u has an eigenvalue at -1.
RealSym cayley_inv(const UsPoint& u);

/// Decomposition u = V diag(e^{j theta}) V^T with V real orthogonal and
/// theta in (-pi, pi]; covers eigenvalues at -1.
std::pair<RealMatrix, RealVector> real_orth_decomp(const UsPoint& u);

/// Seeded random point: retract(H + H^T) with H i.i.d. CN(0,1).
UsPoint random_point(int n, uint64_t seed);

}  // namespace usm

#endif
