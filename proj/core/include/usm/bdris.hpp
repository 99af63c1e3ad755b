#ifndef USM_BDRIS_HPP
#define USM_BDRIS_HPP

#include <memory>

#include "usm/channel.hpp"
#include "usm/optim.hpp"

namespace usm {

/// Restriction of the scattering optimization to the r = N_t + N_r
/// dimensional subspace spanned by the channels.
struct LowRankReduction {
  CMatrix u_z;      // M x r orthonormal basis of span([F^H | G^T])
  CMatrix f_tilde;  // F * U_Z
  CMatrix g_tilde;  // G * conj(U_Z)
  int r = 0;
};

LowRankReduction low_rank_reduce(const MimoChannel& ch);

/// Lifts an r x r symmetric block back to the M x M low-rank scattering
/// matrix U_Z theta_tilde U_Z^T.
CMatrix lift(const CMatrix& theta_tilde, const LowRankReduction& red);

/// Completes a semi-unitary M x r factor to the full-rank unitary symmetric
/// matrix Q Q^T + Q_perp Q_perp^T.
UsPoint complete_full_rank(const CMatrix& q);

/// Reduced channel seen by the low-rank optimizer: same direct link, tilde
/// channels in place of F and G.
MimoChannel reduced_channel(const MimoChannel& ch, const LowRankReduction& red);

// Cost factories. Each returned object is self-contained (owns copies of the
// channel matrices) and safe to share across threads.

/// Sum channel gain ||H_d + F Theta G^H||_F^2, with the closed-form
/// per-phase update.
std::unique_ptr<CostFunction> sumgain_cost(const MimoChannel& ch);

/// Achievable rate log2 det(I + (P/sigma^2) H_eq H_eq^H) in bits, with the
/// closed-form per-phase update. The SNR factor is absorbed into the channel.
std::unique_ptr<CostFunction> rate_cost(const MimoChannel& ch);

/// MSE tr(E^{-1}); a minimization cost with no closed-form phase update.
std::unique_ptr<CostFunction> mse_cost(const MimoChannel& ch);

/// Matched-filter baseline retract(F^H H_d G + (F^H H_d G)^T); throws
/// DegenerateBaseline when the direct link is absent.
UsPoint low_cost_baseline(const MimoChannel& ch);

}  // namespace usm

#endif
