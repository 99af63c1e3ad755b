#include "usm/bdris.hpp"

#include <cmath>

namespace usm {

namespace {

const Complex kJ(0.0, 1.0);

// Diagonal with the given phases and the m-th coefficient zeroed, as in the
// per-phase split of the equivalent channel.
Eigen::VectorXcd phase_diag_without(const RealVector& phases, int m) {
  Eigen::VectorXcd d(phases.size());
  for (int k = 0; k < phases.size(); ++k)
    d(k) = k == m ? Complex(0.0, 0.0) : std::polar(1.0, phases(k));
  return d;
}

class SumGainCost final : public CostFunction {
 public:
  explicit SumGainCost(const MimoChannel& ch)
      : hd_(ch.h_d), f_(ch.f), g_(ch.g) {}

  double value_at(const CMatrix& theta) const override {
    return (hd_ + f_ * theta * g_.adjoint()).squaredNorm();
  }

  CMatrix euclid_grad_at(const CMatrix& theta) const override {
    return 2.0 * f_.adjoint() * (hd_ + f_ * theta * g_.adjoint()) * g_;
  }

  std::optional<double> phase_update(int m, const GeodesicFrame& frame,
                                     const RealVector& phases) const override {
    CMatrix fq = f_ * frame.q_r;
    CMatrix gq = g_ * frame.q_r.conjugate();
    CMatrix s = hd_ + fq * phase_diag_without(phases, m).asDiagonal() * gq.adjoint();
    Complex inner = gq.col(m).adjoint() * s.adjoint() * fq.col(m);
    if (std::abs(inner) == 0.0) return phases(m);
    return -std::arg(inner);
  }

 private:
  CMatrix hd_, f_, g_;
};

// Rate and MSE share the scaled-channel convention: sqrt(P/sigma^2) is
// absorbed into H_d and F so that E = I + H H^H holds with unit noise.
class ScaledChannelCost : public CostFunction {
 public:
  ScaledChannelCost(const MimoChannel& ch)
      : hd_(std::sqrt(ch.snr_linear) * ch.h_d),
        f_(std::sqrt(ch.snr_linear) * ch.f),
        g_(ch.g),
        n_r_(ch.n_r()) {
    if (ch.snr_linear <= 0) throw InvalidInput("cost: snr must be positive");
  }

 protected:
  CMatrix heq_scaled(const CMatrix& theta) const {
    return hd_ + f_ * theta * g_.adjoint();
  }
  CMatrix e_matrix(const CMatrix& h) const {
    return CMatrix::Identity(n_r_, n_r_) + h * h.adjoint();
  }
  CMatrix hd_, f_, g_;
  int n_r_;
};

class RateCost final : public ScaledChannelCost {
 public:
  using ScaledChannelCost::ScaledChannelCost;

  double value_at(const CMatrix& theta) const override {
    Eigen::LLT<CMatrix> llt(e_matrix(heq_scaled(theta)));
    double logdet = 0.0;
    for (int k = 0; k < n_r_; ++k)
      logdet += 2.0 * std::log(llt.matrixL()(k, k).real());
    return logdet / std::log(2.0);
  }

  CMatrix euclid_grad_at(const CMatrix& theta) const override {
    CMatrix h = heq_scaled(theta);
    CMatrix e = e_matrix(h);
    return (2.0 / std::log(2.0)) * f_.adjoint() * e.llt().solve(h) * g_;
  }

  std::optional<double> phase_update(int m, const GeodesicFrame& frame,
                                     const RealVector& phases) const override {
    CMatrix fq = f_ * frame.q_r;
    CMatrix gq = g_ * frame.q_r.conjugate();
    CMatrix s = hd_ + fq * phase_diag_without(phases, m).asDiagonal() * gq.adjoint();
    double gn2 = gq.col(m).squaredNorm();
    CMatrix a = CMatrix::Identity(n_r_, n_r_) + s * s.adjoint() +
                gn2 * fq.col(m) * fq.col(m).adjoint();
    Complex inner = fq.col(m).adjoint() * a.llt().solve(s * gq.col(m));
    if (std::abs(inner) == 0.0) return phases(m);
    return std::arg(inner);
  }
};

class MseCost final : public ScaledChannelCost {
 public:
  using ScaledChannelCost::ScaledChannelCost;

  Sense sense() const override { return Sense::minimize; }

  double value_at(const CMatrix& theta) const override {
    CMatrix e = e_matrix(heq_scaled(theta));
    return e.llt().solve(CMatrix::Identity(n_r_, n_r_)).trace().real();
  }

  CMatrix euclid_grad_at(const CMatrix& theta) const override {
    CMatrix h = heq_scaled(theta);
    CMatrix e = e_matrix(h);
    CMatrix einv = e.llt().solve(CMatrix::Identity(n_r_, n_r_));
    return -2.0 * f_.adjoint() * einv * einv * h * g_;
  }
};

}  // namespace

std::unique_ptr<CostFunction> sumgain_cost(const MimoChannel& ch) {
  return std::make_unique<SumGainCost>(ch);
}

std::unique_ptr<CostFunction> rate_cost(const MimoChannel& ch) {
  return std::make_unique<RateCost>(ch);
}

std::unique_ptr<CostFunction> mse_cost(const MimoChannel& ch) {
  return std::make_unique<MseCost>(ch);
}

LowRankReduction low_rank_reduce(const MimoChannel& ch) {
  const int m = ch.m();
  const int r_cap = ch.n_t() + ch.n_r();
  LowRankReduction red;
  if (m <= r_cap) {
    red.u_z = CMatrix::Identity(m, m);
    red.f_tilde = ch.f;
    red.g_tilde = ch.g;
    red.r = m;
    return red;
  }
  CMatrix z(m, r_cap);
  z.leftCols(ch.n_r()) = ch.f.adjoint();
  z.rightCols(ch.n_t()) = ch.g.transpose();
  red.u_z = orthonormal_basis(z, numeric_policy().rank_tol);
  red.r = static_cast<int>(red.u_z.cols());
  red.f_tilde = ch.f * red.u_z;
  red.g_tilde = ch.g * red.u_z.conjugate();
  return red;
}

CMatrix lift(const CMatrix& theta_tilde, const LowRankReduction& red) {
  if (theta_tilde.rows() != red.r || theta_tilde.cols() != red.r)
    throw DimensionError("lift: theta_tilde must be r x r");
  if ((theta_tilde - theta_tilde.transpose()).norm() >
      1e-8 * std::max(1.0, theta_tilde.norm()))
    throw NotSymmetric("lift: theta_tilde not symmetric");
  return red.u_z * theta_tilde * red.u_z.transpose();
}

UsPoint complete_full_rank(const CMatrix& q) {
  const int m = static_cast<int>(q.rows());
  const int r = static_cast<int>(q.cols());
  if (r > m) throw InvalidInput("complete_full_rank: more columns than rows");
  if ((q.adjoint() * q - CMatrix::Identity(r, r)).norm() > 1e-8 * r)
    throw InvalidInput("complete_full_rank: input not semi-unitary");
  CMatrix q_full(m, m);
  q_full.leftCols(r) = q;
  if (r < m) {
    CMatrix p = CMatrix::Identity(m, m) - q * q.adjoint();
    CMatrix q_perp = orthonormal_basis(p, 0.5);  // projector spectrum is {0,1}
    if (q_perp.cols() != m - r)
      throw InvalidInput("complete_full_rank: complement rank mismatch");
    q_full.rightCols(m - r) = q_perp;
  }
  return UsPoint{q_full * q_full.transpose(), q_full};
}

MimoChannel reduced_channel(const MimoChannel& ch, const LowRankReduction& red) {
  MimoChannel out;
  out.h_d = ch.h_d;
  out.f = red.f_tilde;
  out.g = red.g_tilde;
  out.snr_linear = ch.snr_linear;
  return out;
}

UsPoint low_cost_baseline(const MimoChannel& ch) {
  if (ch.h_d.norm() < 1e-12)
    throw DegenerateBaseline("low_cost_baseline: direct link absent");
  CMatrix a = ch.f.adjoint() * ch.h_d * ch.g;
  return retract(a + a.transpose());
}

}  // namespace usm
