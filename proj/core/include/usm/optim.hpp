#ifndef USM_OPTIM_HPP
#define USM_OPTIM_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "usm/manifold.hpp"

namespace usm {

enum class Sense { maximize, minimize };
enum class StopReason { threshold, max_iters, stalled_line_search };

/// Cost function over U_s, defined on arbitrary complex matrices so the
/// unitary-manifold baseline can evaluate it off the symmetric manifold.
class CostFunction {
 public:
  virtual ~CostFunction() = default;

  virtual double value_at(const CMatrix& theta) const = 0;

  /// Euclidean gradient J with d/dt f(theta + t*D) = Re tr(J^H D).
  virtual CMatrix euclid_grad_at(const CMatrix& theta) const = 0;

  /// Closed-form argopt of the m-th geodesic phase holding the others fixed,
  /// or nullopt to fall back to the optimizer's scalar search.
  virtual std::optional<double> phase_update(int m, const GeodesicFrame& frame,
                                             const RealVector& phases) const {
    (void)m;
    (void)frame;
    (void)phases;
    return std::nullopt;
  }

  virtual Sense sense() const { return Sense::maximize; }

  double value(const UsPoint& u) const { return value_at(u.u); }
  CMatrix euclid_grad(const UsPoint& u) const { return euclid_grad_at(u.u); }
};

struct OptimConfig {
  double eps = 1e-3;
  bool eps_relative = false;  // scale eps by max(1, |F_k|)
  int max_iters = 500;
  int max_inner_phase_sweeps = 1;
  double ls_mu_max = 2.0;
  double ls_shrink = 0.5;
  double ls_armijo_c = 1e-4;
  int ls_max_trials = 30;
  bool ls_bisection = false;  // bisection on dg/dmu instead of Armijo
  uint64_t seed = 0;
};

struct OptimReport {
  int iterations = 0;
  std::vector<double> cost_trace;       // one entry per iteration, f-scale
  std::vector<double> grad_norm_trace;  // Riemannian gradient norms
  std::vector<double> iter_times_s;     // wall time per iteration
  double wall_time_s = 0.0;
  bool converged = false;
  StopReason stop_reason = StopReason::max_iters;
};

std::string to_string(StopReason r);

/// Riemannian gradient: projection of the Euclidean gradient, negated for
/// minimization so it always points in the ascent direction of the working
/// objective.
TangentDirection riemannian_grad(const CostFunction& cost, const UsPoint& u);

std::pair<UsPoint, OptimReport> optimize_ls(const CostFunction& cost,
                                            const UsPoint& u0,
                                            const OptimConfig& cfg);

std::pair<UsPoint, OptimReport> optimize_po(const CostFunction& cost,
                                            const UsPoint& u0,
                                            const OptimConfig& cfg);

/// Baseline: gradient ascent on the full unitary group U(M), then retraction
/// of theta + theta^T onto U_s.
std::pair<UsPoint, OptimReport> optimize_unitary_then_project(
    const CostFunction& cost, const CMatrix& u0, const OptimConfig& cfg);

}  // namespace usm

#endif
