#include "usm/optim.hpp"

#include <chrono>
#include <cmath>

namespace usm {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double sense_sign(const CostFunction& cost) {
  return cost.sense() == Sense::maximize ? 1.0 : -1.0;
}

bool converged_step(const OptimConfig& cfg, double f_prev, double f_cur) {
  double eps = cfg.eps;
  if (cfg.eps_relative) eps *= std::max(1.0, std::abs(f_cur));
  return std::abs(f_cur - f_prev) < eps;
}

// Maximizes g(phi) for phi in [0, 2pi): coarse grid then golden-section
// refinement of the best bracket down to width 1e-10.
template <class Fn>
double scalar_phase_search(const Fn& g) {
  constexpr int kGrid = 64;
  constexpr double kTwoPi = 2.0 * M_PI;
  double best_phi = 0.0, best_val = g(0.0);
  for (int k = 1; k < kGrid; ++k) {
    double phi = kTwoPi * k / kGrid;
    double val = g(phi);
    if (val > best_val) {
      best_val = val;
      best_phi = phi;
    }
  }
  double lo = best_phi - kTwoPi / kGrid;
  double hi = best_phi + kTwoPi / kGrid;
  const double inv_gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = hi - inv_gr * (hi - lo);
  double b = lo + inv_gr * (hi - lo);
  double fa = g(a), fb = g(b);
  while (hi - lo > 1e-10) {
    if (fa < fb) {
      lo = a;
      a = b;
      fa = fb;
      b = lo + inv_gr * (hi - lo);
      fb = g(b);
    } else {
      hi = b;
      b = a;
      fb = fa;
      a = hi - inv_gr * (hi - lo);
      fa = g(a);
    }
  }
  double mid = 0.5 * (lo + hi);
  return g(mid) >= best_val ? mid : best_phi;
}

// Bisection on the derivative dg/dmu (central differences) inside [0, mu_hi];
// assumes an ascent direction so dg/dmu(0) > 0.
template <class Fn>
double bisect_step(const Fn& g, double mu_hi, int max_trials) {
  auto deriv = [&](double mu) {
    const double h = 1e-6 * std::max(1.0, mu_hi);
    return (g(mu + h) - g(mu - h)) / (2.0 * h);
  };
  double lo = 0.0, hi = mu_hi;
  if (deriv(hi) > 0.0) return hi;  // still ascending at the cap
  for (int it = 0; it < max_trials; ++it) {
    double mid = 0.5 * (lo + hi);
    if (deriv(mid) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

std::string to_string(StopReason r) {
  switch (r) {
    case StopReason::threshold: return "threshold";
    case StopReason::max_iters: return "max_iters";
    case StopReason::stalled_line_search: return "stalled_line_search";
  }
  return "unknown";
}

TangentDirection riemannian_grad(const CostFunction& cost, const UsPoint& u) {
  CMatrix j = cost.euclid_grad(u);
  if (cost.sense() == Sense::minimize) j = -j;
  return project_tangent(u, j);
}

std::pair<UsPoint, OptimReport> optimize_ls(const CostFunction& cost,
                                            const UsPoint& u0,
                                            const OptimConfig& cfg) {
  const double s = sense_sign(cost);
  auto t0 = Clock::now();
  UsPoint u = u0;
  OptimReport rep;
  double f = cost.value(u);

  for (int k = 0; k < cfg.max_iters; ++k) {
    auto it0 = Clock::now();
    TangentDirection grad = riemannian_grad(cost, u);
    double gnorm = grad.norm();
    if (gnorm < 1e-12) {
      rep.iterations = k + 1;
      rep.cost_trace.push_back(f);
      rep.grad_norm_trace.push_back(gnorm);
      rep.iter_times_s.push_back(seconds_since(it0));
      rep.converged = true;
      rep.stop_reason = StopReason::threshold;
      break;
    }
    GeodesicFrame frame = geodesic_frame(u, grad);
    auto g_at = [&](double mu) {
      return s * cost.value(geodesic_point(frame, RealVector(mu * frame.thetas)));
    };
    double g0 = s * f;
    double slope = gnorm * gnorm;

    bool accepted = false;
    double mu = cfg.ls_mu_max;
    UsPoint u_next = u;
    double f_next = f;
    if (cfg.ls_bisection) {
      mu = bisect_step(g_at, cfg.ls_mu_max, cfg.ls_max_trials);
      u_next = geodesic_point(frame, RealVector(mu * frame.thetas));
      f_next = cost.value(u_next);
      accepted = s * f_next > g0;
    }
    if (!accepted) {
      mu = cfg.ls_mu_max;
      for (int t = 0; t < cfg.ls_max_trials; ++t) {
        UsPoint cand = geodesic_point(frame, RealVector(mu * frame.thetas));
        double fc = cost.value(cand);
        if (s * fc >= g0 + cfg.ls_armijo_c * mu * slope) {
          u_next = cand;
          f_next = fc;
          accepted = true;
          break;
        }
        mu *= cfg.ls_shrink;
      }
    }

    if (!accepted) {
      rep.iterations = k + 1;
      rep.cost_trace.push_back(f);
      rep.grad_norm_trace.push_back(gnorm);
      rep.iter_times_s.push_back(seconds_since(it0));
      rep.stop_reason = StopReason::stalled_line_search;
      break;
    }

    double f_prev = f;
    u = u_next;
    f = f_next;
    rep.iterations = k + 1;
    rep.cost_trace.push_back(f);
    rep.grad_norm_trace.push_back(gnorm);
    rep.iter_times_s.push_back(seconds_since(it0));
    if (converged_step(cfg, f_prev, f)) {
      rep.converged = true;
      rep.stop_reason = StopReason::threshold;
      break;
    }
  }
  rep.wall_time_s = seconds_since(t0);
  return {u, rep};
}

std::pair<UsPoint, OptimReport> optimize_po(const CostFunction& cost,
                                            const UsPoint& u0,
                                            const OptimConfig& cfg) {
  const double s = sense_sign(cost);
  const int n = u0.n();
  auto t0 = Clock::now();
  UsPoint u = u0;
  OptimReport rep;
  double f = cost.value(u);

  for (int k = 0; k < cfg.max_iters; ++k) {
    auto it0 = Clock::now();
    TangentDirection grad = riemannian_grad(cost, u);
    double gnorm = grad.norm();
    if (gnorm < 1e-12) {
      rep.iterations = k + 1;
      rep.cost_trace.push_back(f);
      rep.grad_norm_trace.push_back(gnorm);
      rep.iter_times_s.push_back(seconds_since(it0));
      rep.converged = true;
      rep.stop_reason = StopReason::threshold;
      break;
    }
    GeodesicFrame frame = geodesic_frame(u, grad);

    // Phases start at zero (the current point), so every per-phase argmax
    // can only improve the sweep objective.
    RealVector phases = RealVector::Zero(n);
    double g_cur = s * f;
    for (int sweep = 0; sweep < cfg.max_inner_phase_sweeps; ++sweep) {
      for (int m = 0; m < n; ++m) {
        auto g_of_phase = [&](double phi) {
          RealVector p = phases;
          p(m) = phi;
          return s * cost.value(geodesic_point(frame, p));
        };
        double cand;
        if (auto cf = cost.phase_update(m, frame, phases)) {
          cand = *cf;
        } else {
          cand = scalar_phase_search(g_of_phase);
        }
        double g_cand = g_of_phase(cand);
        if (g_cand >= g_cur) {
          phases(m) = cand;
          g_cur = g_cand;
        }
      }
    }

    double f_prev = f;
    u = geodesic_point(frame, phases);
    f = cost.value(u);
    rep.iterations = k + 1;
    rep.cost_trace.push_back(f);
    rep.grad_norm_trace.push_back(gnorm);
    rep.iter_times_s.push_back(seconds_since(it0));
    if (converged_step(cfg, f_prev, f)) {
      rep.converged = true;
      rep.stop_reason = StopReason::threshold;
      break;
    }
  }
  rep.wall_time_s = seconds_since(t0);
  return {u, rep};
}

namespace {

// exp(D) for skew-Hermitian D, via the Hermitian eigendecomposition of -jD.
CMatrix expm_skew_hermitian(const CMatrix& d) {
  const Complex j(0.0, 1.0);
  Eigen::SelfAdjointEigenSolver<CMatrix> es(CMatrix(-j * d));
  Eigen::VectorXcd ph(es.eigenvalues().size());
  for (int k = 0; k < ph.size(); ++k)
    ph(k) = std::polar(1.0, es.eigenvalues()(k));
  return es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace

std::pair<UsPoint, OptimReport> optimize_unitary_then_project(
    const CostFunction& cost, const CMatrix& u0, const OptimConfig& cfg) {
  const double s = sense_sign(cost);
  const int n = static_cast<int>(u0.rows());
  auto t0 = Clock::now();
  CMatrix u = u0;
  OptimReport rep;
  double f = cost.value_at(u);

  for (int k = 0; k < cfg.max_iters; ++k) {
    auto it0 = Clock::now();
    CMatrix j = cost.euclid_grad_at(u);
    if (cost.sense() == Sense::minimize) j = -j;
    CMatrix uhj = u.adjoint() * j;
    CMatrix dir = 0.5 * (uhj - uhj.adjoint());  // skew-Hermitian
    double gnorm = dir.norm();
    if (gnorm < 1e-12) {
      rep.iterations = k + 1;
      rep.cost_trace.push_back(f);
      rep.grad_norm_trace.push_back(gnorm);
      rep.iter_times_s.push_back(seconds_since(it0));
      rep.converged = true;
      rep.stop_reason = StopReason::threshold;
      break;
    }
    double g0 = s * f;
    double slope = gnorm * gnorm;
    bool accepted = false;
    double mu = cfg.ls_mu_max;
    CMatrix u_next = u;
    double f_next = f;
    for (int t = 0; t < cfg.ls_max_trials; ++t) {
      CMatrix cand = u * expm_skew_hermitian(CMatrix(mu * dir));
      double fc = cost.value_at(cand);
      if (s * fc >= g0 + cfg.ls_armijo_c * mu * slope) {
        u_next = cand;
        f_next = fc;
        accepted = true;
        break;
      }
      mu *= cfg.ls_shrink;
    }
    if (!accepted) {
      rep.iterations = k + 1;
      rep.cost_trace.push_back(f);
      rep.grad_norm_trace.push_back(gnorm);
      rep.iter_times_s.push_back(seconds_since(it0));
      rep.stop_reason = StopReason::stalled_line_search;
      break;
    }
    double f_prev = f;
    u = u_next;
    f = f_next;
    rep.iterations = k + 1;
    rep.cost_trace.push_back(f);
    rep.grad_norm_trace.push_back(gnorm);
    rep.iter_times_s.push_back(seconds_since(it0));
    if (converged_step(cfg, f_prev, f)) {
      rep.converged = true;
      rep.stop_reason = StopReason::threshold;
      break;
    }
  }
  (void)n;
  rep.wall_time_s = seconds_since(t0);
  return {retract(u + u.transpose()), rep};
}

}  // namespace usm
