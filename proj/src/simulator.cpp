#include "clf/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace clf {

void Scenario::validate() const {
  if (!system.square()) throw DomainError("system matrix must be square");
  const int n = system.rows();
  if (basis.size() != n || static_cast<int>(z0.size()) != n)
    throw DomainError("basis/state dimensions do not match the system");
  if (!(dt > 0.0)) throw DomainError("dt must be positive");
  if (!(t_end >= dt)) throw DomainError("t_end must be at least dt");
  if (!(v_min < v_max)) throw DomainError("saturation bounds must satisfy v_min < v_max");
  for (const FailureEvent& ev : failures) {
    if (ev.time < 0.0 || ev.time > t_end)
      throw DomainError("failure event time outside [0, t_end]");
    if (ev.kind == FailureEvent::Kind::actuator) {
      if (ev.a < 0 || ev.a >= n)
        throw DomainError("actuator failure references invalid agent " +
                          std::to_string(ev.a));
    } else {
      if (!topology)
        throw DomainError("link failure events need a topology context");
      if (!topology->has_edge(ev.a, ev.b))
        throw DomainError("link failure references edge (" + std::to_string(ev.a) +
                          "," + std::to_string(ev.b) + ") absent from the graph");
    }
  }
}

namespace {

double clamp(double x, double lo, double hi) { return std::min(std::max(x, lo), hi); }

std::vector<cplx> saturated_control(const std::vector<cplx>& z, const LiveSystem& sys,
                                    double v_min, double v_max) {
  std::vector<cplx> u = sys.a * z;
  for (size_t i = 0; i < u.size(); ++i) {
    if (!sys.actuator_failed.empty() && sys.actuator_failed[i]) {
      u[i] = cplx(0.0, 0.0);
      continue;
    }
    u[i] = cplx(clamp(-u[i].real(), v_min, v_max), clamp(-u[i].imag(), v_min, v_max));
  }
  return u;
}

}  // namespace

std::vector<cplx> control_inputs(const std::vector<cplx>& z,
                                 const ComplexMatrix& system, double v_min,
                                 double v_max) {
  if (static_cast<int>(z.size()) != system.cols())
    throw DomainError("state length does not match the system dimension");
  LiveSystem sys{system, {}};
  return saturated_control(z, sys, v_min, v_max);
}

namespace {

LiveSystem apply_failure_impl(const LiveSystem& sys, const Topology* g,
                              const FailureEvent& event) {
  LiveSystem out = sys;
  if (out.actuator_failed.empty()) out.actuator_failed.assign(out.a.rows(), false);
  if (event.kind == FailureEvent::Kind::actuator) {
    if (event.a < 0 || event.a >= out.a.rows())
      throw DomainError("actuator failure references invalid agent " +
                        std::to_string(event.a));
    out.actuator_failed[event.a] = true;
    return out;
  }
  if (g == nullptr || !g->has_edge(event.a, event.b))
    throw DomainError("link failure references edge (" + std::to_string(event.a) +
                      "," + std::to_string(event.b) + ") absent from the graph");
  // drop the summand for both endpoints, keeping row sums at zero
  out.a(event.a, event.a) += out.a(event.a, event.b);
  out.a(event.a, event.b) = 0.0;
  out.a(event.b, event.b) += out.a(event.b, event.a);
  out.a(event.b, event.a) = 0.0;
  return out;
}

}  // namespace

LiveSystem apply_failure(const LiveSystem& sys, const Topology& g,
                         const FailureEvent& event) {
  return apply_failure_impl(sys, &g, event);
}

std::vector<cplx> step(const std::vector<cplx>& z, const LiveSystem& sys,
                       double dt, Integrator integrator, double v_min,
                       double v_max) {
  const size_t n = z.size();
  if (integrator == Integrator::euler) {
    const std::vector<cplx> u = saturated_control(z, sys, v_min, v_max);
    std::vector<cplx> out(n);
    for (size_t i = 0; i < n; ++i) out[i] = z[i] + dt * u[i];
    return out;
  }
  // classical RK4; each stage sees the saturated control
  const std::vector<cplx> k1 = saturated_control(z, sys, v_min, v_max);
  std::vector<cplx> tmp(n);
  for (size_t i = 0; i < n; ++i) tmp[i] = z[i] + 0.5 * dt * k1[i];
  const std::vector<cplx> k2 = saturated_control(tmp, sys, v_min, v_max);
  for (size_t i = 0; i < n; ++i) tmp[i] = z[i] + 0.5 * dt * k2[i];
  const std::vector<cplx> k3 = saturated_control(tmp, sys, v_min, v_max);
  for (size_t i = 0; i < n; ++i) tmp[i] = z[i] + dt * k3[i];
  const std::vector<cplx> k4 = saturated_control(tmp, sys, v_min, v_max);
  std::vector<cplx> out(n);
  for (size_t i = 0; i < n; ++i)
    out[i] = z[i] + (dt / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  return out;
}

double formation_error(const std::vector<cplx>& z, const FormationBasis& basis) {
  const int n = basis.size();
  if (static_cast<int>(z.size()) != n)
    throw DomainError("state length does not match the basis");
  // orthonormalize [1, xi]; the centered norm doubles as the error scale
  const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));
  cplx mean = 0.0;
  for (const cplx& x : basis.xi) mean += x;
  mean /= static_cast<double>(n);
  std::vector<cplx> e2(n);
  for (int i = 0; i < n; ++i) e2[i] = basis.xi[i] - mean;
  const double centered_norm = two_norm(e2);
  if (centered_norm <= 1e-12 * std::max(1.0, inf_norm(basis.xi)))
    throw DomainError("formation basis is a multiple of the ones vector");
  for (cplx& x : e2) x /= centered_norm;

  cplx c1 = 0.0;  // <e1, z> with e1 = 1/sqrt(n)
  for (const cplx& x : z) c1 += x;
  c1 *= inv_sqrt_n;
  cplx c2 = 0.0;
  for (int i = 0; i < n; ++i) c2 += std::conj(e2[i]) * z[i];

  double res2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const cplx r = z[i] - c1 * inv_sqrt_n - c2 * e2[i];
    res2 += std::norm(r);
  }
  return std::sqrt(res2) / centered_norm;
}

Trajectory run(const Scenario& s) {
  s.validate();
  const int n = s.system.rows();
  const int steps = static_cast<int>(std::ceil(s.t_end / s.dt - 1e-12));

  double envelope = std::max(1.0, inf_norm(s.z0));
  envelope = std::max(envelope, inf_norm(s.basis.xi));
  const double blowup = 1e6 * envelope;

  std::vector<FailureEvent> pending = s.failures;
  std::stable_sort(pending.begin(), pending.end(),
                   [](const FailureEvent& a, const FailureEvent& b) {
                     return a.time < b.time;
                   });
  size_t next_event = 0;

  LiveSystem sys{s.system, std::vector<bool>(n, false)};
  Trajectory traj;
  traj.times.reserve(steps + 1);
  std::vector<cplx> z = s.z0;

  for (int k = 0; k <= steps; ++k) {
    const double t = k * s.dt;
    while (next_event < pending.size() && pending[next_event].time <= t + 1e-12) {
      sys = apply_failure_impl(sys, s.topology ? &*s.topology : nullptr,
                               pending[next_event]);
      traj.events_applied.push_back({pending[next_event], t});
      ++next_event;
    }
    traj.times.push_back(t);
    traj.states.push_back(z);
    traj.controls.push_back(saturated_control(z, sys, s.v_min, s.v_max));
    traj.formation_errors.push_back(formation_error(z, s.basis));

    bool finite = true;
    double zmax = 0.0;
    for (const cplx& x : z) {
      if (!std::isfinite(x.real()) || !std::isfinite(x.imag())) finite = false;
      zmax = std::max(zmax, std::abs(x));
    }
    if (!finite || zmax > blowup) {
      traj.diverged = true;
      traj.divergence_time = t;
      break;
    }
    if (k < steps) z = step(z, sys, s.dt, s.integrator, s.v_min, s.v_max);
  }
  return traj;
}

std::optional<double> convergence_time(const Trajectory& traj, double tol) {
  if (traj.formation_errors.empty() || traj.diverged) return std::nullopt;
  const int m = static_cast<int>(traj.formation_errors.size());
  if (traj.formation_errors[m - 1] > tol) return std::nullopt;
  int first_ok = m - 1;
  for (int i = m - 1; i >= 0; --i) {
    if (traj.formation_errors[i] > tol) break;
    first_ok = i;
  }
  return traj.times[first_ok];
}

}  // namespace clf
