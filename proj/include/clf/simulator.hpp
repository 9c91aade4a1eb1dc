#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "clf/laplacian.hpp"

namespace clf {

enum class Integrator { euler, rk4 };

struct FailureEvent {
  enum class Kind { link, actuator };
  Kind kind = Kind::link;
  int a = -1;
  int b = -1;  // unused for actuator failures
  double time = 0.0;
};

/// Simulation configuration for the closed loop zdot = -(DL) z under
/// componentwise input saturation.
struct Scenario {
  ComplexMatrix system;  // the stabilized matrix DL
  FormationBasis basis;
  std::vector<cplx> z0;
  double dt = 1e-3;
  double t_end = 10.0;
  double v_min = -10.0;
  double v_max = 10.0;
  Integrator integrator = Integrator::rk4;
  std::vector<FailureEvent> failures;
  double convergence_tol = 1e-2;
  std::uint64_t seed = 0;
  std::optional<Topology> topology;  // required to validate link failures

  void validate() const;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<std::vector<cplx>> states;
  std::vector<std::vector<cplx>> controls;
  std::vector<double> formation_errors;
  struct AppliedEvent {
    FailureEvent event;
    double applied_at = 0.0;
  };
  std::vector<AppliedEvent> events_applied;
  bool diverged = false;
  double divergence_time = 0.0;
};

/// System matrix plus the actuator mask accumulated from failure events.
struct LiveSystem {
  ComplexMatrix a;
  std::vector<bool> actuator_failed;
};

/// u = -(system) z with Re and Im clamped independently to [v_min, v_max].
std::vector<cplx> control_inputs(const std::vector<cplx>& z,
                                 const ComplexMatrix& system, double v_min,
                                 double v_max);

/// Applies a failure event. Link failures zero both directed entries of the
/// edge and fold them back onto the diagonals, so each affected row still
/// sums to zero. Actuator failures freeze the agent (u_i = 0 from then on)
/// while neighbors keep sensing it.
LiveSystem apply_failure(const LiveSystem& sys, const Topology& g,
                         const FailureEvent& event);

/// One integration step; saturation (and the actuator mask) is applied
/// inside every stage evaluation.
std::vector<cplx> step(const std::vector<cplx>& z, const LiveSystem& sys,
                       double dt, Integrator integrator, double v_min,
                       double v_max);

/// Distance of z to the formation family {c1*1 + c2*xi}, normalized by the
/// centered basis norm ||xi - mean(xi) 1||.
double formation_error(const std::vector<cplx>& z, const FormationBasis& basis);

Trajectory run(const Scenario& s);

/// First time t* with formation error <= tol from t* through the end of the
/// trajectory; nullopt if the tail never settles.
std::optional<double> convergence_time(const Trajectory& traj, double tol);

}  // namespace clf
