#pragma once

#include <optional>
#include <string>
#include <vector>

#include "clf/cascade.hpp"
#include "clf/simulator.hpp"

namespace clf {

/// Parsed scenario configuration. Agent ids in the file are arbitrary
/// integer labels; they are mapped to dense indices 0..n-1 in declaration
/// order, and every structure below stores dense indices.
struct ScenarioFile {
  std::string comments;
  std::uint64_t seed = 0;

  std::vector<int> agent_labels;  // original labels, declaration order
  FormationBasis basis;
  std::vector<std::pair<int, int>> edges;
  std::pair<int, int> roots{0, 1};
  std::optional<CascadeSpec> cascade;

  SpectrumBounds bounds;
  double v_min = -10.0;
  double v_max = 10.0;
  double dt = 1e-3;
  double t_end = 30.0;
  Integrator integrator = Integrator::rk4;
  GAParams ga;  // ga.seed defaults to the scenario seed
  double convergence_tol = 1e-2;
  std::optional<double> failure_time;  // robustness cases; default t_end/4

  struct InitialPositions {
    bool explicit_values = false;
    std::vector<cplx> values;  // when explicit
    cplx center{0.0, 0.0};     // when random box
    double half_width = 5.0;
  };
  InitialPositions initial;
  std::vector<FailureEvent> failures;  // dense indices

  int n() const { return static_cast<int>(agent_labels.size()); }
  int label_to_index(int label) const;  // throws ParseError on unknown labels
  Topology topology() const;

  /// Initial state: explicit values or a seeded uniform draw from the box.
  std::vector<cplx> initial_state(std::uint64_t seed_override) const;
};

/// Strict-schema JSON parse: unknown fields, bad types, duplicate agent ids
/// and dangling references all raise ParseError with the offending path.
ScenarioFile parse_scenario(const std::string& path);
ScenarioFile parse_scenario_text(const std::string& text, const std::string& origin);

}  // namespace clf
