#pragma once

#include <stdexcept>
#include <string>

namespace clf {

// Base class for all library errors.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Invalid argument or violated precondition.
struct DomainError : Error {
  using Error::Error;
};

// Graph does not satisfy a required structural condition (2-rootedness,
// degree requirements, invalid roots).
struct TopologyError : Error {
  using Error::Error;
};

// Cascade partition violates the coupling rules (follower cross edges,
// uncovered nodes, bad meta declarations).
struct StructureError : Error {
  using Error::Error;
};

// Iterative method failed to converge or a computation degenerated.
struct NumericalError : Error {
  using Error::Error;
};

// The stabilizer search exhausted its budget without a feasible diagonal.
struct DesignError : Error {
  using Error::Error;
};

// Assembled cascade matrix failed its kernel/rank postconditions.
struct AssemblyError : Error {
  using Error::Error;
};

// Spectrum does not have the expected two structural zeros.
struct SpectralStructureError : Error {
  using Error::Error;
};

// Scenario file could not be parsed or validated.
struct ParseError : Error {
  using Error::Error;
};

}  // namespace clf
