#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "clf/laplacian.hpp"

namespace clf {

/// Lower and upper bound on the real parts of the nonzero eigenvalue
/// spectrum the stabilizer search aims for.
struct SpectrumBounds {
  double lambda_min_bar = 0.5;
  double lambda_max_bar = 20.0;

  void validate() const;
};

/// Diagonal entries of the stabilizing matrix D.
struct StabilizerDiagonal {
  std::vector<cplx> d;

  void validate() const;  // every |d_i| > 0
};

struct GAParams {
  int population_size = 100;
  int generations = 200;
  double crossover_rate = 0.9;
  double mutation_rate = 0.1;
  double mutation_sigma = 0.2;
  int tournament_size = 3;
  int elitism_count = 2;
  std::uint64_t seed = 0;
  double stability_penalty_weight = 100.0;
  bool real_diagonal = false;    // restrict the search to real d_i
  double target_fitness = 0.0;   // stop early once best fitness <= target

  void validate() const;
};

struct DesignReport {
  double best_fitness = 0.0;
  int generations = 0;
  cplx lambda_a;
  cplx lambda_max;
  bool band_membership = false;
  std::uint64_t seed = 0;
  std::vector<double> fitness_history;  // best per generation, non-increasing

  std::string to_json() const;  // serializes the contract fields only
};

// Margin below which a nonzero eigenvalue's real part is penalized as
// unstable.
inline constexpr double kStabilityMargin = 1e-3;

/// Band-shaping objectives of the nonzero spectrum: with m/M the min/max real
/// part over nonzero eigenvalues, tau = |2m - lmin - lmax| and
/// sigma = |2M - lmin - lmax|.
std::pair<double, double> spectrum_objectives(const Spectrum& spec,
                                              const SpectrumBounds& bounds);

/// Scalarized objective used by the search: tau + sigma + penalty for
/// nonzero eigenvalues with real part below the stability margin. Infinite
/// when the spectrum does not have exactly two structural zeros.
double fitness_from_spectrum(const Spectrum& spec, const SpectrumBounds& bounds,
                             double penalty_weight);

double fitness(const StabilizerDiagonal& d, const ComplexLaplacian& l,
               const SpectrumBounds& bounds, double penalty_weight);

/// Seeded genetic search over diagonals (2n real genes): tournament
/// selection, uniform crossover, Gaussian mutation, elitism. The returned
/// diagonal is guaranteed to yield exactly two structural zeros with all
/// nonzero eigenvalues in the open right half plane; otherwise DesignError.
std::pair<StabilizerDiagonal, DesignReport> design_stabilizer(
    const ComplexLaplacian& l, const SpectrumBounds& bounds, const GAParams& ga);

/// Uniform scaling: entries k * d_i for k in (0, 1]. Eigenvalues of (kD)L are
/// exactly k times those of DL.
StabilizerDiagonal scale_system(const StabilizerDiagonal& d, double k);

}  // namespace clf
