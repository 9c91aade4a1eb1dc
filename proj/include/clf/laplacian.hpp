#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "clf/spectral.hpp"
#include "clf/topology.hpp"

namespace clf {

/// Target positions of the agents in the complex plane. Entries must be
/// pairwise distinct; the formation family is this vector up to translation,
/// rotation and scaling.
struct FormationBasis {
  std::vector<cplx> xi;

  int size() const { return static_cast<int>(xi.size()); }
  void validate() const;  // throws DomainError on duplicates / non-finite
};

/// Complex weight per directed edge (i, j), defined exactly for j in N_i.
/// Weights for (i, j) and (j, i) are independent.
struct EdgeWeights {
  std::map<std::pair<int, int>, cplx> w;

  cplx at(int i, int j) const;
};

/// The complex Laplacian together with the data it was built from.
struct ComplexLaplacian {
  ComplexMatrix matrix;
  FormationBasis basis;
  Topology topology;
};

struct ConditionReport {
  double residual_ones = 0.0;
  double residual_xi = 0.0;
  int rank = 0;
  int expected_rank = 0;
  bool two_rooted = false;
  bool pass = false;

  std::string to_json() const;
};

/// Per-row weight synthesis solving sum_j w_ij (xi_j - xi_i) = 0.
///
/// Degree-2 rows use the closed-form solution (w_ij1, w_ij2) =
/// (xi_j2 - xi_i, -(xi_j1 - xi_i)). Higher-degree rows draw a seeded random
/// complex vector and project it onto the constraint's null space, resampling
/// when any component falls below the degeneracy guard. The per-row RNG is
/// derived from (seed, node id), so row order never affects the result.
EdgeWeights synthesize_weights(const Topology& g, const FormationBasis& basis,
                               std::uint64_t seed);

/// Assembles the Laplacian: off-diagonal (i,j) = -w_ij for j in N_i, zero
/// otherwise; diagonal = sum of the row's weights, evaluated so that each row
/// annihilates the ones vector exactly (see kernel_residuals).
ComplexLaplacian build_laplacian(const Topology& g, const EdgeWeights& w,
                                 const FormationBasis& basis);

/// Checks the algebraic and graphical formation conditions: kernel residuals,
/// rank n-2, and 2-rootedness. Failures are report entries, not exceptions.
ConditionReport verify_formation_conditions(const ComplexLaplacian& l);

/// (lambda_a, lambda_max): the nonzero eigenvalue of smallest real part and
/// the eigenvalue of largest real part, ties broken by imaginary part.
/// Requires exactly two structural zeros.
std::pair<cplx, cplx> connectivity_metrics(const Spectrum& spec);

}  // namespace clf
