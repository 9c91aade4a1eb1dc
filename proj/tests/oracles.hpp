#pragma once

// Independent reference implementations used only by tests. These stay
// deliberately separate from the library code paths they check.

#include <random>
#include <set>
#include <vector>

#include "clf/laplacian.hpp"
#include "clf/topology.hpp"

namespace oracle {

// 2-reachability by exhaustive single-node deletion with a hand-rolled
// adjacency-matrix DFS.
bool two_reachable(const clf::Topology& g, const std::set<int>& u_set, int v);

// Rank by complex Gaussian elimination with full (complete) pivoting.
int rank_full_pivot(const clf::ComplexMatrix& m, double rel_tol = 1e-8);

// Characteristic polynomial coefficients (ascending powers of lambda) by
// direct expansion over all permutations; n <= 4 only.
std::vector<clf::cplx> char_poly(const clf::ComplexMatrix& m);

// Durand-Kerner root finder for a complex polynomial, ascending coefficients.
std::vector<clf::cplx> poly_roots(std::vector<clf::cplx> coeffs);

// Largest distance after greedily matching each entry of a to its nearest
// unused entry of b; 0 means the multisets agree.
double spectrum_distance(std::vector<clf::cplx> a, std::vector<clf::cplx> b);

// Seeded random 2-rooted graph: a Hamiltonian cycle over a shuffled node
// order plus extra random edges. Roots {0, 1}.
clf::Topology random_two_rooted(std::mt19937_64& rng, int n, double extra_edge_prob);

// Seeded arbitrary graph (possibly disconnected, degree-1 nodes allowed).
clf::Topology random_graph(std::mt19937_64& rng, int n, double edge_prob);

// Distinct random formation positions in [-5, 5]^2.
clf::FormationBasis random_basis(std::mt19937_64& rng, int n);

// Dense random complex matrix with entries from the unit normal.
clf::ComplexMatrix random_matrix(std::mt19937_64& rng, int n);

}  // namespace oracle
