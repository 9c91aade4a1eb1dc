#pragma once

#include <utility>
#include <vector>

#include "clf/matrix.hpp"

namespace clf {

/// Eigenvalues of a general complex matrix, sorted by real part ascending,
/// ties broken by imaginary part ascending. The sort order is part of the
/// public contract: lambda_3 / lambda_n selection depends on it.
struct Spectrum {
  std::vector<cplx> eigenvalues;
  int zero_count = 0;    // eigenvalues with |lambda| <= tol_zero
  double tol_zero = 0.0;

  bool is_structural_zero(int i) const {
    return std::abs(eigenvalues[i]) <= tol_zero;
  }
};

/// Default threshold for classifying structural zeros: 1e-7 * max(1, ||m||_F).
double default_zero_tol(const ComplexMatrix& m);

/// All eigenvalues of a general (non-Hermitian) complex square matrix via
/// Hessenberg reduction and shifted QR iteration with Wilkinson shifts.
/// Throws NumericalError if a diagonal entry fails to converge within the
/// sweep budget.
Spectrum eigenvalues(const ComplexMatrix& m, double tol_zero);
Spectrum eigenvalues(const ComplexMatrix& m);

/// Numerical rank via Householder QR with column pivoting; a diagonal entry
/// of R counts toward the rank if |R(k,k)| > rel_tol * |R(0,0)|.
int numerical_rank(const ComplexMatrix& m, double rel_tol = 1e-8);

/// Returns (||L*1||_inf, ||L*xi||_inf).
///
/// Row sums accumulate the off-diagonal entries in ascending column order and
/// add the diagonal last. Laplacian construction chooses the diagonal as the
/// negated off-diagonal sum in that same order, which makes ||L*1||_inf
/// exactly zero for synthesized Laplacians.
std::pair<double, double> kernel_residuals(const ComplexMatrix& l,
                                           const std::vector<cplx>& xi);

/// LU factorization with partial pivoting. Pivots smaller in magnitude than
/// pivot_floor are replaced by pivot_floor (keeping phase), which lets the
/// factorization serve shifted inverse iteration on near-singular matrices.
struct LuFactors {
  ComplexMatrix lu;
  std::vector<int> perm;
  bool floored = false;  // at least one pivot was below pivot_floor
};

LuFactors lu_factor(ComplexMatrix a, double pivot_floor = 0.0);
std::vector<cplx> lu_solve(const LuFactors& f, std::vector<cplx> b);
ComplexMatrix lu_inverse(const LuFactors& f);

/// Unit eigenvector estimate for the eigenvalue `lambda` of m, recovered by
/// shifted inverse iteration from a seeded deterministic start vector.
std::vector<cplx> inverse_iteration(const ComplexMatrix& m, cplx lambda,
                                    int iterations = 3,
                                    std::uint64_t seed = 0x51f0u);

struct EigenDecomposition {
  std::vector<cplx> values;  // same order as matrix columns of `vectors`
  ComplexMatrix vectors;     // unit eigenvector per column
  double condition = 0.0;    // 1-norm condition estimate of `vectors`
  double residual = 0.0;     // ||A V - V diag(values)||_F
};

/// Full eigendecomposition for diagonalizable matrices. Eigenvectors come
/// from clustered inverse iteration (repeated eigenvalues get an orthonormal
/// basis of their invariant subspace). `condition` and `residual` let callers
/// reject defective inputs: an exactly defective cluster yields a spanning
/// but non-invariant basis, which only the residual exposes.
EigenDecomposition eigen_decomposition(const ComplexMatrix& m);

/// Analytic propagator exp(-m*t) * z0 via eigendecomposition. Used as the
/// simulation oracle. Throws NumericalError when the eigenbasis condition
/// number exceeds 1e8 (defective or near-defective m).
std::vector<cplx> propagate_exact(const ComplexMatrix& m,
                                  const std::vector<cplx>& z0, double t);

}  // namespace clf
