#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "clf/errors.hpp"

namespace clf {

using cplx = std::complex<double>;

/// Dense complex matrix, row-major storage. Desk-scale (n <= 256); all
/// operations are plain loops, no blocking.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  ComplexMatrix(int rows, int cols);

  static ComplexMatrix identity(int n);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool square() const { return rows_ == cols_ && rows_ > 0; }

  cplx& operator()(int i, int j) { return a_[static_cast<size_t>(i) * cols_ + j]; }
  const cplx& operator()(int i, int j) const {
    return a_[static_cast<size_t>(i) * cols_ + j];
  }

  const std::vector<cplx>& data() const { return a_; }
  std::vector<cplx>& data() { return a_; }

  double frobenius_norm() const;
  cplx trace() const;
  bool all_finite() const;

  /// Returns diag(d) * this, i.e. row i scaled by d[i].
  ComplexMatrix scale_rows(const std::vector<cplx>& d) const;

  std::vector<cplx> operator*(const std::vector<cplx>& x) const;
  ComplexMatrix operator*(const ComplexMatrix& other) const;

  bool operator==(const ComplexMatrix& other) const = default;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<cplx> a_;
};

double inf_norm(const std::vector<cplx>& v);
double two_norm(const std::vector<cplx>& v);

/// Deterministically derives an independent RNG seed from a base seed and a
/// salt (splitmix64 finalizer).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t salt);

}  // namespace clf
