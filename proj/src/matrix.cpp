#include "clf/matrix.hpp"

#include <cmath>

namespace clf {

ComplexMatrix::ComplexMatrix(int rows, int cols) : rows_(rows), cols_(cols) {
  if (rows <= 0 || cols <= 0) throw DomainError("matrix dimensions must be positive");
  a_.assign(static_cast<size_t>(rows) * cols, cplx(0.0, 0.0));
}

ComplexMatrix ComplexMatrix::identity(int n) {
  ComplexMatrix m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

double ComplexMatrix::frobenius_norm() const {
  double s = 0.0;
  for (const cplx& z : a_) s += std::norm(z);
  return std::sqrt(s);
}

cplx ComplexMatrix::trace() const {
  if (!square()) throw DomainError("trace requires a square matrix");
  cplx t = 0.0;
  for (int i = 0; i < rows_; ++i) t += (*this)(i, i);
  return t;
}

bool ComplexMatrix::all_finite() const {
  for (const cplx& z : a_) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  }
  return true;
}

ComplexMatrix ComplexMatrix::scale_rows(const std::vector<cplx>& d) const {
  if (static_cast<int>(d.size()) != rows_)
    throw DomainError("row scaling vector length mismatch");
  ComplexMatrix out(rows_, cols_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) out(i, j) = d[i] * (*this)(i, j);
  return out;
}

std::vector<cplx> ComplexMatrix::operator*(const std::vector<cplx>& x) const {
  if (static_cast<int>(x.size()) != cols_)
    throw DomainError("matrix-vector dimension mismatch");
  std::vector<cplx> y(rows_, cplx(0.0));
  for (int i = 0; i < rows_; ++i) {
    cplx acc = 0.0;
    for (int j = 0; j < cols_; ++j) acc += (*this)(i, j) * x[j];
    y[i] = acc;
  }
  return y;
}

ComplexMatrix ComplexMatrix::operator*(const ComplexMatrix& other) const {
  if (cols_ != other.rows_) throw DomainError("matrix-matrix dimension mismatch");
  ComplexMatrix out(rows_, other.cols_);
  for (int i = 0; i < rows_; ++i)
    for (int k = 0; k < cols_; ++k) {
      const cplx aik = (*this)(i, k);
      if (aik == cplx(0.0)) continue;
      for (int j = 0; j < other.cols_; ++j) out(i, j) += aik * other(k, j);
    }
  return out;
}

double inf_norm(const std::vector<cplx>& v) {
  double m = 0.0;
  for (const cplx& z : v) m = std::max(m, std::abs(z));
  return m;
}

double two_norm(const std::vector<cplx>& v) {
  double s = 0.0;
  for (const cplx& z : v) s += std::norm(z);
  return std::sqrt(s);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t salt) {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace clf
