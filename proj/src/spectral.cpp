#include "clf/spectral.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <limits>
#include <random>
#include <string>

namespace clf {

namespace {

constexpr double kEps = DBL_EPSILON;

struct Givens {
  double c = 1.0;
  cplx s = 0.0;
};

// Rotation [c s; -conj(s) c] mapping (a, b) to (r, 0).
Givens make_givens(cplx a, cplx b) {
  if (b == cplx(0.0)) return {1.0, cplx(0.0)};
  const double aa = std::abs(a);
  const double ab = std::abs(b);
  if (aa == 0.0) return {0.0, std::conj(b) / ab};
  const double norm = std::hypot(aa, ab);
  const cplx phase = a / aa;
  return {aa / norm, phase * std::conj(b) / norm};
}

// Householder reduction to upper Hessenberg form, in place.
void hessenberg(ComplexMatrix& h) {
  const int n = h.rows();
  std::vector<cplx> v;
  for (int k = 0; k + 2 < n; ++k) {
    double xnorm2 = 0.0;
    for (int i = k + 1; i < n; ++i) xnorm2 += std::norm(h(i, k));
    const double xnorm = std::sqrt(xnorm2);
    if (xnorm == 0.0) continue;
    const cplx x0 = h(k + 1, k);
    const cplx alpha =
        (x0 == cplx(0.0)) ? cplx(-xnorm, 0.0) : -(x0 / std::abs(x0)) * xnorm;
    v.assign(n - k - 1, cplx(0.0));
    v[0] = x0 - alpha;
    for (int i = k + 2; i < n; ++i) v[i - k - 1] = h(i, k);
    double vnorm2 = 0.0;
    for (const cplx& z : v) vnorm2 += std::norm(z);
    if (vnorm2 == 0.0) continue;
    const double beta = 2.0 / vnorm2;
    // (I - beta v v^H) * H on rows k+1..n-1
    for (int j = k; j < n; ++j) {
      cplx s = 0.0;
      for (int i = 0; i < n - k - 1; ++i) s += std::conj(v[i]) * h(k + 1 + i, j);
      s *= beta;
      for (int i = 0; i < n - k - 1; ++i) h(k + 1 + i, j) -= s * v[i];
    }
    // H * (I - beta v v^H) on columns k+1..n-1
    for (int i = 0; i < n; ++i) {
      cplx s = 0.0;
      for (int j = 0; j < n - k - 1; ++j) s += h(i, k + 1 + j) * v[j];
      s *= beta;
      for (int j = 0; j < n - k - 1; ++j) h(i, k + 1 + j) -= s * std::conj(v[j]);
    }
    h(k + 1, k) = alpha;
    for (int i = k + 2; i < n; ++i) h(i, k) = 0.0;
  }
}

// One explicit-shift QR step on the active window [l, m].
void qr_step(ComplexMatrix& h, int l, int m, cplx shift) {
  const int n = h.rows();
  for (int i = l; i <= m; ++i) h(i, i) -= shift;
  std::vector<Givens> rots(m - l);
  for (int k = l; k < m; ++k) {
    const Givens g = make_givens(h(k, k), h(k + 1, k));
    rots[k - l] = g;
    for (int j = k; j < n; ++j) {
      const cplx x = h(k, j);
      const cplx y = h(k + 1, j);
      h(k, j) = g.c * x + g.s * y;
      h(k + 1, j) = -std::conj(g.s) * x + g.c * y;
    }
    h(k + 1, k) = 0.0;
  }
  for (int k = l; k < m; ++k) {
    const Givens g = rots[k - l];
    for (int i = 0; i <= k + 1; ++i) {
      const cplx x = h(i, k);
      const cplx y = h(i, k + 1);
      h(i, k) = g.c * x + std::conj(g.s) * y;
      h(i, k + 1) = -g.s * x + g.c * y;
    }
  }
  for (int i = l; i <= m; ++i) h(i, i) += shift;
}

cplx wilkinson_shift(const ComplexMatrix& h, int m) {
  const cplx a = h(m - 1, m - 1);
  const cplx b = h(m - 1, m);
  const cplx c = h(m, m - 1);
  const cplx d = h(m, m);
  const cplx half = 0.5 * (a - d);
  const cplx disc = std::sqrt(half * half + b * c);
  const cplx mu1 = 0.5 * (a + d) + disc;
  const cplx mu2 = 0.5 * (a + d) - disc;
  return std::abs(mu1 - d) < std::abs(mu2 - d) ? mu1 : mu2;
}

// Shifted QR iteration; reduces h to upper triangular form.
void qr_iterate(ComplexMatrix& h) {
  const int n = h.rows();
  const double hnorm = h.frobenius_norm();
  int m = n - 1;
  int iters = 0;
  while (m > 0) {
    int l = m;
    while (l > 0) {
      double s = std::abs(h(l - 1, l - 1)) + std::abs(h(l, l));
      if (s == 0.0) s = hnorm;
      if (std::abs(h(l, l - 1)) <= kEps * s) {
        h(l, l - 1) = 0.0;
        break;
      }
      --l;
    }
    if (l == m) {
      --m;
      iters = 0;
      continue;
    }
    if (iters >= 30) {
      throw NumericalError(
          "QR iteration failed to converge at index " + std::to_string(m) +
          "; residual subdiagonal " + std::to_string(std::abs(h(m, m - 1))));
    }
    cplx shift;
    if (iters > 0 && iters % 10 == 0) {
      double extra = std::abs(h(m, m - 1));
      if (m - 1 > l) extra += std::abs(h(m - 1, m - 2));
      shift = h(m, m) + cplx(0.75 * extra, 0.0);
    } else {
      shift = wilkinson_shift(h, m);
    }
    qr_step(h, l, m, shift);
    ++iters;
  }
}

void require_square(const ComplexMatrix& m, const char* what) {
  if (!m.square()) throw DomainError(std::string(what) + " requires a square matrix");
}

double norm1(const ComplexMatrix& m) {
  double best = 0.0;
  for (int j = 0; j < m.cols(); ++j) {
    double s = 0.0;
    for (int i = 0; i < m.rows(); ++i) s += std::abs(m(i, j));
    best = std::max(best, s);
  }
  return best;
}

// Modified Gram-Schmidt on the columns of x.
void orthonormalize_columns(std::vector<std::vector<cplx>>& x) {
  for (size_t k = 0; k < x.size(); ++k) {
    for (size_t j = 0; j < k; ++j) {
      cplx proj = 0.0;
      for (size_t i = 0; i < x[k].size(); ++i) proj += std::conj(x[j][i]) * x[k][i];
      for (size_t i = 0; i < x[k].size(); ++i) x[k][i] -= proj * x[j][i];
    }
    const double nrm = two_norm(x[k]);
    if (nrm == 0.0) throw NumericalError("rank collapse during orthonormalization");
    for (cplx& z : x[k]) z /= nrm;
  }
}

std::vector<cplx> seeded_unit_vector(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<cplx> v(n);
  for (cplx& z : v) {
    const double re = gauss(rng);
    const double im = gauss(rng);
    z = cplx(re, im);
  }
  const double nrm = two_norm(v);
  for (cplx& z : v) z /= nrm;
  return v;
}

}  // namespace

double default_zero_tol(const ComplexMatrix& m) {
  return 1e-7 * std::max(1.0, m.frobenius_norm());
}

Spectrum eigenvalues(const ComplexMatrix& m, double tol_zero) {
  require_square(m, "eigenvalue computation");
  if (m.rows() > 256) throw DomainError("matrix exceeds the n <= 256 desk-scale bound");
  if (!m.all_finite()) throw DomainError("matrix has non-finite entries");
  ComplexMatrix h = m;
  hessenberg(h);
  qr_iterate(h);
  Spectrum spec;
  spec.tol_zero = tol_zero;
  spec.eigenvalues.reserve(m.rows());
  for (int i = 0; i < m.rows(); ++i) spec.eigenvalues.push_back(h(i, i));
  std::sort(spec.eigenvalues.begin(), spec.eigenvalues.end(),
            [](const cplx& a, const cplx& b) {
              if (a.real() != b.real()) return a.real() < b.real();
              return a.imag() < b.imag();
            });
  for (const cplx& lam : spec.eigenvalues) {
    if (std::abs(lam) <= tol_zero) ++spec.zero_count;
  }
  return spec;
}

Spectrum eigenvalues(const ComplexMatrix& m) {
  return eigenvalues(m, default_zero_tol(m));
}

int numerical_rank(const ComplexMatrix& m, double rel_tol) {
  if (!m.all_finite()) throw DomainError("matrix has non-finite entries");
  ComplexMatrix a = m;
  const int rows = a.rows();
  const int cols = a.cols();
  const int steps = std::min(rows, cols);
  std::vector<double> rdiag(steps, 0.0);
  for (int k = 0; k < steps; ++k) {
    // column pivot: largest remaining column norm, lowest index on ties
    int best = k;
    double best_norm = -1.0;
    for (int j = k; j < cols; ++j) {
      double s = 0.0;
      for (int i = k; i < rows; ++i) s += std::norm(a(i, j));
      if (s > best_norm) {
        best_norm = s;
        best = j;
      }
    }
    if (best != k)
      for (int i = 0; i < rows; ++i) std::swap(a(i, k), a(i, best));
    double xnorm2 = 0.0;
    for (int i = k; i < rows; ++i) xnorm2 += std::norm(a(i, k));
    const double xnorm = std::sqrt(xnorm2);
    if (xnorm == 0.0) {
      rdiag[k] = 0.0;
      continue;
    }
    const cplx x0 = a(k, k);
    const cplx alpha =
        (x0 == cplx(0.0)) ? cplx(-xnorm, 0.0) : -(x0 / std::abs(x0)) * xnorm;
    std::vector<cplx> v(rows - k);
    v[0] = x0 - alpha;
    for (int i = k + 1; i < rows; ++i) v[i - k] = a(i, k);
    double vnorm2 = 0.0;
    for (const cplx& z : v) vnorm2 += std::norm(z);
    if (vnorm2 > 0.0) {
      const double beta = 2.0 / vnorm2;
      for (int j = k; j < cols; ++j) {
        cplx s = 0.0;
        for (int i = 0; i < rows - k; ++i) s += std::conj(v[i]) * a(k + i, j);
        s *= beta;
        for (int i = 0; i < rows - k; ++i) a(k + i, j) -= s * v[i];
      }
    }
    a(k, k) = alpha;
    rdiag[k] = std::abs(alpha);
  }
  const double pivot0 = rdiag.empty() ? 0.0 : rdiag[0];
  int rank = 0;
  for (double r : rdiag) {
    if (r > rel_tol * pivot0 && r > 0.0) ++rank;
  }
  return rank;
}

std::pair<double, double> kernel_residuals(const ComplexMatrix& l,
                                           const std::vector<cplx>& xi) {
  require_square(l, "kernel residual");
  const int n = l.rows();
  if (static_cast<int>(xi.size()) != n)
    throw DomainError("basis length does not match matrix dimension");
  double res_ones = 0.0;
  double res_xi = 0.0;
  for (int i = 0; i < n; ++i) {
    cplx s1 = 0.0;
    cplx sx = 0.0;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      s1 += l(i, j);
      sx += l(i, j) * xi[j];
    }
    s1 += l(i, i);
    sx += l(i, i) * xi[i];
    res_ones = std::max(res_ones, std::abs(s1));
    res_xi = std::max(res_xi, std::abs(sx));
  }
  return {res_ones, res_xi};
}

LuFactors lu_factor(ComplexMatrix a, double pivot_floor) {
  require_square(a, "LU factorization");
  const int n = a.rows();
  LuFactors f;
  f.perm.resize(n);
  for (int k = 0; k < n; ++k) {
    int p = k;
    double best = std::abs(a(k, k));
    for (int i = k + 1; i < n; ++i) {
      const double cand = std::abs(a(i, k));
      if (cand > best) {
        best = cand;
        p = i;
      }
    }
    f.perm[k] = p;
    if (p != k)
      for (int j = 0; j < n; ++j) std::swap(a(k, j), a(p, j));
    cplx piv = a(k, k);
    if (std::abs(piv) < pivot_floor) {
      piv = (piv == cplx(0.0)) ? cplx(pivot_floor, 0.0)
                               : piv / std::abs(piv) * pivot_floor;
      a(k, k) = piv;
      f.floored = true;
    }
    if (piv == cplx(0.0)) {
      f.floored = true;
      continue;  // exactly singular; solves will produce inf/nan downstream
    }
    for (int i = k + 1; i < n; ++i) {
      a(i, k) /= piv;
      const cplx lik = a(i, k);
      if (lik == cplx(0.0)) continue;
      for (int j = k + 1; j < n; ++j) a(i, j) -= lik * a(k, j);
    }
  }
  f.lu = std::move(a);
  return f;
}

std::vector<cplx> lu_solve(const LuFactors& f, std::vector<cplx> b) {
  const int n = f.lu.rows();
  if (static_cast<int>(b.size()) != n) throw DomainError("LU solve dimension mismatch");
  for (int k = 0; k < n; ++k)
    if (f.perm[k] != k) std::swap(b[k], b[f.perm[k]]);
  for (int k = 0; k < n; ++k)
    for (int i = k + 1; i < n; ++i) b[i] -= f.lu(i, k) * b[k];
  for (int k = n - 1; k >= 0; --k) {
    for (int j = k + 1; j < n; ++j) b[k] -= f.lu(k, j) * b[j];
    b[k] /= f.lu(k, k);
  }
  return b;
}

ComplexMatrix lu_inverse(const LuFactors& f) {
  const int n = f.lu.rows();
  ComplexMatrix inv(n, n);
  std::vector<cplx> e(n, cplx(0.0));
  for (int j = 0; j < n; ++j) {
    std::fill(e.begin(), e.end(), cplx(0.0));
    e[j] = 1.0;
    const std::vector<cplx> col = lu_solve(f, e);
    for (int i = 0; i < n; ++i) inv(i, j) = col[i];
  }
  return inv;
}

std::vector<cplx> inverse_iteration(const ComplexMatrix& m, cplx lambda,
                                    int iterations, std::uint64_t seed) {
  require_square(m, "inverse iteration");
  const int n = m.rows();
  ComplexMatrix shifted = m;
  for (int i = 0; i < n; ++i) shifted(i, i) -= lambda;
  const double floor = kEps * std::max(1.0, m.frobenius_norm());
  const LuFactors f = lu_factor(std::move(shifted), floor);
  std::vector<cplx> v = seeded_unit_vector(n, derive_seed(seed, n));
  for (int it = 0; it < iterations; ++it) {
    v = lu_solve(f, std::move(v));
    const double nrm = two_norm(v);
    if (nrm == 0.0 || !std::isfinite(nrm))
      throw NumericalError("inverse iteration broke down");
    for (cplx& z : v) z /= nrm;
  }
  return v;
}

EigenDecomposition eigen_decomposition(const ComplexMatrix& m) {
  require_square(m, "eigendecomposition");
  const int n = m.rows();
  const Spectrum spec = eigenvalues(m);
  const double scale = std::max(1.0, m.frobenius_norm());
  const double cluster_tol = 1e-10 * scale;
  const double floor = kEps * scale;

  EigenDecomposition ed;
  ed.values = spec.eigenvalues;
  ed.vectors = ComplexMatrix(n, n);

  int start = 0;
  int cluster_index = 0;
  while (start < n) {
    int end = start + 1;
    while (end < n &&
           std::abs(ed.values[end] - ed.values[end - 1]) <= cluster_tol)
      ++end;
    const int mult = end - start;
    cplx mean = 0.0;
    for (int i = start; i < end; ++i) mean += ed.values[i];
    mean /= static_cast<double>(mult);

    ComplexMatrix shifted = m;
    for (int i = 0; i < n; ++i) shifted(i, i) -= mean;
    const LuFactors f = lu_factor(std::move(shifted), floor);

    std::vector<std::vector<cplx>> basis(mult);
    for (int c = 0; c < mult; ++c)
      basis[c] = seeded_unit_vector(n, derive_seed(0xE16u + cluster_index, c));
    orthonormalize_columns(basis);
    for (int sweep = 0; sweep < 2; ++sweep) {
      for (auto& col : basis) col = lu_solve(f, std::move(col));
      orthonormalize_columns(basis);
    }
    for (int c = 0; c < mult; ++c)
      for (int i = 0; i < n; ++i) ed.vectors(i, start + c) = basis[c][i];
    start = end;
    ++cluster_index;
  }

  if (!ed.vectors.all_finite()) {
    ed.condition = std::numeric_limits<double>::infinity();
    ed.residual = std::numeric_limits<double>::infinity();
    return ed;
  }
  const LuFactors vf = lu_factor(ed.vectors, floor);
  const ComplexMatrix vinv = lu_inverse(vf);
  if (!vinv.all_finite()) {
    ed.condition = std::numeric_limits<double>::infinity();
  } else {
    ed.condition = norm1(ed.vectors) * norm1(vinv);
  }
  double res2 = 0.0;
  const ComplexMatrix av = m * ed.vectors;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      res2 += std::norm(av(i, j) - ed.values[j] * ed.vectors(i, j));
  ed.residual = std::sqrt(res2);
  return ed;
}

std::vector<cplx> propagate_exact(const ComplexMatrix& m,
                                  const std::vector<cplx>& z0, double t) {
  require_square(m, "propagation");
  const int n = m.rows();
  if (static_cast<int>(z0.size()) != n)
    throw DomainError("state length does not match system dimension");
  const EigenDecomposition ed = eigen_decomposition(m);
  if (!(ed.condition <= 1e8) ||
      !(ed.residual <= 1e-7 * std::max(1.0, m.frobenius_norm()))) {
    throw NumericalError(
        "eigenbasis unusable for the analytic propagator (cond ~ " +
        std::to_string(ed.condition) + ", residual " +
        std::to_string(ed.residual) + "); matrix is defective or near-defective");
  }
  const LuFactors vf = lu_factor(ed.vectors);
  const std::vector<cplx> y = lu_solve(vf, z0);
  std::vector<cplx> z(n, cplx(0.0));
  for (int k = 0; k < n; ++k) {
    const cplx amp = y[k] * std::exp(-ed.values[k] * t);
    for (int i = 0; i < n; ++i) z[i] += amp * ed.vectors(i, k);
  }
  return z;
}

}  // namespace clf
