#include "clf/laplacian.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace clf {

void FormationBasis::validate() const {
  const int n = size();
  if (n < 3) throw DomainError("formation basis needs at least 3 positions");
  for (const cplx& z : xi) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
      throw DomainError("formation basis has non-finite entries");
  }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      if (xi[i] == xi[j]) {
        std::ostringstream msg;
        msg << "formation positions " << i << " and " << j
            << " coincide; basis entries must be pairwise distinct";
        throw DomainError(msg.str());
      }
    }
}

cplx EdgeWeights::at(int i, int j) const {
  const auto it = w.find({i, j});
  if (it == w.end())
    throw DomainError("no weight for directed edge (" + std::to_string(i) + "," +
                      std::to_string(j) + ")");
  return it->second;
}

EdgeWeights synthesize_weights(const Topology& g, const FormationBasis& basis,
                               std::uint64_t seed) {
  basis.validate();
  if (basis.size() != g.node_count())
    throw DomainError("basis length does not match node count");
  for (int i = 0; i < g.node_count(); ++i) {
    if (g.degree(i) < 2)
      throw DomainError("node " + std::to_string(i) +
                        " has degree < 2; every agent needs at least two neighbors");
  }
  if (!is_two_rooted(g))
    throw TopologyError("graph is not 2-rooted for the declared root pair");

  EdgeWeights weights;
  for (int i = 0; i < g.node_count(); ++i) {
    const std::vector<int>& nbrs = g.neighbors(i);
    const int d = static_cast<int>(nbrs.size());
    std::vector<cplx> diff(d);
    for (int k = 0; k < d; ++k) diff[k] = basis.xi[nbrs[k]] - basis.xi[i];

    std::vector<cplx> row(d);
    if (d == 2) {
      row[0] = diff[1];
      row[1] = -diff[0];
    } else {
      double a2 = 0.0;
      for (const cplx& z : diff) a2 += std::norm(z);
      std::mt19937_64 rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
      std::normal_distribution<double> gauss(0.0, 1.0);
      const double guard = 1e-6;
      bool ok = false;
      for (int attempt = 0; attempt < 32 && !ok; ++attempt) {
        for (cplx& z : row) {
          const double re = gauss(rng);
          const double im = gauss(rng);
          z = cplx(re, im);
        }
        // project onto { w : sum_k w_k diff_k = 0 }
        cplx dot = 0.0;
        for (int k = 0; k < d; ++k) dot += row[k] * diff[k];
        for (int k = 0; k < d; ++k) row[k] -= std::conj(diff[k]) * dot / a2;
        double maxmag = 0.0;
        for (const cplx& z : row) maxmag = std::max(maxmag, std::abs(z));
        if (maxmag == 0.0) continue;
        for (cplx& z : row) z /= maxmag;
        ok = true;
        for (const cplx& z : row)
          if (std::abs(z) < guard) ok = false;
      }
      if (!ok)
        throw NumericalError("null-space sampling degenerated for node " +
                             std::to_string(i) + " after 32 attempts");
    }

    double rowscale = 0.0;
    for (const cplx& z : row) rowscale = std::max(rowscale, std::abs(z));
    for (const cplx& z : row) {
      if (std::abs(z) < 1e-6 * rowscale)
        throw NumericalError("degenerate weight magnitude at node " +
                             std::to_string(i));
    }
    for (int k = 0; k < d; ++k) weights.w[{i, nbrs[k]}] = row[k];
  }
  return weights;
}

ComplexLaplacian build_laplacian(const Topology& g, const EdgeWeights& w,
                                 const FormationBasis& basis) {
  basis.validate();
  if (basis.size() != g.node_count())
    throw DomainError("basis length does not match node count");
  size_t expected = 0;
  for (int i = 0; i < g.node_count(); ++i) expected += g.neighbors(i).size();
  if (w.w.size() != expected)
    throw DomainError("weight table does not match the edge set (" +
                      std::to_string(w.w.size()) + " entries, expected " +
                      std::to_string(expected) + ")");

  const int n = g.node_count();
  ComplexMatrix m(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j : g.neighbors(i)) m(i, j) = -w.at(i, j);
    // Diagonal as the negated ascending-order off-diagonal sum: equals
    // sum_j w_ij and makes the row annihilate the ones vector exactly under
    // the kernel_residuals evaluation order.
    cplx offsum = 0.0;
    for (int j = 0; j < n; ++j) {
      if (j != i) offsum += m(i, j);
    }
    m(i, i) = -offsum;
  }
  return ComplexLaplacian{std::move(m), basis, g};
}

ConditionReport verify_formation_conditions(const ComplexLaplacian& l) {
  ConditionReport report;
  const int n = l.matrix.rows();
  const auto [r1, rx] = kernel_residuals(l.matrix, l.basis.xi);
  report.residual_ones = r1;
  report.residual_xi = rx;
  report.rank = numerical_rank(l.matrix);
  report.expected_rank = n - 2;
  report.two_rooted = is_two_rooted(l.topology);
  const double tol = 1e-9 * l.matrix.frobenius_norm();
  report.pass = r1 <= tol && rx <= tol && report.rank == report.expected_rank &&
                report.two_rooted;
  return report;
}

std::string ConditionReport::to_json() const {
  std::ostringstream os;
  os.precision(17);
  os << "{\"expected_rank\":" << expected_rank << ",\"rank\":" << rank
     << ",\"residual_ones\":" << residual_ones << ",\"residual_xi\":" << residual_xi
     << ",\"two_rooted\":" << (two_rooted ? "true" : "false") << ",\"verdict\":\""
     << (pass ? "pass" : "fail") << "\"}";
  return os.str();
}

std::pair<cplx, cplx> connectivity_metrics(const Spectrum& spec) {
  if (spec.zero_count != 2)
    throw SpectralStructureError(
        "expected exactly 2 structural zeros, found " +
        std::to_string(spec.zero_count));
  const int n = static_cast<int>(spec.eigenvalues.size());
  bool found = false;
  cplx lambda_a;
  for (int i = 0; i < n; ++i) {
    if (spec.is_structural_zero(i)) continue;
    lambda_a = spec.eigenvalues[i];
    found = true;
    break;
  }
  if (!found)
    throw SpectralStructureError("no nonzero eigenvalues in the spectrum");
  // sorted ascending by (Re, Im), so the last entry has the largest real part
  const cplx lambda_max = spec.eigenvalues[n - 1];
  return {lambda_a, lambda_max};
}

}  // namespace clf
