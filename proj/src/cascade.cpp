#include "clf/cascade.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

namespace clf {

namespace {

std::string edge_name(int a, int b) {
  return "(" + std::to_string(a) + "," + std::to_string(b) + ")";
}

// Local basis normalized so the first root maps to 0 and the second to 1;
// clusters whose normalized bases agree are affine images of one another and
// can share a design.
std::vector<cplx> normalized_basis(const FormationBasis& basis, int r1, int r2) {
  const cplx origin = basis.xi[r1];
  const cplx span = basis.xi[r2] - basis.xi[r1];
  std::vector<cplx> out(basis.xi.size());
  for (size_t i = 0; i < out.size(); ++i) out[i] = (basis.xi[i] - origin) / span;
  return out;
}

bool bases_match(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  if (a.size() != b.size()) return false;
  double scale = 1.0;
  for (const cplx& z : a) scale = std::max(scale, std::abs(z));
  for (size_t i = 0; i < a.size(); ++i) {
    if (std::abs(a[i] - b[i]) > 1e-12 * scale) return false;
  }
  return true;
}

// Gain applied to a cluster's root rows during its stabilizer design. The
// meta-cluster commands the roots; keeping the clusters' own feedback into
// their roots this small leaves the assembled root rows meta-dominated, which
// is what makes the component spectra carry over to the global matrix. With
// generic root gains the summed root rows routinely push assembled
// eigenvalues into the left half plane.
constexpr double kClusterRootGain = 1e-3;

ComponentDesign design_component(const Topology& topo, const FormationBasis& basis,
                                 const SpectrumBounds& bounds, const GAParams& ga,
                                 std::uint64_t weight_seed, std::uint64_t ga_seed,
                                 double root_gain, const std::string& what) {
  try {
    ComponentDesign out;
    out.weights = synthesize_weights(topo, basis, weight_seed);
    out.laplacian = build_laplacian(topo, out.weights, basis);
    // the stabilizer search sees the root rows at their assembly gain; the
    // scaling is folded back into the diagonal afterwards, so the stored
    // (L, D) pair reproduces exactly the matrix the search shaped
    std::vector<cplx> row_gain(topo.node_count(), cplx(1.0));
    row_gain[topo.roots().first] = root_gain;
    row_gain[topo.roots().second] = root_gain;
    ComplexLaplacian shaped = out.laplacian;
    shaped.matrix = out.laplacian.matrix.scale_rows(row_gain);
    GAParams local_ga = ga;
    local_ga.seed = ga_seed;
    auto [diag, report] = design_stabilizer(shaped, bounds, local_ga);
    for (int i = 0; i < topo.node_count(); ++i) diag.d[i] *= row_gain[i];
    out.diagonal = std::move(diag);
    out.report = std::move(report);
    out.dl = out.laplacian.matrix.scale_rows(out.diagonal.d);
    out.spectrum = eigenvalues(out.dl);
    return out;
  } catch (const DesignError& e) {
    throw DesignError(what + ": " + e.what());
  } catch (const TopologyError& e) {
    throw TopologyError(what + ": " + e.what());
  } catch (const NumericalError& e) {
    throw NumericalError(what + ": " + e.what());
  } catch (const DomainError& e) {
    throw DomainError(what + ": " + e.what());
  }
}

ComplexMatrix assemble_raw(const CascadeNetwork& c) {
  ComplexMatrix a(c.n, c.n);
  for (const Cluster& cl : c.clusters) {
    const ComplexMatrix& m = cl.design.dl;
    const std::vector<int>& ids = cl.spec.members;
    const int q = static_cast<int>(ids.size());
    for (int r = 0; r < q; ++r)
      for (int cc = 0; cc < q; ++cc) a(ids[r], ids[cc]) += m(r, cc);
  }
  const ComplexMatrix& mm = c.meta.design.dl;
  const int p = static_cast<int>(c.meta.root_ids.size());
  for (int r = 0; r < p; ++r)
    for (int cc = 0; cc < p; ++cc)
      a(c.meta.root_ids[r], c.meta.root_ids[cc]) += mm(r, cc);
  return a;
}

cplx lex_min(cplx a, cplx b) {
  if (a.real() != b.real()) return a.real() < b.real() ? a : b;
  return a.imag() < b.imag() ? a : b;
}

cplx lex_max(cplx a, cplx b) {
  if (a.real() != b.real()) return a.real() > b.real() ? a : b;
  return a.imag() > b.imag() ? a : b;
}

void append_complex(std::ostringstream& os, const cplx& z) {
  os << "[" << z.real() << "," << z.imag() << "]";
}

}  // namespace

CascadeNetwork build_cascade(const Topology& g, const FormationBasis& basis,
                             const CascadeSpec& spec, const SpectrumBounds& bounds,
                             const GAParams& ga) {
  basis.validate();
  const int n = g.node_count();
  if (basis.size() != n)
    throw DomainError("basis length does not match node count");
  const int p = static_cast<int>(spec.clusters.size());
  if (p < 2)
    throw StructureError("cascade needs at least 2 clusters, got " +
                         std::to_string(p));

  // membership and per-cluster sanity
  std::vector<std::vector<int>> clusters_of(n);
  for (int ci = 0; ci < p; ++ci) {
    const ClusterSpec& cs = spec.clusters[ci];
    if (cs.members.size() < 3)
      throw StructureError("cluster " + std::to_string(ci) +
                           " has fewer than 3 members");
    std::set<int> seen;
    for (int v : cs.members) {
      if (v < 0 || v >= n)
        throw StructureError("cluster " + std::to_string(ci) +
                             " references invalid node " + std::to_string(v));
      if (!seen.insert(v).second)
        throw StructureError("cluster " + std::to_string(ci) +
                             " lists node " + std::to_string(v) + " twice");
      clusters_of[v].push_back(ci);
    }
    if (cs.roots.first == cs.roots.second || !seen.count(cs.roots.first) ||
        !seen.count(cs.roots.second))
      throw StructureError("cluster " + std::to_string(ci) +
                           " needs two distinct member roots");
  }
  auto is_root_of = [&](int v, int ci) {
    const ClusterSpec& cs = spec.clusters[ci];
    return v == cs.roots.first || v == cs.roots.second;
  };
  for (int v = 0; v < n; ++v) {
    if (clusters_of[v].empty())
      throw StructureError("node " + std::to_string(v) +
                           " is not covered by any cluster");
    if (clusters_of[v].size() > 1) {
      for (int ci : clusters_of[v]) {
        if (!is_root_of(v, ci))
          throw StructureError("node " + std::to_string(v) +
                               " is shared between clusters but is a follower of "
                               "cluster " + std::to_string(ci));
      }
    }
  }

  // meta node set: deduplicated cluster roots in first-appearance order
  std::vector<int> root_ids;
  std::map<int, int> meta_index;
  for (const ClusterSpec& cs : spec.clusters) {
    for (int r : {cs.roots.first, cs.roots.second}) {
      if (!meta_index.count(r)) {
        meta_index[r] = static_cast<int>(root_ids.size());
        root_ids.push_back(r);
      }
    }
  }
  if (root_ids.size() < 3)
    throw StructureError("meta-cluster needs at least 3 distinct roots, got " +
                         std::to_string(root_ids.size()));

  std::set<std::pair<int, int>> meta_edge_set;
  for (auto [a, b] : spec.meta_edges) {
    if (!meta_index.count(a) || !meta_index.count(b))
      throw StructureError("meta edge " + edge_name(a, b) +
                           " must connect cluster roots");
    if (!g.has_edge(a, b))
      throw StructureError("meta edge " + edge_name(a, b) +
                           " does not exist in the communication graph");
    if (a > b) std::swap(a, b);
    meta_edge_set.insert({a, b});
  }
  if (!meta_index.count(spec.meta_roots.first) ||
      !meta_index.count(spec.meta_roots.second) ||
      spec.meta_roots.first == spec.meta_roots.second)
    throw StructureError("meta roots must be two distinct cluster roots");

  // every physical edge must be intra-cluster or a declared meta edge;
  // followers may only connect inside their own cluster
  for (const auto& [a, b] : g.edges()) {
    bool common_cluster = false;
    for (int ci : clusters_of[a]) {
      for (int cj : clusters_of[b]) {
        if (ci == cj) common_cluster = true;
      }
    }
    if (common_cluster) continue;
    if (meta_edge_set.count({std::min(a, b), std::max(a, b)})) continue;
    throw StructureError(
        "edge " + edge_name(a, b) +
        " crosses cluster boundaries without being a meta edge; followers may "
        "only connect within their own cluster");
  }

  // local topologies and bases first, so structural problems surface before
  // any design work starts
  std::vector<Cluster> clusters;
  clusters.reserve(p);
  std::vector<std::vector<cplx>> norm_bases(p);
  for (int ci = 0; ci < p; ++ci) {
    const ClusterSpec& cs = spec.clusters[ci];
    std::map<int, int> local;
    for (size_t k = 0; k < cs.members.size(); ++k)
      local[cs.members[k]] = static_cast<int>(k);
    std::vector<std::pair<int, int>> local_edges;
    for (const auto& [a, b] : g.edges()) {
      const auto ia = local.find(a);
      const auto ib = local.find(b);
      if (ia != local.end() && ib != local.end())
        local_edges.push_back({ia->second, ib->second});
    }
    Topology topo(static_cast<int>(cs.members.size()), std::move(local_edges),
                  {local[cs.roots.first], local[cs.roots.second]});
    if (!is_two_rooted(topo))
      throw TopologyError("cluster " + std::to_string(ci) +
                          " is not 2-rooted for its declared root pair");
    for (int k = 0; k < topo.node_count(); ++k) {
      if (topo.degree(k) < 2)
        throw TopologyError("cluster " + std::to_string(ci) + ": member " +
                            std::to_string(cs.members[k]) +
                            " has local degree < 2");
    }
    FormationBasis lb;
    for (int v : cs.members) lb.xi.push_back(basis.xi[v]);
    norm_bases[ci] = normalized_basis(lb, topo.roots().first, topo.roots().second);
    clusters.push_back(Cluster{cs, std::move(topo), std::move(lb), {}});
  }

  std::vector<std::pair<int, int>> meta_local_edges;
  for (const auto& [a, b] : meta_edge_set)
    meta_local_edges.push_back({meta_index.at(a), meta_index.at(b)});
  Topology meta_topo(static_cast<int>(root_ids.size()), std::move(meta_local_edges),
                     {meta_index.at(spec.meta_roots.first),
                      meta_index.at(spec.meta_roots.second)});
  if (!is_two_rooted(meta_topo))
    throw TopologyError("meta-cluster is not 2-rooted for the declared co-leaders");

  for (int ci = 0; ci < p; ++ci) {
    Cluster& cl = clusters[ci];
    int reuse = -1;
    for (int cj = 0; cj < ci && reuse < 0; ++cj) {
      const Cluster& other = clusters[cj];
      if (other.spec.members.size() != cl.spec.members.size()) continue;
      if (other.local_topology.edges() != cl.local_topology.edges()) continue;
      if (other.local_topology.roots() != cl.local_topology.roots()) continue;
      if (!bases_match(norm_bases[cj], norm_bases[ci])) continue;
      // shared design must still annihilate this cluster's own basis
      const ComplexMatrix& dl = other.design.dl;
      const auto [r1, rx] = kernel_residuals(dl, cl.local_basis.xi);
      const double tol = 1e-9 * dl.frobenius_norm();
      if (r1 <= tol && rx <= tol) reuse = cj;
    }
    if (reuse >= 0) {
      cl.design = clusters[reuse].design;
      cl.design.reused_from = reuse;
    } else {
      cl.design = design_component(
          cl.local_topology, cl.local_basis, bounds, ga,
          derive_seed(ga.seed, 101 + static_cast<std::uint64_t>(ci)),
          derive_seed(ga.seed, 201 + static_cast<std::uint64_t>(ci)),
          kClusterRootGain, "cluster " + std::to_string(ci));
    }
  }

  FormationBasis meta_basis;
  for (int r : root_ids) meta_basis.xi.push_back(basis.xi[r]);

  MetaCluster meta{root_ids, std::move(meta_topo), std::move(meta_basis), {}};
  // the meta-cluster tops the hierarchy; its own root rows stay at full gain
  meta.design = design_component(meta.topology, meta.basis, bounds, ga,
                                 derive_seed(ga.seed, 100),
                                 derive_seed(ga.seed, 200), 1.0, "meta-cluster");

  return CascadeNetwork{n, basis, g, std::move(clusters), std::move(meta),
                        ComplexMatrix{}, false};
}

ComplexMatrix assemble(CascadeNetwork& c) {
  for (const Cluster& cl : c.clusters) {
    if (cl.design.dl.rows() == 0)
      throw DomainError("assemble requires completed cluster designs");
  }
  if (c.meta.design.dl.rows() == 0)
    throw DomainError("assemble requires a completed meta-cluster design");

  ComplexMatrix a = assemble_raw(c);
  const auto [r1, rx] = kernel_residuals(a, c.global_basis.xi);
  const double tol = 1e-9 * a.frobenius_norm();
  const int rank = numerical_rank(a);
  if (r1 > tol || rx > tol || rank != c.n - 2) {
    std::ostringstream msg;
    msg << "assembled matrix fails the kernel/rank conditions: ||A*1||=" << r1
        << ", ||A*xi||=" << rx << " (tol " << tol << "), rank " << rank
        << " (expected " << c.n - 2 << ")";
    throw AssemblyError(msg.str());
  }
  c.assembled = a;
  c.has_assembled = true;
  return a;
}

CascadeMetrics cascade_metrics(const CascadeNetwork& c) {
  if (!c.has_assembled)
    throw DomainError("cascade metrics need an assembled network");
  const Spectrum global = eigenvalues(c.assembled);
  if (global.zero_count != 2)
    throw SpectralStructureError(
        "assembled spectrum has " + std::to_string(global.zero_count) +
        " structural zeros, expected 2");
  CascadeMetrics m;
  std::tie(m.lambda_a, m.lambda_max) = connectivity_metrics(global);

  bool first = true;
  for (const Cluster& cl : c.clusters) {
    const auto [la, lmax] = connectivity_metrics(cl.design.spectrum);
    if (first) {
      m.formula_lambda_a = la;
      m.formula_lambda_max = lmax;
      first = false;
    } else {
      m.formula_lambda_a = lex_min(m.formula_lambda_a, la);
      m.formula_lambda_max = lex_max(m.formula_lambda_max, lmax);
    }
  }
  const auto [la, lmax] = connectivity_metrics(c.meta.design.spectrum);
  m.formula_lambda_a = lex_min(m.formula_lambda_a, la);
  m.formula_lambda_max = lex_max(m.formula_lambda_max, lmax);
  m.gap_a = std::abs(m.lambda_a - m.formula_lambda_a);
  m.gap_max = std::abs(m.lambda_max - m.formula_lambda_max);
  return m;
}

DecouplingReport decoupling_experiment(const CascadeNetwork& c, int target_cluster,
                                       double perturbation) {
  if (!c.has_assembled)
    throw DomainError("decoupling experiment needs an assembled network");
  if (target_cluster < 0 || target_cluster >= static_cast<int>(c.clusters.size()))
    throw DomainError("target cluster index out of range: " +
                      std::to_string(target_cluster));
  const Cluster& target = c.clusters[target_cluster];

  // perturb a directed weight owned by a follower row, lowest indices first
  std::pair<int, int> edge{-1, -1};
  for (const auto& [a, b] : target.local_topology.edges()) {
    if (!target.local_topology.is_root(a)) {
      edge = {a, b};
      break;
    }
    if (!target.local_topology.is_root(b)) {
      edge = {b, a};
      break;
    }
  }
  if (edge.first < 0)
    throw DomainError("target cluster has no follower edge to perturb");

  CascadeNetwork work = c;
  Cluster& cl = work.clusters[target_cluster];
  cl.design.weights.w.at(edge) *= (1.0 + perturbation);
  cl.design.laplacian =
      build_laplacian(cl.local_topology, cl.design.weights, cl.local_basis);
  cl.design.dl = cl.design.laplacian.matrix.scale_rows(cl.design.diagonal.d);
  const ComplexMatrix perturbed_matrix = assemble_raw(work);

  const Spectrum base = eigenvalues(c.assembled);
  const Spectrum pert = eigenvalues(perturbed_matrix);

  DecouplingReport rep;
  rep.target_cluster = target_cluster;
  rep.perturbation = perturbation;
  rep.perturbed_edge = edge;
  rep.baseline = base.eigenvalues;
  const int n = static_cast<int>(base.eigenvalues.size());
  std::vector<bool> used(n, false);
  for (int i = 0; i < n; ++i) {
    int best = -1;
    double best_dist = 0.0;
    for (int j = 0; j < n; ++j) {
      if (used[j]) continue;
      const double dist = std::abs(pert.eigenvalues[j] - base.eigenvalues[i]);
      if (best < 0 || dist < best_dist) {
        best = j;
        best_dist = dist;
      }
    }
    used[best] = true;
    rep.perturbed.push_back(pert.eigenvalues[best]);
    rep.drift.push_back(best_dist);
    rep.moved.push_back(best_dist > 1e-9);
  }
  return rep;
}

std::string CascadeMetrics::to_json() const {
  std::ostringstream os;
  os.precision(17);
  os << "{\"formula_lambda_a\":";
  append_complex(os, formula_lambda_a);
  os << ",\"formula_lambda_max\":";
  append_complex(os, formula_lambda_max);
  os << ",\"gap_a\":" << gap_a << ",\"gap_max\":" << gap_max << ",\"lambda_a\":";
  append_complex(os, lambda_a);
  os << ",\"lambda_max\":";
  append_complex(os, lambda_max);
  os << "}";
  return os.str();
}

std::string DecouplingReport::to_json() const {
  std::ostringstream os;
  os.precision(17);
  os << "{\"eigenvalues\":[";
  for (size_t i = 0; i < baseline.size(); ++i) {
    if (i) os << ",";
    os << "{\"baseline\":";
    append_complex(os, baseline[i]);
    os << ",\"drift\":" << drift[i] << ",\"moved\":" << (moved[i] ? "true" : "false")
       << ",\"perturbed\":";
    append_complex(os, perturbed[i]);
    os << "}";
  }
  os << "],\"perturbation\":" << perturbation << ",\"perturbed_edge\":["
     << perturbed_edge.first << "," << perturbed_edge.second
     << "],\"target_cluster\":" << target_cluster << "}";
  return os.str();
}

std::string matrix_to_text(const ComplexMatrix& m) {
  std::string out;
  char buf[64];
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) {
      if (j) out += ' ';
      std::snprintf(buf, sizeof(buf), "%.17g,%.17g", m(i, j).real(), m(i, j).imag());
      out += buf;
    }
    out += '\n';
  }
  return out;
}

}  // namespace clf
