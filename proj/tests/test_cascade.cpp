#include <doctest.h>

#include <cmath>

#include "clf/cascade.hpp"
#include "oracles.hpp"

using clf::cplx;
using clf::CascadeNetwork;
using clf::CascadeSpec;
using clf::ClusterSpec;
using clf::FormationBasis;
using clf::Topology;

namespace {

// two 4-cycles sharing node 3, meta triangle over {0, 3, 6}
Topology toy_topology() {
  return Topology(7,
                  {{0, 1}, {1, 2}, {2, 3}, {0, 3},            // cluster A
                   {3, 4}, {4, 5}, {5, 6}, {3, 6},            // cluster B
                   {0, 6}},                                   // meta-only link
                  {0, 6});
}

FormationBasis toy_basis() {
  return FormationBasis{{cplx(0, 0), cplx(1, 0), cplx(1, 1), cplx(0, 1),
                         cplx(-1, 1), cplx(-1, 2), cplx(0.5, 2)}};
}

CascadeSpec toy_spec() {
  CascadeSpec spec;
  spec.clusters = {ClusterSpec{{0, 1, 2, 3}, {0, 3}},
                   ClusterSpec{{3, 4, 5, 6}, {3, 6}}};
  spec.meta_edges = {{0, 3}, {3, 6}, {0, 6}};
  spec.meta_roots = {0, 6};
  return spec;
}

clf::GAParams toy_ga(std::uint64_t seed = 5) {
  clf::GAParams ga;
  ga.seed = seed;
  ga.generations = 60;
  return ga;
}

CascadeNetwork toy_network(std::uint64_t seed = 5) {
  CascadeNetwork net = clf::build_cascade(toy_topology(), toy_basis(), toy_spec(),
                                          clf::SpectrumBounds{0.5, 20.0}, toy_ga(seed));
  clf::assemble(net);
  return net;
}

}  // namespace

TEST_CASE("toy cascade builds and assembles") {
  const CascadeNetwork net = toy_network();
  CHECK(net.n == 7);
  CHECK(net.clusters.size() == 2);
  CHECK(net.meta.root_ids == std::vector<int>{0, 3, 6});

  const auto [r1, rx] = clf::kernel_residuals(net.assembled, toy_basis().xi);
  const double tol = 1e-9 * net.assembled.frobenius_norm();
  CHECK(r1 <= tol);
  CHECK(rx <= tol);
  CHECK(clf::numerical_rank(net.assembled) == 5);
  CHECK(oracle::rank_full_pivot(net.assembled) == 5);

  // shared root 3 sums contributions from both clusters plus the meta row
  const clf::Spectrum global = clf::eigenvalues(net.assembled);
  CHECK(global.zero_count == 2);
  for (int i = 0; i < 7; ++i) {
    if (global.is_structural_zero(i)) continue;
    CHECK(global.eigenvalues[i].real() > 0.0);
  }
}

TEST_CASE("cascade metrics report both routes") {
  const CascadeNetwork net = toy_network();
  const clf::CascadeMetrics m = clf::cascade_metrics(net);
  CHECK(std::isfinite(m.lambda_a.real()));
  CHECK(m.gap_a == std::abs(m.lambda_a - m.formula_lambda_a));
  CHECK(m.gap_max == std::abs(m.lambda_max - m.formula_lambda_max));
  // the component formula is the min/max over cluster and meta values
  std::vector<cplx> las, lmaxs;
  for (const auto& cl : net.clusters) {
    const auto [la, lm] = clf::connectivity_metrics(cl.design.spectrum);
    las.push_back(la);
    lmaxs.push_back(lm);
  }
  const auto [mla, mlm] = clf::connectivity_metrics(net.meta.design.spectrum);
  las.push_back(mla);
  lmaxs.push_back(mlm);
  double min_re = 1e300, max_re = -1e300;
  for (const cplx& z : las) min_re = std::min(min_re, z.real());
  for (const cplx& z : lmaxs) max_re = std::max(max_re, z.real());
  CHECK(m.formula_lambda_a.real() == min_re);
  CHECK(m.formula_lambda_max.real() == max_re);

  const std::string js = m.to_json();
  CHECK(js.find("formula_lambda_a") != std::string::npos);
  CHECK(js.find("gap_a") != std::string::npos);
}

TEST_CASE("identical clusters share one design") {
  // two congruent squares: cluster B is cluster A translated by 5
  const Topology g(7,
                   {{0, 1}, {1, 2}, {2, 3}, {0, 3},
                    {3, 4}, {4, 5}, {5, 6}, {3, 6},
                    {0, 6}},
                   {0, 6});
  FormationBasis basis;
  basis.xi = {cplx(0, 0), cplx(1, 0), cplx(1, 1), cplx(0, 1)};
  // members of B in order {3,4,5,6} must be an affine image of {0,1,2,3}
  const cplx alpha(0.7, 0.2);
  for (int k = 1; k < 4; ++k)
    basis.xi.push_back(basis.xi[3] + alpha * (basis.xi[k] - basis.xi[0]));
  CascadeSpec spec;
  spec.clusters = {ClusterSpec{{0, 1, 2, 3}, {0, 3}},
                   ClusterSpec{{3, 4, 5, 6}, {3, 6}}};
  spec.meta_edges = {{0, 3}, {3, 6}, {0, 6}};
  spec.meta_roots = {0, 6};
  CascadeNetwork net =
      clf::build_cascade(g, basis, spec, clf::SpectrumBounds{0.5, 20.0}, toy_ga());
  CHECK(net.clusters[0].design.reused_from == -1);
  CHECK(net.clusters[1].design.reused_from == 0);
  CHECK(net.clusters[1].design.diagonal.d == net.clusters[0].design.diagonal.d);
  clf::assemble(net);
  const auto [r1, rx] = clf::kernel_residuals(net.assembled, basis.xi);
  CHECK(rx <= 1e-9 * net.assembled.frobenius_norm());
  CHECK(clf::numerical_rank(net.assembled) == 5);
}

TEST_CASE("structure violations are rejected") {
  const FormationBasis basis = toy_basis();
  // follower 1 of cluster A linked to follower 4 of cluster B
  Topology crossed(7,
                   {{0, 1}, {1, 2}, {2, 3}, {0, 3}, {3, 4}, {4, 5}, {5, 6},
                    {3, 6}, {0, 6}, {1, 4}},
                   {0, 6});
  CHECK_THROWS_AS(clf::build_cascade(crossed, basis, toy_spec(),
                                     clf::SpectrumBounds{0.5, 20.0}, toy_ga()),
                  clf::StructureError);

  // node not covered by any cluster
  CascadeSpec uncovered = toy_spec();
  uncovered.clusters[1].members = {3, 4, 6};
  uncovered.clusters[1].roots = {3, 6};
  CHECK_THROWS_AS(clf::build_cascade(toy_topology(), basis, uncovered,
                                     clf::SpectrumBounds{0.5, 20.0}, toy_ga()),
                  clf::StructureError);

  // shared node that is a follower on one side
  CascadeSpec bad_share = toy_spec();
  bad_share.clusters[1].members = {2, 3, 4, 5, 6};
  bad_share.clusters[1].roots = {3, 6};
  CHECK_THROWS_AS(clf::build_cascade(toy_topology(), basis, bad_share,
                                     clf::SpectrumBounds{0.5, 20.0}, toy_ga()),
                  clf::StructureError);

  // single cluster cannot form a cascade
  CascadeSpec single;
  single.clusters = {ClusterSpec{{0, 1, 2, 3, 4, 5, 6}, {0, 6}}};
  single.meta_edges = {};
  single.meta_roots = {0, 6};
  CHECK_THROWS_AS(clf::build_cascade(toy_topology(), basis, single,
                                     clf::SpectrumBounds{0.5, 20.0}, toy_ga()),
                  clf::StructureError);

  // a meta edge with no physical link
  CascadeSpec phantom = toy_spec();
  phantom.meta_edges.push_back({1, 6});
  CHECK_THROWS_AS(clf::build_cascade(toy_topology(), basis, phantom,
                                     clf::SpectrumBounds{0.5, 20.0}, toy_ga()),
                  clf::StructureError);
}

TEST_CASE("non-2-rooted cluster is a topology error") {
  // cluster B loses edge 3-6, leaving its root pair with a cut vertex
  Topology weak(7,
                {{0, 1}, {1, 2}, {2, 3}, {0, 3}, {3, 4}, {4, 5}, {5, 6}, {0, 6},
                 {4, 6}},
                {0, 6});
  CascadeSpec spec = toy_spec();
  spec.meta_edges = {{0, 3}, {0, 6}};
  // meta needs the 3-6 link; use a 2-rooted meta over {0,3,6} via 0-3, 0-6 is
  // a path, so keep the triangle but drop the cluster edge instead:
  // cluster B topology here is the path 3-4-5-6 plus chord 4-6.
  CHECK_THROWS_AS(
      clf::build_cascade(weak, toy_basis(), spec, clf::SpectrumBounds{0.5, 20.0},
                         toy_ga()),
      clf::Error);
}

TEST_CASE("zeroed cluster design breaks assembly") {
  CascadeNetwork net = toy_network();
  for (auto& z : net.clusters[0].design.dl.data()) z = cplx(0.0);
  CHECK_THROWS_AS(clf::assemble(net), clf::AssemblyError);
}

TEST_CASE("decoupling experiment") {
  const CascadeNetwork net = toy_network();

  const clf::DecouplingReport zero = clf::decoupling_experiment(net, 0, 0.0);
  for (double d : zero.drift) CHECK(d == 0.0);
  for (bool m : zero.moved) CHECK_FALSE(m);

  const clf::DecouplingReport ten = clf::decoupling_experiment(net, 0, 0.1);
  const clf::DecouplingReport ten2 = clf::decoupling_experiment(net, 0, 0.1);
  CHECK(ten.drift == ten2.drift);  // deterministic rerun
  bool any_moved = false;
  for (bool m : ten.moved) any_moved = any_moved || m;
  CHECK(any_moved);
  // the kernel zeros stay pinned: ones vector row sums survive the
  // perturbation, so at least one eigenvalue should stay put
  CHECK(ten.baseline.size() == 7);

  CHECK_THROWS_AS(clf::decoupling_experiment(net, 5, 0.1), clf::DomainError);
  const std::string js = ten.to_json();
  CHECK(js.find("\"target_cluster\":0") != std::string::npos);
  CHECK(js.find("perturbed_edge") != std::string::npos);
}

TEST_CASE("matrix text export") {
  clf::ComplexMatrix m(2, 2);
  m(0, 0) = cplx(1.5, -2.0);
  m(1, 1) = cplx(0.0, 3.25);
  const std::string text = clf::matrix_to_text(m);
  CHECK(text == "1.5,-2 0,0\n0,0 0,3.25\n");
}
