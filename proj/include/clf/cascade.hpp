#pragma once

#include <string>
#include <utility>
#include <vector>

#include "clf/stabilizer.hpp"

namespace clf {

struct ClusterSpec {
  std::vector<int> members;      // global node ids, q >= 3
  std::pair<int, int> roots;     // global ids, must be members
};

struct CascadeSpec {
  std::vector<ClusterSpec> clusters;
  std::vector<std::pair<int, int>> meta_edges;  // global ids of roots
  std::pair<int, int> meta_roots;               // the network co-leaders
};

/// A designed component: local Laplacian, its weights (kept for perturbation
/// experiments), stabilizing diagonal and the resulting local DL spectrum.
struct ComponentDesign {
  ComplexLaplacian laplacian;
  EdgeWeights weights;
  StabilizerDiagonal diagonal;
  ComplexMatrix dl;
  Spectrum spectrum;
  DesignReport report;
  int reused_from = -1;  // index of the cluster whose design was shared
};

struct Cluster {
  ClusterSpec spec;
  Topology local_topology;   // induced subgraph over members (local indices)
  FormationBasis local_basis;
  ComponentDesign design;
};

struct MetaCluster {
  std::vector<int> root_ids;  // deduplicated cluster roots, global ids
  Topology topology;          // meta edges over local indices
  FormationBasis basis;
  ComponentDesign design;
};

struct CascadeNetwork {
  int n = 0;
  FormationBasis global_basis;
  Topology global_topology;  // union of intra-cluster and meta edges
  std::vector<Cluster> clusters;
  MetaCluster meta;
  ComplexMatrix assembled;  // global DL once assemble() has run
  bool has_assembled = false;
};

struct CascadeMetrics {
  cplx lambda_a;          // from the assembled global spectrum
  cplx lambda_max;
  cplx formula_lambda_a;  // min over component lambda_a values
  cplx formula_lambda_max;
  double gap_a = 0.0;     // |assembled - formula|
  double gap_max = 0.0;

  std::string to_json() const;
};

struct DecouplingReport {
  int target_cluster = -1;
  double perturbation = 0.0;
  std::pair<int, int> perturbed_edge;  // local indices within the cluster
  std::vector<cplx> baseline;
  std::vector<cplx> perturbed;   // greedily matched to baseline order
  std::vector<double> drift;
  std::vector<bool> moved;       // drift above 1e-9

  std::string to_json() const;
};

/// Validates the partition (coverage, root sharing, the roots-only coupling
/// rule, per-component 2-rootedness), then synthesizes weights and designs a
/// stabilizing diagonal independently per cluster and for the meta-cluster.
/// Isomorphic clusters whose local bases agree after root-pair normalization
/// share one design. Component seeds derive from ga.seed.
CascadeNetwork build_cascade(const Topology& g, const FormationBasis& basis,
                             const CascadeSpec& spec, const SpectrumBounds& bounds,
                             const GAParams& ga);

/// Assembles the global DL: follower rows embed their cluster's row; each
/// root row sums the root rows of every adjacent cluster plus the meta row.
/// Checks the kernel and rank postconditions and stores the matrix in the
/// network.
ComplexMatrix assemble(CascadeNetwork& c);

CascadeMetrics cascade_metrics(const CascadeNetwork& c);

/// Scales one intra-cluster weight of the target cluster by (1 + perturbation)
/// and reports the per-eigenvalue drift of the re-assembled global spectrum.
DecouplingReport decoupling_experiment(const CascadeNetwork& c, int target_cluster,
                                       double perturbation);

/// Plain-text export: one row per line, entries as "re,im" separated by
/// single spaces.
std::string matrix_to_text(const ComplexMatrix& m);

}  // namespace clf
