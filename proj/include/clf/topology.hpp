#pragma once

#include <set>
#include <utility>
#include <vector>

#include "clf/errors.hpp"

namespace clf {

/// Bidirectional interaction graph with two designated root nodes.
///
/// Node ids are contiguous integers 0..n-1. Edges are undirected; adjacency
/// is symmetric by construction. Degree-1 nodes are representable (needed to
/// express graphs that fail the 2-rooted test); weight synthesis rejects them
/// later because every Laplacian row needs at least two neighbor terms.
class Topology {
 public:
  Topology() = default;  // empty placeholder; any real graph needs n >= 3
  Topology(int n, std::vector<std::pair<int, int>> edges, std::pair<int, int> roots);

  int node_count() const { return n_; }
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }
  std::pair<int, int> roots() const { return roots_; }

  const std::vector<int>& neighbors(int i) const;
  int degree(int i) const;
  int min_degree() const;
  bool has_edge(int i, int j) const;
  bool is_root(int i) const { return i == roots_.first || i == roots_.second; }

 private:
  int n_ = 0;
  std::vector<std::pair<int, int>> edges_;  // normalized (i < j), sorted, unique
  std::pair<int, int> roots_{-1, -1};
  std::vector<std::vector<int>> adjacency_;  // sorted neighbor lists
};

/// True iff node v can still be reached from every surviving node of u_set
/// after removing any single node other than v (removed source nodes are
/// excused). Requires |u_set| >= 2 and v not in u_set.
bool is_two_reachable(const Topology& g, const std::set<int>& u_set, int v);

/// True iff every non-root node is 2-reachable from the declared root pair.
bool is_two_rooted(const Topology& g);

}  // namespace clf
