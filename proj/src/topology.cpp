#include "clf/topology.hpp"

#include <algorithm>
#include <queue>
#include <string>

namespace clf {

Topology::Topology(int n, std::vector<std::pair<int, int>> edges,
                   std::pair<int, int> roots)
    : n_(n), roots_(roots) {
  if (n < 3) throw DomainError("topology needs at least 3 nodes, got " + std::to_string(n));
  auto check_node = [n](int v, const char* what) {
    if (v < 0 || v >= n)
      throw DomainError(std::string(what) + " node id out of range: " + std::to_string(v));
  };
  for (auto& [a, b] : edges) {
    check_node(a, "edge");
    check_node(b, "edge");
    if (a == b) throw DomainError("self-loop at node " + std::to_string(a));
    if (a > b) std::swap(a, b);
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  edges_ = std::move(edges);

  check_node(roots_.first, "root");
  check_node(roots_.second, "root");
  if (roots_.first == roots_.second)
    throw DomainError("roots must be two distinct nodes");

  adjacency_.assign(n_, {});
  for (const auto& [a, b] : edges_) {
    adjacency_[a].push_back(b);
    adjacency_[b].push_back(a);
  }
  for (auto& nbrs : adjacency_) std::sort(nbrs.begin(), nbrs.end());
}

const std::vector<int>& Topology::neighbors(int i) const {
  if (i < 0 || i >= n_)
    throw DomainError("invalid node id: " + std::to_string(i));
  return adjacency_[i];
}

int Topology::degree(int i) const { return static_cast<int>(neighbors(i).size()); }

int Topology::min_degree() const {
  int d = n_;
  for (int i = 0; i < n_; ++i) d = std::min(d, static_cast<int>(adjacency_[i].size()));
  return d;
}

bool Topology::has_edge(int i, int j) const {
  if (i == j) return false;
  const auto& nbrs = neighbors(i);
  return std::binary_search(nbrs.begin(), nbrs.end(), j);
}

namespace {

// BFS over the graph minus `removed`, starting from `start`.
std::vector<char> reachable_from(const Topology& g, int start, int removed) {
  std::vector<char> seen(g.node_count(), 0);
  if (start == removed) return seen;
  std::queue<int> q;
  seen[start] = 1;
  q.push(start);
  while (!q.empty()) {
    int v = q.front();
    q.pop();
    for (int w : g.neighbors(v)) {
      if (w == removed || seen[w]) continue;
      seen[w] = 1;
      q.push(w);
    }
  }
  return seen;
}

}  // namespace

bool is_two_reachable(const Topology& g, const std::set<int>& u_set, int v) {
  if (u_set.size() < 2)
    throw DomainError("2-reachability requires a non-singleton source set");
  if (v < 0 || v >= g.node_count())
    throw DomainError("invalid node id: " + std::to_string(v));
  if (u_set.count(v)) throw DomainError("target node must not be in the source set");
  for (int u : u_set) {
    if (u < 0 || u >= g.node_count())
      throw DomainError("invalid node id in source set: " + std::to_string(u));
  }
  // v must stay reachable from every surviving source node, whichever single
  // node is eliminated; the graph is undirected, so one search from v per
  // removal suffices.
  for (int w = 0; w < g.node_count(); ++w) {
    if (w == v) continue;
    const std::vector<char> seen = reachable_from(g, v, w);
    for (int u : u_set) {
      if (u == w) continue;
      if (!seen[u]) return false;
    }
  }
  return true;
}

bool is_two_rooted(const Topology& g) {
  const std::set<int> roots = {g.roots().first, g.roots().second};
  for (int v = 0; v < g.node_count(); ++v) {
    if (roots.count(v)) continue;
    if (!is_two_reachable(g, roots, v)) return false;
  }
  return true;
}

}  // namespace clf
