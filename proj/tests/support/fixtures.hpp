#pragma once

#include <algorithm>
#include <random>
#include <vector>

#include "berrt/graph.hpp"
#include "berrt/world.hpp"

namespace berrt::fixture {

struct Instance {
  VertexStore vs;
  std::vector<Edge> edges;
  CsrGraph csr;
};

/// Three vertices: 0 root (g 0), 1 (g 5, parent 0), 2 (g 12, parent 1), with
/// symmetric edges 0-1 cost 5, 1-2 cost 7, 0-2 cost 6. h is zero.
inline Instance three_vertex() {
  Instance in;
  in.vs.add_vertex({0, 0}, 0.0, 0.0);
  in.vs.add_vertex({5, 0}, 5.0, 0.0, 0);
  in.vs.add_vertex({6, 0}, 12.0, 0.0, 1);
  in.edges = {{0, 1, 5}, {1, 0, 5}, {1, 2, 7}, {2, 1, 7}, {0, 2, 6}, {2, 0, 6}};
  in.csr = rebuild_csr(CsrGraph{}, in.edges, 3);
  return in;
}

/// Random geometric graph in the unit square: vertex 0 is the root (g 0),
/// vertex 1 the goal (h 0); every other vertex starts unreached (g +inf, no
/// parent). Pairs closer than `radius` are joined in both directions with
/// Euclidean cost; h is the distance to the goal.
inline Instance random_geometric(std::mt19937_64& gen, std::size_t n, double radius) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Instance in;
  std::vector<State> pts(n);
  for (auto& p : pts) p = {u(gen), u(gen)};
  for (std::size_t i = 0; i < n; ++i) {
    in.vs.add_vertex(pts[i], i == 0 ? 0.0 : kInfinity, cost(pts[i], pts[1]));
  }
  for (VertexId i = 0; i < n; ++i) {
    for (VertexId j = i + 1; j < n; ++j) {
      const double c = cost(pts[i], pts[j]);
      if (c > radius) continue;
      in.edges.push_back({i, j, c});
      in.edges.push_back({j, i, c});
    }
  }
  in.csr = rebuild_csr(CsrGraph{}, in.edges, n);
  return in;
}

/// Random policy tree over n vertices (parent of v drawn below v) with
/// symmetric tree edges of random cost plus `extra` random symmetric non-tree
/// edges. g is garbage (stale) except g(root) = 0; h is zero.
inline Instance random_tree(std::mt19937_64& gen, std::size_t n, std::size_t extra) {
  std::uniform_real_distribution<double> c(0.1, 2.0);
  Instance in;
  in.vs.add_vertex({0, 0}, 0.0, 0.0);
  std::vector<std::vector<bool>> used;
  for (VertexId v = 1; v < n; ++v) {
    const VertexId p = static_cast<VertexId>(gen() % v);
    in.vs.add_vertex({static_cast<double>(v), 0}, 1e9, 0.0, p);
    const double w = c(gen);
    in.edges.push_back({p, v, w});
    in.edges.push_back({v, p, w});
  }
  std::vector<std::pair<VertexId, VertexId>> seen;
  for (const Edge& e : in.edges) seen.push_back({e.src, e.dst});
  std::sort(seen.begin(), seen.end());
  for (std::size_t k = 0; k < extra; ++k) {
    const VertexId a = static_cast<VertexId>(gen() % n), b = static_cast<VertexId>(gen() % n);
    if (a == b || std::binary_search(seen.begin(), seen.end(), std::pair{a, b})) continue;
    seen.insert(std::lower_bound(seen.begin(), seen.end(), std::pair{a, b}), {a, b});
    seen.insert(std::lower_bound(seen.begin(), seen.end(), std::pair{b, a}), {b, a});
    const double w = c(gen);
    in.edges.push_back({a, b, w});
    in.edges.push_back({b, a, w});
  }
  in.csr = rebuild_csr(CsrGraph{}, in.edges, n);
  return in;
}

}  // namespace berrt::fixture
