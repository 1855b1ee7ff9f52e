#include "berrt/exploitation.hpp"

#include <algorithm>
#include <chrono>
#include <string>

namespace berrt {

ImproveResult improve_serial(const CsrGraph& csr, VertexStore& vs,
                             std::span<const VertexId> work) {
  ImproveResult result;
  for (VertexId v : work) {
    const auto step = detail::improve_vertex(csr, vs, v);
    if (step.changed) {
      vs.parent[v] = step.parent;
      ++result.parents_changed;
    }
    result.delta_g = std::max(result.delta_g, step.delta);
  }
  return result;
}

EvaluateResult evaluate_serial(const CsrGraph& csr, VertexStore& vs,
                               std::span<const VertexId> previous,
                               VertexId root, VertexId goal, bool validate) {
  for (VertexId v : previous) vs.promising[v] = 0;
  const double threshold = vs.g[goal];

  EvaluateResult result;
  std::vector<VertexId> queue{root};
  std::vector<std::uint8_t> seen;
  if (validate) {
    seen.assign(vs.size(), 0);
    seen[root] = 1;
  }
  std::size_t head = 0;
  std::size_t level_end = 1;
  while (head < queue.size()) {
    const VertexId v = queue[head++];
    const bool parent_passes = vs.g[v] + vs.h[v] < threshold;
    const auto row = csr.row(v);
    for (std::size_t k = 0; k < row.size(); ++k) {
      const VertexId n = row.targets[k];
      if (vs.parent[n] != v) continue;
      vs.g[n] = row.costs[k] + vs.g[v];
      ++result.visited;
      const bool passes = kPromisingTest == PromisingTest::kChild
                              ? vs.g[n] + vs.h[n] < threshold
                              : parent_passes;
      if (!passes) continue;
      if (validate) {
        if (seen[n]) {
          throw GraphCorruptionError("policy tree reaches vertex " +
                                     std::to_string(n) + " twice");
        }
        seen[n] = 1;
      }
      vs.promising[n] = 1;
      queue.push_back(n);
    }
    if (head == level_end) {
      ++result.levels;
      level_end = queue.size();
    }
  }
  result.promising.assign(queue.begin() + 1, queue.end());
  return result;
}

std::vector<VertexId> collect_boundary_serial(const CsrGraph& csr,
                                              const VertexStore& vs,
                                              std::span<const VertexId> promising,
                                              VertexId root, VertexId goal) {
  std::vector<VertexId> out;
  auto scan = [&](VertexId v) {
    const double gv = vs.g[v];
    const auto row = csr.row(v);
    for (std::size_t k = 0; k < row.size(); ++k) {
      const VertexId n = row.targets[k];
      if (vs.promising[n] || n == root || n == goal) continue;
      if (row.costs[k] + gv < vs.g[n]) out.push_back(n);
    }
  };
  scan(root);
  for (VertexId v : promising) scan(v);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

void refresh_policy_costs(const CsrGraph& csr, VertexStore& vs,
                          std::span<const VertexId> vertices, VertexId root,
                          ReplanWorkspace& ws) {
  if (vertices.empty()) return;
  if (ws.stamp.size() < vs.size()) {
    ws.stamp.resize(vs.size(), 0);
    ws.cost.resize(vs.size(), 0.0);
  }
  if (++ws.epoch == 0) {
    std::fill(ws.stamp.begin(), ws.stamp.end(), 0);
    ws.epoch = 1;
  }
  auto edge_cost = [&](VertexId from, VertexId to) {
    const auto row = csr.row(to);
    const auto it = std::lower_bound(row.targets.begin(), row.targets.end(), from);
    if (it == row.targets.end() || *it != from) {
      throw GraphCorruptionError("policy edge " + std::to_string(from) + " -> " +
                                 std::to_string(to) + " missing from CSR");
    }
    return row.costs[static_cast<std::size_t>(it - row.targets.begin())];
  };

  std::vector<VertexId> chain;
  for (VertexId v : vertices) {
    chain.clear();
    VertexId x = v;
    while (x != root && x != kNoVertex && ws.stamp[x] != ws.epoch) {
      chain.push_back(x);
      x = vs.parent[x];
      if (chain.size() > vs.size()) {
        throw GraphCorruptionError("parent chain does not terminate");
      }
    }
    double acc = x == root ? vs.g[root] : x == kNoVertex ? kInfinity : ws.cost[x];
    for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
      const VertexId y = *it;
      if (acc < kInfinity) acc = edge_cost(vs.parent[y], y) + acc;
      ws.stamp[y] = ws.epoch;
      ws.cost[y] = acc;
    }
    vs.g[v] = x == root && chain.empty() ? vs.g[root] : ws.cost[v];
  }
}

ReplanStats replan(const CsrGraph& csr, VertexStore& vs,
                   std::vector<VertexId>& promising,
                   ExploitationBackend& backend, const ReplanOptions& options) {
  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  const std::size_t cap =
      options.max_iterations != 0 ? options.max_iterations : 10 * vs.size();

  ReplanStats stats;
  std::vector<VertexId> work;
  std::vector<VertexId> stale;
  for (;;) {
    if (stats.iterations >= cap) {
      throw ConvergenceError("policy iteration did not converge within " +
                             std::to_string(cap) + " iterations");
    }
    // h(goal) = 0, so the goal can never pass the strict promising test on
    // its own value; it is always offered to Improve.
    work.assign(promising.begin(), promising.end());
    if (!vs.promising[options.goal]) work.push_back(options.goal);
    std::vector<VertexId> boundary =
        backend.boundary(csr, vs, promising, options.root, options.goal);
    work.insert(work.end(), boundary.begin(), boundary.end());
    if (stats.iterations == 0) {
      refresh_policy_costs(csr, vs, work, options.root, backend.workspace());
    } else {
      stale.clear();
      for (VertexId v : work) {
        if (!vs.promising[v]) stale.push_back(v);
      }
      refresh_policy_costs(csr, vs, stale, options.root, backend.workspace());
    }

    const ImproveResult improved = backend.improve(csr, vs, work);
    ++stats.iterations;
    stats.delta_g_trace.push_back(improved.delta_g);
    if (options.validate) validate_policy_forest(vs);
    if (improved.delta_g < options.epsilon) break;

    EvaluateResult evaluated =
        backend.evaluate(csr, vs, promising, options.root, options.goal);
    promising = std::move(evaluated.promising);
  }
  stats.wall_time =
      std::chrono::duration<double>(clock::now() - start).count();
  stats.goal_cost = vs.g[options.goal];
  stats.promising_size = promising.size();
  return stats;
}

}  // namespace berrt
