#include "berrt/parallel.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>
#include <utility>

namespace berrt {

void StagingBuffer::mark_consumed(std::size_t upto) {
  if (upto < watermark_) {
    throw std::logic_error("staging watermark regression: " +
                           std::to_string(upto) + " < " +
                           std::to_string(watermark_));
  }
  if (upto > batch_.size()) {
    throw std::logic_error("staging watermark past end of batch");
  }
  watermark_ = upto;
}

CsrGraph sync_and_rebuild(StagingBuffer& staging, const CsrGraph& csr,
                          std::size_t n_vertices, WorkerPool* pool) {
  const std::size_t end = staging.batch().size();
  CsrGraph merged = rebuild_csr(csr, staging.pending(), n_vertices, pool);
  staging.mark_consumed(end);
  return merged;
}

ImproveResult improve_parallel(const CsrGraph& csr, VertexStore& vs,
                               std::span<const VertexId> work,
                               WorkerPool& pool) {
  std::vector<ImproveResult> partial(pool.size());
  pool.parallel_for(work.size(), [&](std::size_t w, std::size_t begin,
                                     std::size_t end) {
    ImproveResult local;
    for (std::size_t i = begin; i < end; ++i) {
      const VertexId v = work[i];
      const auto step = detail::improve_vertex(csr, vs, v);
      if (step.changed) {
        vs.parent[v] = step.parent;
        ++local.parents_changed;
      }
      local.delta_g = std::max(local.delta_g, step.delta);
    }
    partial[w] = local;
  });

  ImproveResult result;
  for (const ImproveResult& p : partial) {
    result.delta_g = std::max(result.delta_g, p.delta_g);
    result.parents_changed += p.parents_changed;
  }
  return result;
}

EvaluateResult evaluate_parallel(const CsrGraph& csr, VertexStore& vs,
                                 std::span<const VertexId> previous,
                                 VertexId root, VertexId goal,
                                 WorkerPool& pool, bool validate) {
  pool.parallel_for(previous.size(), [&](std::size_t, std::size_t begin,
                                         std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) vs.promising[previous[i]] = 0;
  });
  const double threshold = vs.g[goal];

  EvaluateResult result;
  std::vector<std::vector<VertexId>> produced(pool.size());
  std::vector<std::size_t> relaxed(pool.size());
  std::vector<std::uint8_t> seen;
  if (validate) {
    seen.assign(vs.size(), 0);
    seen[root] = 1;
  }

  Frontier frontier;
  frontier.current.push_back(root);
  while (!frontier.current.empty()) {
    ++result.levels;
    pool.parallel_for(frontier.current.size(), [&](std::size_t w,
                                                   std::size_t begin,
                                                   std::size_t end) {
      auto& out = produced[w];
      out.clear();
      std::size_t count = 0;
      for (std::size_t i = begin; i < end; ++i) {
        const VertexId v = frontier.current[i];
        const bool parent_passes = vs.g[v] + vs.h[v] < threshold;
        const auto row = csr.row(v);
        for (std::size_t k = 0; k < row.size(); ++k) {
          const VertexId n = row.targets[k];
          if (vs.parent[n] != v) continue;
          vs.g[n] = row.costs[k] + vs.g[v];
          ++count;
          const bool passes = kPromisingTest == PromisingTest::kChild
                                  ? vs.g[n] + vs.h[n] < threshold
                                  : parent_passes;
          if (!passes) continue;
          vs.promising[n] = 1;
          out.push_back(n);
        }
      }
      relaxed[w] = count;
    });

    for (std::size_t w = 0; w < pool.size(); ++w) {
      result.visited += std::exchange(relaxed[w], 0);
      for (VertexId n : produced[w]) {
        if (validate) {
          if (seen[n]) {
            throw GraphCorruptionError("frontier reaches vertex " +
                                       std::to_string(n) + " twice");
          }
          seen[n] = 1;
        }
        frontier.next.push_back(n);
      }
      produced[w].clear();
    }
    result.promising.insert(result.promising.end(), frontier.next.begin(),
                            frontier.next.end());
    frontier.advance();
  }
  return result;
}

std::vector<VertexId> collect_boundary_parallel(const CsrGraph& csr,
                                                const VertexStore& vs,
                                                std::span<const VertexId> promising,
                                                VertexId root, VertexId goal,
                                                WorkerPool& pool) {
  std::vector<std::vector<VertexId>> hits(pool.size());
  // Index 0 stands for the root, index i for promising[i - 1].
  pool.parallel_for(promising.size() + 1, [&](std::size_t w, std::size_t begin,
                                              std::size_t end) {
    auto& out = hits[w];
    out.clear();
    for (std::size_t i = begin; i < end; ++i) {
      const VertexId v = i == 0 ? root : promising[i - 1];
      const double gv = vs.g[v];
      const auto row = csr.row(v);
      for (std::size_t k = 0; k < row.size(); ++k) {
        const VertexId n = row.targets[k];
        if (vs.promising[n] || n == root || n == goal) continue;
        if (row.costs[k] + gv < vs.g[n]) out.push_back(n);
      }
    }
  });
  std::vector<VertexId> out;
  for (auto& h : hits) out.insert(out.end(), h.begin(), h.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace berrt
