#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "berrt/exploitation.hpp"
#include "berrt/graph.hpp"
#include "berrt/worker_pool.hpp"

namespace berrt {

/// Double-buffered vertex frontier of a level-synchronous traversal.
struct Frontier {
  std::vector<VertexId> current;
  std::vector<VertexId> next;

  void advance() {
    current.swap(next);
    next.clear();
  }
};

/// Owns the run's edge list and the watermark separating edges already merged
/// into the CSR from those produced since. Exploration appends; each replan
/// consumes the pending segment exactly once.
class StagingBuffer {
 public:
  explicit StagingBuffer(bool validate = false) : batch_(validate) {}

  void stage(std::span<const Edge> edges) { batch_.append(edges); }

  const EdgeBatch& batch() const { return batch_; }
  std::size_t watermark() const { return watermark_; }
  std::span<const Edge> pending() const {
    return batch_.segment(watermark_, batch_.size());
  }

  /// Throws std::logic_error if `upto` is behind the watermark (a double
  /// consume) or past the end of the batch.
  void mark_consumed(std::size_t upto);

 private:
  EdgeBatch batch_;
  std::size_t watermark_ = 0;
};

/// Merges the pending segment into `csr` and advances the watermark to the end
/// of the batch.
CsrGraph sync_and_rebuild(StagingBuffer& staging, const CsrGraph& csr,
                          std::size_t n_vertices, WorkerPool* pool = nullptr);

/// One worker per contiguous slice of `work`; each vertex has exactly one
/// writer. delta_g is the max over per-worker partial maxima. Identical to
/// improve_serial.
ImproveResult improve_parallel(const CsrGraph& csr, VertexStore& vs,
                               std::span<const VertexId> work,
                               WorkerPool& pool);

/// Level-synchronous policy-tree walk. Each frontier vertex relaxes its own
/// policy children, so writers never overlap and no visited set is needed.
/// Per-worker output buffers are concatenated in worker order, which
/// reproduces the serial queue order exactly.
EvaluateResult evaluate_parallel(const CsrGraph& csr, VertexStore& vs,
                                 std::span<const VertexId> previous,
                                 VertexId root, VertexId goal,
                                 WorkerPool& pool, bool validate = false);

/// Boundary scan split over the scanned vertices; per-worker hits are merged,
/// sorted and deduplicated, so the result equals collect_boundary_serial.
std::vector<VertexId> collect_boundary_parallel(const CsrGraph& csr,
                                                const VertexStore& vs,
                                                std::span<const VertexId> promising,
                                                VertexId root, VertexId goal,
                                                WorkerPool& pool);

class ParallelBackend final : public ExploitationBackend {
 public:
  explicit ParallelBackend(std::size_t workers = 0, bool validate = false)
      : pool_(workers), validate_(validate) {}

  std::string_view name() const override { return "parallel"; }
  ImproveResult improve(const CsrGraph& csr, VertexStore& vs,
                        std::span<const VertexId> work) override {
    return improve_parallel(csr, vs, work, pool_);
  }
  EvaluateResult evaluate(const CsrGraph& csr, VertexStore& vs,
                          std::span<const VertexId> previous, VertexId root,
                          VertexId goal) override {
    return evaluate_parallel(csr, vs, previous, root, goal, pool_, validate_);
  }
  std::vector<VertexId> boundary(const CsrGraph& csr, const VertexStore& vs,
                                 std::span<const VertexId> promising,
                                 VertexId root, VertexId goal) override {
    return collect_boundary_parallel(csr, vs, promising, root, goal, pool_);
  }
  WorkerPool* pool() override { return &pool_; }

 private:
  WorkerPool pool_;
  bool validate_;
};

}  // namespace berrt
