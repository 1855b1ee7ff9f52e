#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <unordered_set>
#include <vector>

#include "berrt/types.hpp"

namespace berrt {

class WorkerPool;

/// Per-vertex planner properties in structure-of-arrays layout. Every array
/// has one entry per vertex. `promising` uses a byte per vertex so that
/// workers may write disjoint entries concurrently.
struct VertexStore {
  std::vector<State> states;
  std::vector<double> g;  // cost-to-come under the current policy
  std::vector<double> h;  // admissible cost-to-go
  std::vector<VertexId> parent;
  std::vector<std::uint8_t> promising;

  std::size_t size() const { return states.size(); }

  /// Appends a vertex; the new id is the previous size. Not promising.
  VertexId add_vertex(State s, double g_value, double h_value,
                      VertexId parent_id = kNoVertex);

  friend bool operator==(const VertexStore&, const VertexStore&) = default;
};

/// Throws GraphCorruptionError if following parent pointers from any vertex
/// revisits a vertex, or if a parent id is out of range.
void validate_policy_forest(const VertexStore& vs);

struct Edge {
  VertexId src = 0;
  VertexId dst = 0;
  double cost = 0.0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Append-only coordinate list of directed edges, the staging format between
/// exploration and exploitation.
class EdgeBatch {
 public:
  /// With `validate`, every append checks that its (src, dst) pair has never
  /// been seen, at the cost of a hash probe per edge.
  explicit EdgeBatch(bool validate = false) : validate_(validate) {}

  /// Throws GraphCorruptionError on a duplicate pair in validation mode; the
  /// batch is left unchanged in that case.
  void append(std::span<const Edge> edges);
  void append(const Edge& edge) { append(std::span<const Edge>(&edge, 1)); }

  std::size_t size() const { return edges_.size(); }
  bool empty() const { return edges_.empty(); }
  std::span<const Edge> view() const { return edges_; }
  std::span<const Edge> segment(std::size_t from, std::size_t to) const {
    return std::span<const Edge>(edges_).subspan(from, to - from);
  }

 private:
  std::vector<Edge> edges_;
  bool validate_;
  std::unordered_set<std::uint64_t> seen_;
};

/// Compressed sparse row adjacency. Immutable; produced by rebuild_csr.
class CsrGraph {
 public:
  struct OutEdges {
    std::span<const VertexId> targets;
    std::span<const double> costs;

    std::size_t size() const { return targets.size(); }
    bool empty() const { return targets.empty(); }
  };

  CsrGraph() : row_offsets_{0} {}

  std::size_t num_vertices() const { return row_offsets_.size() - 1; }
  std::size_t num_edges() const { return col_indices_.size(); }

  /// Row slice of `v`. Throws std::out_of_range if v >= num_vertices().
  OutEdges out_edges(VertexId v) const;

  /// Unchecked variant for the exploitation hot loops.
  OutEdges row(VertexId v) const {
    const std::size_t b = row_offsets_[v];
    const std::size_t e = row_offsets_[v + 1];
    return {std::span<const VertexId>(col_indices_).subspan(b, e - b),
            std::span<const double>(edge_costs_).subspan(b, e - b)};
  }

  std::span<const std::size_t> row_offsets() const { return row_offsets_; }
  std::span<const VertexId> col_indices() const { return col_indices_; }
  std::span<const double> edge_costs() const { return edge_costs_; }

  friend bool operator==(const CsrGraph&, const CsrGraph&) = default;

 private:
  friend CsrGraph rebuild_csr(const CsrGraph&, std::span<const Edge>,
                              std::size_t, WorkerPool*);

  std::vector<std::size_t> row_offsets_;
  std::vector<VertexId> col_indices_;
  std::vector<double> edge_costs_;
};

/// Stable LSD radix sort by (src, dst). Pass count depends on the largest id
/// present.
void radix_sort_edges(std::vector<Edge>& edges);

/// Merges `staged` into `old`, producing a graph over `n_vertices` rows. The
/// staged edges are radix-sorted, then each row is merged from its old and new
/// sorted runs; rows are merged in parallel when a pool is given. Throws
/// GraphCorruptionError for an id >= n_vertices, for n_vertices below the old
/// row count, or for an edge already present.
CsrGraph rebuild_csr(const CsrGraph& old, std::span<const Edge> staged,
                     std::size_t n_vertices, WorkerPool* pool = nullptr);

/// Debug dump: one "src dst cost" line per edge, row order, costs written with
/// round-trip precision.
void write_edge_list(std::ostream& out, const CsrGraph& csr);
std::vector<Edge> read_edge_list(std::istream& in);

}  // namespace berrt
