#include "berrt/graph.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "berrt/worker_pool.hpp"

namespace berrt {
namespace {

std::uint64_t pair_key(VertexId src, VertexId dst) {
  return (static_cast<std::uint64_t>(src) << 32) | dst;
}

}  // namespace

VertexId VertexStore::add_vertex(State s, double g_value, double h_value,
                                 VertexId parent_id) {
  const auto id = static_cast<VertexId>(states.size());
  states.push_back(s);
  g.push_back(g_value);
  h.push_back(h_value);
  parent.push_back(parent_id);
  promising.push_back(0);
  return id;
}

void validate_policy_forest(const VertexStore& vs) {
  const std::size_t n = vs.size();
  if (vs.g.size() != n || vs.h.size() != n || vs.parent.size() != n ||
      vs.promising.size() != n) {
    throw GraphCorruptionError("vertex property arrays differ in length");
  }
  // 0 = unvisited, 1 = on the current walk, 2 = known to reach a root.
  std::vector<std::uint8_t> mark(n, 0);
  std::vector<VertexId> walk;
  for (VertexId start = 0; start < n; ++start) {
    walk.clear();
    VertexId v = start;
    while (v != kNoVertex && mark[v] == 0) {
      mark[v] = 1;
      walk.push_back(v);
      v = vs.parent[v];
      if (v != kNoVertex && v >= n) {
        throw GraphCorruptionError("parent id out of range");
      }
    }
    if (v != kNoVertex && mark[v] == 1) {
      throw GraphCorruptionError("cycle in parent pointers through vertex " +
                                 std::to_string(v));
    }
    for (VertexId w : walk) mark[w] = 2;
  }
}

void EdgeBatch::append(std::span<const Edge> edges) {
  if (validate_) {
    std::vector<std::uint64_t> fresh;
    fresh.reserve(edges.size());
    for (const Edge& e : edges) {
      const std::uint64_t key = pair_key(e.src, e.dst);
      if (seen_.contains(key) ||
          std::find(fresh.begin(), fresh.end(), key) != fresh.end()) {
        throw GraphCorruptionError("duplicate edge " + std::to_string(e.src) +
                                   " -> " + std::to_string(e.dst));
      }
      fresh.push_back(key);
    }
    seen_.insert(fresh.begin(), fresh.end());
  }
  edges_.insert(edges_.end(), edges.begin(), edges.end());
}

CsrGraph::OutEdges CsrGraph::out_edges(VertexId v) const {
  if (v >= num_vertices()) {
    throw std::out_of_range("vertex " + std::to_string(v) + " outside CSR of " +
                            std::to_string(num_vertices()) + " rows");
  }
  return row(v);
}

void radix_sort_edges(std::vector<Edge>& edges) {
  if (edges.size() < 2) return;
  VertexId max_id = 0;
  for (const Edge& e : edges) max_id = std::max({max_id, e.src, e.dst});
  const std::uint64_t base = static_cast<std::uint64_t>(max_id) + 1;
  const std::uint64_t max_key = (base - 1) * base + (base - 1);
  auto key = [base](const Edge& e) {
    return static_cast<std::uint64_t>(e.src) * base + e.dst;
  };

  int passes = 0;
  for (std::uint64_t k = max_key; k != 0; k >>= 8) ++passes;

  std::vector<Edge> scratch(edges.size());
  for (int pass = 0; pass < passes; ++pass) {
    const int shift = 8 * pass;
    std::array<std::size_t, 257> count{};
    for (const Edge& e : edges) ++count[((key(e) >> shift) & 0xFF) + 1];
    for (std::size_t d = 0; d < 256; ++d) count[d + 1] += count[d];
    for (const Edge& e : edges) scratch[count[(key(e) >> shift) & 0xFF]++] = e;
    edges.swap(scratch);
  }
}

CsrGraph rebuild_csr(const CsrGraph& old, std::span<const Edge> staged,
                     std::size_t n_vertices, WorkerPool* pool) {
  const std::size_t old_rows = old.num_vertices();
  if (n_vertices < old_rows) {
    throw GraphCorruptionError("rebuild would drop CSR rows");
  }
  for (const Edge& e : staged) {
    if (e.src >= n_vertices || e.dst >= n_vertices) {
      throw GraphCorruptionError("staged edge " + std::to_string(e.src) +
                                 " -> " + std::to_string(e.dst) +
                                 " references a vertex >= " +
                                 std::to_string(n_vertices));
    }
  }

  std::vector<Edge> fresh(staged.begin(), staged.end());
  radix_sort_edges(fresh);

  // fresh_offsets[v] .. fresh_offsets[v+1] is vertex v's run in `fresh`.
  std::vector<std::size_t> fresh_offsets(n_vertices + 1, 0);
  for (const Edge& e : fresh) ++fresh_offsets[e.src + 1];
  for (std::size_t v = 0; v < n_vertices; ++v) fresh_offsets[v + 1] += fresh_offsets[v];

  CsrGraph out;
  out.row_offsets_.assign(n_vertices + 1, 0);
  for (std::size_t v = 0; v < n_vertices; ++v) {
    const std::size_t old_len =
        v < old_rows ? old.row_offsets_[v + 1] - old.row_offsets_[v] : 0;
    out.row_offsets_[v + 1] = out.row_offsets_[v] + old_len +
                              (fresh_offsets[v + 1] - fresh_offsets[v]);
  }
  out.col_indices_.resize(out.row_offsets_.back());
  out.edge_costs_.resize(out.row_offsets_.back());

  std::atomic<bool> duplicate{false};
  auto merge_rows = [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t v = begin; v < end; ++v) {
      std::size_t i = v < old_rows ? old.row_offsets_[v] : 0;
      const std::size_t i_end = v < old_rows ? old.row_offsets_[v + 1] : 0;
      std::size_t j = fresh_offsets[v];
      const std::size_t j_end = fresh_offsets[v + 1];
      std::size_t k = out.row_offsets_[v];
      while (i < i_end || j < j_end) {
        const bool take_old =
            j == j_end || (i < i_end && old.col_indices_[i] < fresh[j].dst);
        if (take_old) {
          out.col_indices_[k] = old.col_indices_[i];
          out.edge_costs_[k] = old.edge_costs_[i];
          ++i;
        } else {
          out.col_indices_[k] = fresh[j].dst;
          out.edge_costs_[k] = fresh[j].cost;
          ++j;
        }
        if (k > out.row_offsets_[v] && out.col_indices_[k - 1] >= out.col_indices_[k]) {
          duplicate.store(true, std::memory_order_relaxed);
        }
        ++k;
      }
    }
  };
  if (pool != nullptr) {
    pool->parallel_for(n_vertices, merge_rows);
  } else {
    merge_rows(0, 0, n_vertices);
  }
  if (duplicate.load()) {
    throw GraphCorruptionError("edge staged twice for the same (src, dst) pair");
  }
  return out;
}

void write_edge_list(std::ostream& out, const CsrGraph& csr) {
  std::array<char, 64> buf{};
  for (VertexId v = 0; v < csr.num_vertices(); ++v) {
    const auto row = csr.row(v);
    for (std::size_t k = 0; k < row.size(); ++k) {
      auto res = std::to_chars(buf.data(), buf.data() + buf.size(), row.costs[k]);
      out << v << ' ' << row.targets[k] << ' '
          << std::string_view(buf.data(), res.ptr - buf.data()) << '\n';
    }
  }
}

std::vector<Edge> read_edge_list(std::istream& in) {
  std::vector<Edge> edges;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string src, dst, c;
    if (!(fields >> src >> dst >> c)) {
      throw std::runtime_error("edge list line " + std::to_string(line_no) +
                               ": expected 'src dst cost'");
    }
    Edge e;
    const auto ok = [](auto res) { return res.ec == std::errc{}; };
    if (!ok(std::from_chars(src.data(), src.data() + src.size(), e.src)) ||
        !ok(std::from_chars(dst.data(), dst.data() + dst.size(), e.dst)) ||
        !ok(std::from_chars(c.data(), c.data() + c.size(), e.cost))) {
      throw std::runtime_error("edge list line " + std::to_string(line_no) +
                               ": malformed field");
    }
    edges.push_back(e);
  }
  return edges;
}

}  // namespace berrt
