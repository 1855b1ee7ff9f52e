#include <gtest/gtest.h>

#include <random>
#include <set>
#include <sstream>
#include <vector>

#include "berrt/graph.hpp"
#include "berrt/worker_pool.hpp"
#include "support/oracles.hpp"

using namespace berrt;

namespace {

std::vector<Edge> random_edges(std::mt19937_64& gen, std::size_t n, std::size_t m) {
  std::uniform_int_distribution<VertexId> id(0, static_cast<VertexId>(n - 1));
  std::uniform_real_distribution<double> c(0.0, 10.0);
  std::set<std::pair<VertexId, VertexId>> used;
  std::vector<Edge> out;
  while (out.size() < m) {
    const VertexId a = id(gen), b = id(gen);
    if (a == b || !used.insert({a, b}).second) continue;
    out.push_back({a, b, c(gen)});
  }
  return out;
}

void expect_matches_adjacency(const CsrGraph& csr, std::span<const Edge> edges,
                              std::size_t n) {
  const auto ref = oracle::adjacency(edges, n);
  ASSERT_EQ(csr.num_vertices(), n);
  for (VertexId v = 0; v < n; ++v) {
    const auto row = csr.out_edges(v);
    std::multiset<std::pair<VertexId, double>> got;
    for (std::size_t k = 0; k < row.size(); ++k) got.insert({row.targets[k], row.costs[k]});
    EXPECT_EQ(got, ref[v]) << "vertex " << v;
    for (std::size_t k = 1; k < row.size(); ++k) {
      EXPECT_LT(row.targets[k - 1], row.targets[k]);
    }
  }
}

}  // namespace

TEST(VertexStore, InitialisationExamples) {
  VertexStore vs;
  EXPECT_EQ(vs.add_vertex({0.1, 0.1}, 0.0, 1.0), 0u);
  EXPECT_EQ(vs.g[0], 0.0);
  EXPECT_EQ(vs.parent[0], kNoVertex);
  EXPECT_EQ(vs.add_vertex({0.9, 0.9}, kInfinity, 0.0), 1u);
  EXPECT_EQ(vs.promising[1], 0);
  EXPECT_EQ(vs.g[1], kInfinity);
}

TEST(VertexStore, DenseIdsAndCoherentArrays) {
  VertexStore vs;
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> u(0, 1);
  for (VertexId i = 0; i < 1000; ++i) {
    const VertexId parent = i == 0 ? kNoVertex : static_cast<VertexId>(gen() % i);
    EXPECT_EQ(vs.add_vertex({u(gen), u(gen)}, u(gen), u(gen), parent), i);
  }
  EXPECT_EQ(vs.g.size(), 1000u);
  EXPECT_EQ(vs.h.size(), 1000u);
  EXPECT_EQ(vs.parent.size(), 1000u);
  EXPECT_EQ(vs.promising.size(), 1000u);
  EXPECT_NO_THROW(validate_policy_forest(vs));
}

TEST(VertexStore, ForestValidationDetectsCycles) {
  VertexStore vs;
  vs.add_vertex({0, 0}, 0, 0);
  vs.add_vertex({1, 0}, 1, 0, 2);
  vs.add_vertex({2, 0}, 2, 0, 1);
  EXPECT_THROW(validate_policy_forest(vs), GraphCorruptionError);
  vs.parent[1] = 7;
  EXPECT_THROW(validate_policy_forest(vs), GraphCorruptionError);
}

TEST(EdgeBatch, AppendExamples) {
  EdgeBatch batch;
  batch.append(Edge{0, 1, 5.0});
  ASSERT_EQ(batch.size(), 1u);
  const std::vector<Edge> more{{1, 0, 5.0}, {0, 2, 6.0}};
  batch.append(more);
  ASSERT_EQ(batch.size(), 3u);
  EXPECT_EQ(batch.view()[0], (Edge{0, 1, 5.0}));
  EXPECT_EQ(batch.view()[2], (Edge{0, 2, 6.0}));
}

TEST(EdgeBatch, AppendIsConcatenation) {
  std::mt19937_64 gen(3);
  EdgeBatch batch;
  std::vector<Edge> all;
  for (VertexId i = 0; i < 100'000; ++i) {
    const Edge e{i, i + 1, static_cast<double>(gen() % 1000) / 7.0};
    all.push_back(e);
    batch.append(e);
  }
  EXPECT_TRUE(std::equal(all.begin(), all.end(), batch.view().begin(), batch.view().end()));
}

TEST(EdgeBatch, ValidationRejectsDuplicates) {
  EdgeBatch checked(true);
  checked.append(Edge{0, 1, 1.0});
  EXPECT_THROW(checked.append(Edge{0, 1, 1.0}), GraphCorruptionError);
  EdgeBatch unchecked(false);
  unchecked.append(Edge{0, 1, 1.0});
  EXPECT_NO_THROW(unchecked.append(Edge{0, 1, 1.0}));
}

TEST(RebuildCsr, HandConstructedExample) {
  const std::vector<Edge> staged{{0, 1, 5}, {0, 2, 6}, {1, 2, 7}};
  const CsrGraph csr = rebuild_csr(CsrGraph{}, staged, 3);
  EXPECT_EQ(std::vector<std::size_t>(csr.row_offsets().begin(), csr.row_offsets().end()),
            (std::vector<std::size_t>{0, 2, 3, 3}));
  const auto row0 = csr.out_edges(0);
  ASSERT_EQ(row0.size(), 2u);
  EXPECT_EQ(row0.targets[0], 1u);
  EXPECT_EQ(row0.costs[0], 5.0);
  EXPECT_EQ(row0.targets[1], 2u);
  EXPECT_EQ(row0.costs[1], 6.0);
  EXPECT_TRUE(csr.out_edges(2).empty());
  for (VertexId v = 0; v < 3; ++v) {
    EXPECT_EQ(csr.out_edges(v).size(), csr.row_offsets()[v + 1] - csr.row_offsets()[v]);
  }
  EXPECT_THROW(csr.out_edges(3), std::out_of_range);
  expect_matches_adjacency(csr, staged, 3);

  const CsrGraph same = rebuild_csr(csr, {}, 3);
  EXPECT_EQ(same, csr);
}

TEST(RebuildCsr, RejectsCorruption) {
  const std::vector<Edge> bad_id{{0, 5, 1.0}};
  EXPECT_THROW(rebuild_csr(CsrGraph{}, bad_id, 3), GraphCorruptionError);
  const std::vector<Edge> first{{0, 1, 1.0}};
  const CsrGraph csr = rebuild_csr(CsrGraph{}, first, 2);
  EXPECT_THROW(rebuild_csr(csr, first, 2), GraphCorruptionError);
  EXPECT_THROW(rebuild_csr(csr, {}, 1), GraphCorruptionError);
}

TEST(RebuildCsr, RandomGraphsMatchAdjacencyOracle) {
  std::mt19937_64 gen(17);
  WorkerPool pool(4);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + gen() % 300;
    const std::size_t m = n < 2 ? 0 : gen() % std::min<std::size_t>(n * (n - 1), 2000);
    const auto edges = random_edges(gen, n, m);
    // Merge in several increments, growing the vertex count as we go.
    CsrGraph csr;
    std::size_t done = 0;
    while (done < edges.size()) {
      const std::size_t step = std::min<std::size_t>(edges.size() - done, 1 + gen() % 200);
      csr = rebuild_csr(csr, std::span(edges).subspan(done, step), n,
                        trial % 2 ? &pool : nullptr);
      done += step;
    }
    if (edges.empty()) csr = rebuild_csr(csr, {}, n);
    expect_matches_adjacency(csr, edges, n);
    EXPECT_EQ(csr.num_edges(), edges.size());
  }
}

TEST(RebuildCsr, ParallelMergeEqualsSerial) {
  std::mt19937_64 gen(23);
  const auto edges = random_edges(gen, 500, 5000);
  WorkerPool pool(8);
  const CsrGraph a = rebuild_csr(rebuild_csr(CsrGraph{}, std::span(edges).first(2000), 500),
                                 std::span(edges).subspan(2000), 500);
  const CsrGraph b = rebuild_csr(rebuild_csr(CsrGraph{}, std::span(edges).first(2000), 500, &pool),
                                 std::span(edges).subspan(2000), 500, &pool);
  EXPECT_EQ(a, b);
}

TEST(RadixSort, OrdersBySourceThenTarget) {
  std::mt19937_64 gen(5);
  auto edges = random_edges(gen, 70'000, 10'000);
  auto ref = edges;
  std::stable_sort(ref.begin(), ref.end(), [](const Edge& a, const Edge& b) {
    return std::tie(a.src, a.dst) < std::tie(b.src, b.dst);
  });
  radix_sort_edges(edges);
  EXPECT_EQ(edges, ref);
}

TEST(EdgeList, RoundTripsExactly) {
  std::mt19937_64 gen(8);
  const auto edges = random_edges(gen, 50, 400);
  const CsrGraph csr = rebuild_csr(CsrGraph{}, edges, 50);
  std::stringstream ss;
  write_edge_list(ss, csr);
  const auto back = read_edge_list(ss);
  EXPECT_EQ(rebuild_csr(CsrGraph{}, back, 50), csr);
}
