#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "berrt/exploitation.hpp"
#include "berrt/graph.hpp"
#include "berrt/parallel.hpp"
#include "berrt/world.hpp"

namespace berrt {

enum class BackendKind { kSerial, kParallel };

std::string_view to_string(BackendKind kind);
/// Accepts "serial" or "parallel"; throws std::invalid_argument otherwise.
BackendKind parse_backend(std::string_view name);

std::unique_ptr<ExploitationBackend> make_backend(BackendKind kind,
                                                  std::size_t workers,
                                                  bool validate);

/// Handed to PlannerConfig::on_replan after every replan.
struct ReplanObservation {
  const CsrGraph& csr;
  const VertexStore& vertices;
  std::span<const VertexId> promising;
  const ReplanStats& stats;
};

struct PlannerConfig {
  std::size_t n_samples = 1000;  // extension attempts
  std::size_t batch_size = 1;    // extensions between replans
  double epsilon = 1e-6;
  double steer_range = 0.1;
  double gamma = 0.0;  // <= 0 selects default_gamma(world)
  std::uint64_t seed = 1;
  BackendKind backend = BackendKind::kSerial;
  std::size_t workers = 0;  // parallel backend; 0 = default_worker_count()
  bool validate = false;
  std::size_t max_replan_iterations = 0;  // 0 = 10 * |V|
  std::function<void(const ReplanObservation&)> on_replan;
};

struct PlanTotals {
  double explore = 0.0;
  double exploit = 0.0;
  double rebuild = 0.0;
  double total = 0.0;
};

struct PlanResult {
  std::vector<State> path;
  double path_cost = kInfinity;
  std::vector<ReplanStats> per_replan;
  PlanTotals totals;

  VertexStore vertices;
  std::vector<Edge> edges;  // every staged edge, in staging order
  std::vector<VertexId> promising;
  std::size_t extensions_added = 0;
  double gamma = 0.0;
};

struct ExtendOutcome {
  std::optional<VertexId> added;
  bool promising = false;
  std::size_t staged_edges = 0;
};

/// Connection radius min(gamma * sqrt(log n / n), steer_range).
double near_radius(std::size_t n, double gamma, double steer_range);

/// Lower bound of the connection-radius scale for asymptotic optimality in
/// two dimensions, 2 (1 + 1/2)^(1/2) (mu(X_free) / pi)^(1/2), times a 10%
/// margin.
double default_gamma(const World& world);

/// Parent chain from `goal` back to its root, returned root first. Empty when
/// g(goal) is infinite. Throws GraphCorruptionError if the chain is longer
/// than the vertex count.
std::vector<State> extract_path(const VertexStore& vs, VertexId goal);

/// Stepwise planner state. Vertex 0 is x_init and vertex 1 is x_goal.
class Planner {
 public:
  static constexpr VertexId kRoot = 0;
  static constexpr VertexId kGoal = 1;

  Planner(const World& world, PlannerConfig config);

  /// One exploration step: sample, steer from the nearest tree vertex, connect
  /// to every collision-free neighbour within the current radius, and adopt
  /// the locally optimal parent. A colliding steer leaves the graph untouched.
  ExtendOutcome extend();

  /// Merges staged edges into the CSR, then runs policy iteration.
  const ReplanStats& replan();

  /// Batched-extension loop over the configured samples. A batch is followed
  /// by a replan iff it grew the promising set; if the last batch did not,
  /// one closing replan runs over the complete graph. With batch_size == 1
  /// this is the unbatched planner.
  PlanResult run();

  /// Snapshot of the current graph plus the extracted path.
  PlanResult result() const;

  const VertexStore& vertices() const { return vs_; }
  std::span<const VertexId> promising() const { return promising_; }
  const EdgeBatch& edges() const { return staging_.batch(); }
  const StagingBuffer& staging() const { return staging_; }
  const CsrGraph& csr() const { return csr_; }
  const PlannerConfig& config() const { return config_; }
  std::span<const ReplanStats> replans() const { return per_replan_; }
  double gamma() const { return gamma_; }

 private:
  const World& world_;
  PlannerConfig config_;
  double gamma_;
  Rng rng_;
  SpatialIndex index_;
  VertexStore vs_;
  StagingBuffer staging_;
  CsrGraph csr_;
  std::vector<VertexId> promising_;
  std::unique_ptr<ExploitationBackend> backend_;
  std::vector<ReplanStats> per_replan_;
  PlanTotals totals_;
  std::size_t added_ = 0;
  std::vector<VertexId> scratch_ids_;
  std::vector<Edge> scratch_edges_;
};

/// Runs Planner::run on a fresh planner.
PlanResult plan(const World& world, const PlannerConfig& config);

}  // namespace berrt
