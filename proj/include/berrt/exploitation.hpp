#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "berrt/graph.hpp"
#include "berrt/types.hpp"

namespace berrt {

class WorkerPool;

/// Which vertex the Evaluate promising test is applied to when relaxing a
/// policy child n of v. kChild pushes n iff g(n) + h(n) < g(goal); kParent
/// pushes every child of v iff g(v) + h(v) < g(goal).
enum class PromisingTest { kChild, kParent };

#ifdef BERRT_EVALUATE_PARENT_TEST
inline constexpr PromisingTest kPromisingTest = PromisingTest::kParent;
#else
inline constexpr PromisingTest kPromisingTest = PromisingTest::kChild;
#endif

struct ImproveResult {
  double delta_g = 0.0;
  std::size_t parents_changed = 0;
};

struct EvaluateResult {
  std::vector<VertexId> promising;  // traversal order
  std::size_t levels = 0;
  std::size_t visited = 0;  // vertices whose g was recomputed
};

namespace detail {

struct VertexImprovement {
  VertexId parent;
  double delta;
  bool changed;
};

/// Local relaxation of one vertex over its out-edges: the lowest
/// c(n, v) + g(n) strictly below g(v), first (lowest id) on ties. Neighbours
/// with infinite g are skipped. g is only read.
inline VertexImprovement improve_vertex(const CsrGraph& csr,
                                        const VertexStore& vs, VertexId v) {
  const double current = vs.g[v];
  double best = current;
  VertexId arg = vs.parent[v];
  bool changed = false;
  const auto row = csr.row(v);
  for (std::size_t k = 0; k < row.size(); ++k) {
    const VertexId n = row.targets[k];
    const double gn = vs.g[n];
    if (!(gn < kInfinity)) continue;
    const double candidate = row.costs[k] + gn;
    if (candidate < best) {
      best = candidate;
      arg = n;
      changed = true;
    }
  }
  return {arg, changed ? current - best : 0.0, changed};
}

}  // namespace detail

/// Improve: re-parents each vertex of `work` to its locally optimal neighbour.
/// g is not modified. delta_g is the largest improvement found over `work`.
ImproveResult improve_serial(const CsrGraph& csr, VertexStore& vs,
                             std::span<const VertexId> work);

/// Evaluate: breadth-first walk of the policy tree from `root`, recomputing g
/// for every child of a visited vertex and rebuilding the promising set. The
/// flags of `previous` are cleared first. The goal cost used by the promising
/// test is read once on entry. With `validate`, a vertex reached twice throws
/// GraphCorruptionError.
EvaluateResult evaluate_serial(const CsrGraph& csr, VertexStore& vs,
                               std::span<const VertexId> previous,
                               VertexId root, VertexId goal,
                               bool validate = false);

/// Vertices adjacent to the visited policy tree ({root} and `promising`)
/// whose stored g exceeds the cost through that visited neighbour, excluding
/// the root, the goal, and promising vertices. Sorted ascending.
std::vector<VertexId> collect_boundary_serial(const CsrGraph& csr,
                                              const VertexStore& vs,
                                              std::span<const VertexId> promising,
                                              VertexId root, VertexId goal);

/// Scratch space reused across replans.
struct ReplanWorkspace {
  std::vector<std::uint32_t> stamp;
  std::vector<double> cost;
  std::uint32_t epoch = 0;
};

/// Sets g(v), for each listed v, to the cost of its current policy path: the
/// cached edge costs summed from the root down. Vertices whose parent chain
/// does not reach `root` get +infinity. Throws GraphCorruptionError if a
/// policy edge is missing from the CSR.
void refresh_policy_costs(const CsrGraph& csr, VertexStore& vs,
                          std::span<const VertexId> vertices, VertexId root,
                          ReplanWorkspace& workspace);

/// Interchangeable exploitation implementation.
class ExploitationBackend {
 public:
  virtual ~ExploitationBackend() = default;

  virtual std::string_view name() const = 0;
  virtual ImproveResult improve(const CsrGraph& csr, VertexStore& vs,
                                std::span<const VertexId> work) = 0;
  virtual EvaluateResult evaluate(const CsrGraph& csr, VertexStore& vs,
                                  std::span<const VertexId> previous,
                                  VertexId root, VertexId goal) = 0;
  virtual std::vector<VertexId> boundary(const CsrGraph& csr,
                                         const VertexStore& vs,
                                         std::span<const VertexId> promising,
                                         VertexId root, VertexId goal) = 0;
  /// Pool used for the CSR merge, or nullptr for a serial merge.
  virtual WorkerPool* pool() { return nullptr; }

  ReplanWorkspace& workspace() { return workspace_; }

 private:
  ReplanWorkspace workspace_;
};

class SerialBackend final : public ExploitationBackend {
 public:
  explicit SerialBackend(bool validate = false) : validate_(validate) {}

  std::string_view name() const override { return "serial"; }
  ImproveResult improve(const CsrGraph& csr, VertexStore& vs,
                        std::span<const VertexId> work) override {
    return improve_serial(csr, vs, work);
  }
  EvaluateResult evaluate(const CsrGraph& csr, VertexStore& vs,
                          std::span<const VertexId> previous, VertexId root,
                          VertexId goal) override {
    return evaluate_serial(csr, vs, previous, root, goal, validate_);
  }
  std::vector<VertexId> boundary(const CsrGraph& csr, const VertexStore& vs,
                                 std::span<const VertexId> promising,
                                 VertexId root, VertexId goal) override {
    return collect_boundary_serial(csr, vs, promising, root, goal);
  }

 private:
  bool validate_;
};

struct ReplanStats {
  std::size_t iterations = 0;  // Improve calls
  std::vector<double> delta_g_trace;
  double wall_time = 0.0;     // seconds of policy iteration
  double rebuild_time = 0.0;  // seconds spent merging staged edges
  double goal_cost = kInfinity;
  std::size_t promising_size = 0;
};

struct ReplanOptions {
  double epsilon = 1e-6;
  std::size_t max_iterations = 0;  // 0 selects 10 * |V|
  VertexId root = 0;
  VertexId goal = 1;
  bool validate = false;
};

/// Policy iteration to convergence. Each round Improves the promising set,
/// the goal, and the boundary of the visited tree, stops once
/// delta_g < epsilon, and otherwise Evaluates and repeats. Before Improve, the
/// g of every work vertex not freshly visited by Evaluate (all of them in the
/// first round) is refreshed from its policy path, so each re-parenting
/// lowers the true cost of the vertex and g(goal) never increases.
/// `promising` is replaced by the final promising set. Throws
/// ConvergenceError past the iteration cap.
ReplanStats replan(const CsrGraph& csr, VertexStore& vs,
                   std::vector<VertexId>& promising,
                   ExploitationBackend& backend, const ReplanOptions& options);

}  // namespace berrt
