#include "berrt/planner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace berrt {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

std::string_view to_string(BackendKind kind) {
  return kind == BackendKind::kSerial ? "serial" : "parallel";
}

BackendKind parse_backend(std::string_view name) {
  if (name == "serial") return BackendKind::kSerial;
  if (name == "parallel") return BackendKind::kParallel;
  throw std::invalid_argument("unknown backend '" + std::string(name) +
                              "' (expected serial or parallel)");
}

std::unique_ptr<ExploitationBackend> make_backend(BackendKind kind,
                                                  std::size_t workers,
                                                  bool validate) {
  if (kind == BackendKind::kSerial) {
    return std::make_unique<SerialBackend>(validate);
  }
  return std::make_unique<ParallelBackend>(workers, validate);
}

double near_radius(std::size_t n, double gamma, double steer_range) {
  if (n < 2) return steer_range;
  const double nn = static_cast<double>(n);
  return std::min(gamma * std::sqrt(std::log(nn) / nn), steer_range);
}

double default_gamma(const World& world) {
  const double mu = world.free_area_estimate();
  return 1.1 * 2.0 * std::sqrt(1.5) * std::sqrt(mu / std::numbers::pi);
}

std::vector<State> extract_path(const VertexStore& vs, VertexId goal) {
  std::vector<State> path;
  if (!(vs.g[goal] < kInfinity)) return path;
  for (VertexId v = goal; v != kNoVertex; v = vs.parent[v]) {
    if (path.size() > vs.size()) {
      throw GraphCorruptionError("parent chain from goal does not terminate");
    }
    path.push_back(vs.states[v]);
  }
  std::reverse(path.begin(), path.end());
  return path;
}

Planner::Planner(const World& world, PlannerConfig config)
    : world_(world),
      config_(std::move(config)),
      gamma_(config_.gamma > 0.0 ? config_.gamma : default_gamma(world)),
      rng_(config_.seed),
      index_(world.bounds()),
      staging_(config_.validate),
      backend_(make_backend(config_.backend, config_.workers, config_.validate)) {
  if (config_.batch_size == 0) {
    throw std::invalid_argument("batch_size must be at least 1");
  }
  if (!(config_.steer_range > 0.0)) {
    throw std::invalid_argument("steer_range must be positive");
  }
  if (!(config_.epsilon >= 0.0)) {
    throw std::invalid_argument("epsilon must be nonnegative");
  }
  vs_.add_vertex(world.init(), 0.0, heuristic(world.init(), world));
  vs_.add_vertex(world.goal(), kInfinity, 0.0);
  // The goal is reachable only through near() connections; exploration grows
  // from the tree rooted at x_init.
  index_.insert(kRoot, world.init());
}

ExtendOutcome Planner::extend() {
  const State target = sample_free(rng_, world_);
  const VertexId nearest = index_.nearest(target);
  const State from = vs_.states[nearest];
  const double d = cost(from, target);
  if (d == 0.0) return {};
  const double eta = config_.steer_range;
  const State x_new = d <= eta ? target
                               : State{from.x + (target.x - from.x) * (eta / d),
                                       from.y + (target.y - from.y) * (eta / d)};
  if (world_.segment_collides(from, x_new)) return {};

  const double r = near_radius(vs_.size() + 1, gamma_, eta);
  std::vector<VertexId>& candidates = scratch_ids_;
  candidates = index_.near(x_new, r);
  if (!std::binary_search(candidates.begin(), candidates.end(), nearest)) {
    candidates.insert(std::upper_bound(candidates.begin(), candidates.end(), nearest),
                      nearest);
  }
  if (cost(x_new, world_.goal()) <= r) {
    candidates.insert(std::upper_bound(candidates.begin(), candidates.end(), kGoal),
                      kGoal);
  }

  const auto id = static_cast<VertexId>(vs_.size());
  std::vector<Edge>& staged = scratch_edges_;
  staged.clear();
  double best = kInfinity;
  VertexId parent = kNoVertex;
  for (VertexId n : candidates) {
    const State s = vs_.states[n];
    if (n != nearest && world_.segment_collides(x_new, s)) continue;
    const double c = cost(x_new, s);
    const double gn = vs_.g[n];
    if (gn < kInfinity && c + gn < best) {
      best = c + gn;
      parent = n;
    }
    staged.push_back({n, id, c});
    staged.push_back({id, n, c});
  }

  const double h = heuristic(x_new, world_);
  vs_.add_vertex(x_new, best, h, parent);
  staging_.stage(staged);
  index_.insert(id, x_new);
  ++added_;

  ExtendOutcome outcome;
  outcome.added = id;
  outcome.staged_edges = staged.size();
  outcome.promising = best + h < vs_.g[kGoal];
  if (outcome.promising) {
    vs_.promising[id] = 1;
    promising_.push_back(id);
  }
  return outcome;
}

const ReplanStats& Planner::replan() {
  const auto rebuild_start = Clock::now();
  csr_ = sync_and_rebuild(staging_, csr_, vs_.size(), backend_->pool());
  const double rebuild_time = seconds_since(rebuild_start);

  ReplanOptions options;
  options.epsilon = config_.epsilon;
  options.max_iterations = config_.max_replan_iterations;
  options.root = kRoot;
  options.goal = kGoal;
  options.validate = config_.validate;
  ReplanStats stats = berrt::replan(csr_, vs_, promising_, *backend_, options);
  stats.rebuild_time = rebuild_time;
  totals_.rebuild += rebuild_time;
  totals_.exploit += stats.wall_time;
  per_replan_.push_back(std::move(stats));

  if (config_.on_replan) {
    config_.on_replan({csr_, vs_, promising_, per_replan_.back()});
  }
  return per_replan_.back();
}

PlanResult Planner::run() {
  const auto start = Clock::now();
  const std::size_t n = config_.n_samples;
  const std::size_t s = config_.batch_size;
  bool current = false;
  for (std::size_t done = 0; done < n; done += s) {
    const std::size_t batch = std::min(s, n - done);
    const std::size_t before = promising_.size();
    const auto explore_start = Clock::now();
    for (std::size_t i = 0; i < batch; ++i) extend();
    totals_.explore += seconds_since(explore_start);
    current = promising_.size() > before;
    if (current) replan();
  }
  // If the last batch skipped its replan, its edges have not been merged or
  // relaxed yet; one replan over the complete graph restores optimality.
  if (!current) replan();
  totals_.total = seconds_since(start);
  return result();
}

PlanResult Planner::result() const {
  PlanResult out;
  out.path = extract_path(vs_, kGoal);
  if (!out.path.empty()) {
    double total = 0.0;
    for (std::size_t i = 1; i < out.path.size(); ++i) {
      total = cost(out.path[i - 1], out.path[i]) + total;
    }
    out.path_cost = total;
  }
  out.per_replan = per_replan_;
  out.totals = totals_;
  out.vertices = vs_;
  const auto all = staging_.batch().view();
  out.edges.assign(all.begin(), all.end());
  out.promising = promising_;
  out.extensions_added = added_;
  out.gamma = gamma_;
  return out;
}

PlanResult plan(const World& world, const PlannerConfig& config) {
  Planner planner(world, config);
  return planner.run();
}

}  // namespace berrt
