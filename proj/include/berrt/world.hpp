#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "berrt/types.hpp"

namespace berrt {

/// Euclidean edge cost. Symmetric bit-for-bit in its arguments.
double cost(State a, State b);

struct Bounds {
  double xmin = 0.0;
  double ymin = 0.0;
  double xmax = 1.0;
  double ymax = 1.0;

  bool contains(State s) const {
    return s.x >= xmin && s.x <= xmax && s.y >= ymin && s.y <= ymax;
  }
  double width() const { return xmax - xmin; }
  double height() const { return ymax - ymin; }
  double area() const { return width() * height(); }
};

/// Simple polygon given as a closed vertex loop (last vertex connects back to
/// the first). Points on the boundary count as inside.
class Polygon {
 public:
  /// Throws std::invalid_argument if fewer than three vertices, a non-finite
  /// coordinate, or a self-intersection is present.
  explicit Polygon(std::vector<State> vertices);

  std::span<const State> vertices() const { return vertices_; }
  bool contains(State p) const;
  /// True iff the closed segment a-b touches any boundary edge.
  bool boundary_intersects(State a, State b) const;
  double area() const;

 private:
  std::vector<State> vertices_;
  Bounds box_;
};

/// Deterministic random stream. The engine is fully specified by the standard,
/// and the real conversion is done here rather than through
/// std::uniform_real_distribution, whose output is implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  std::mt19937_64 engine_;
};

class World {
 public:
  /// Validates the invariants: init and goal inside bounds and outside every
  /// obstacle. Throws ScenarioError naming the offending field.
  World(Bounds bounds, std::vector<Polygon> obstacles, State init, State goal);

  const Bounds& bounds() const { return bounds_; }
  std::span<const Polygon> obstacles() const { return obstacles_; }
  State init() const { return init_; }
  State goal() const { return goal_; }

  /// Inside bounds and outside (and not touching) every obstacle.
  bool is_free(State p) const;

  /// True iff the segment leaves the bounds or touches any obstacle, boundary
  /// grazing included. Exact edge intersection plus a midpoint containment
  /// test for segments lying wholly inside an obstacle.
  bool segment_collides(State a, State b) const;

  /// Lebesgue measure of free space, estimated by a fixed-seed Monte Carlo
  /// pass (obstacles may overlap each other and the bounds).
  double free_area_estimate(std::size_t samples = 200'000) const;

 private:
  Bounds bounds_;
  std::vector<Polygon> obstacles_;
  State init_;
  State goal_;
};

inline constexpr std::size_t kDefaultRejectionBudget = 1'000'000;

/// Rejection-samples a free state. Throws DegenerateWorldError once the budget
/// is spent.
State sample_free(Rng& rng, const World& world,
                  std::size_t budget = kDefaultRejectionBudget);

/// Straight-line distance to the goal; admissible for any obstacle layout.
double heuristic(State v, const World& world);

/// Scenario documents are JSON:
///
///   {
///     "bounds":    {"xmin": 0, "ymin": 0, "xmax": 1, "ymax": 1},
///     "obstacles": [ [[x, y], [x, y], [x, y], ...], ... ],
///     "init":      [x, y],
///     "goal":      [x, y]
///   }
///
/// "obstacles" may be omitted or empty. Errors are ScenarioError with the JSON
/// path of the offending field.
World parse_scenario(std::string_view text);
World load_scenario(const std::filesystem::path& path);

/// Uniform-grid bucket index over inserted points. Cell size tracks the point
/// density and is re-bucketed as the set grows. Results are exactly those of a
/// linear scan using `cost`.
class SpatialIndex {
 public:
  explicit SpatialIndex(Bounds bounds);

  void insert(VertexId id, State s);
  std::size_t size() const { return ids_.size(); }
  bool empty() const { return ids_.empty(); }

  /// Argmin of cost(q, .) with ties going to the lowest id. Throws
  /// std::logic_error on an empty index.
  VertexId nearest(State q) const;

  /// All ids with cost(q, state) <= r, ascending.
  std::vector<VertexId> near(State q, double r) const;

 private:
  void rebucket();
  std::size_t cell_x(double x) const;
  std::size_t cell_y(double y) const;

  Bounds bounds_;
  double cell_ = 1.0;
  std::size_t nx_ = 1;
  std::size_t ny_ = 1;
  std::size_t next_rebucket_ = 16;
  std::vector<std::vector<std::uint32_t>> cells_;
  std::vector<State> points_;
  std::vector<VertexId> ids_;
};

}  // namespace berrt
