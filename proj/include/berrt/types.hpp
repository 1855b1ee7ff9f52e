#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace berrt {

/// A point in the 2D configuration space.
struct State {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const State&, const State&) = default;
};

using VertexId = std::uint32_t;

inline constexpr VertexId kNoVertex = std::numeric_limits<VertexId>::max();
inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Malformed scenario input. `field()` names the offending entry, e.g.
/// "obstacles[2][1]".
class ScenarioError : public std::runtime_error {
 public:
  ScenarioError(std::string field, const std::string& what)
      : std::runtime_error(field + ": " + what), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Free space is empty or too small to sample within the rejection budget.
class DegenerateWorldError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A graph structure violated one of its invariants (bad vertex id, duplicate
/// edge, parent cycle).
class GraphCorruptionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Policy iteration exceeded its iteration cap.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace berrt
