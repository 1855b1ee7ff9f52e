#include "berrt/world.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace berrt {
namespace {

double orient(State a, State b, State p) {
  return (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
}

int sign(double v) { return (v > 0.0) - (v < 0.0); }

// p known collinear with a-b; is it within the segment's box?
bool on_segment(State a, State b, State p) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) &&
         std::min(a.y, b.y) <= p.y && p.y <= std::max(a.y, b.y);
}

// Closed-segment intersection, touching and collinear overlap included.
bool segments_intersect(State p1, State p2, State q1, State q2) {
  const int d1 = sign(orient(q1, q2, p1));
  const int d2 = sign(orient(q1, q2, p2));
  const int d3 = sign(orient(p1, p2, q1));
  const int d4 = sign(orient(p1, p2, q2));
  if (d1 * d2 < 0 && d3 * d4 < 0) return true;
  if (d1 == 0 && on_segment(q1, q2, p1)) return true;
  if (d2 == 0 && on_segment(q1, q2, p2)) return true;
  if (d3 == 0 && on_segment(p1, p2, q1)) return true;
  if (d4 == 0 && on_segment(p1, p2, q2)) return true;
  return false;
}

bool finite(State s) { return std::isfinite(s.x) && std::isfinite(s.y); }

Bounds bounding_box(std::span<const State> pts) {
  Bounds box{pts[0].x, pts[0].y, pts[0].x, pts[0].y};
  for (State p : pts) {
    box.xmin = std::min(box.xmin, p.x);
    box.ymin = std::min(box.ymin, p.y);
    box.xmax = std::max(box.xmax, p.x);
    box.ymax = std::max(box.ymax, p.y);
  }
  return box;
}

bool boxes_overlap(const Bounds& box, State a, State b) {
  return std::max(a.x, b.x) >= box.xmin && std::min(a.x, b.x) <= box.xmax &&
         std::max(a.y, b.y) >= box.ymin && std::min(a.y, b.y) <= box.ymax;
}

}  // namespace

double cost(State a, State b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return std::sqrt(dx * dx + dy * dy);
}

// ---------------------------------------------------------------------------
// Polygon

Polygon::Polygon(std::vector<State> vertices) : vertices_(std::move(vertices)) {
  const std::size_t n = vertices_.size();
  if (n < 3) throw std::invalid_argument("polygon needs at least 3 vertices");
  for (State p : vertices_) {
    if (!finite(p)) throw std::invalid_argument("non-finite polygon vertex");
  }
  for (std::size_t i = 0; i < n; ++i) {
    const State a1 = vertices_[i];
    const State a2 = vertices_[(i + 1) % n];
    if (a1 == a2) throw std::invalid_argument("repeated polygon vertex");
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool adjacent = j == i + 1 || (i == 0 && j == n - 1);
      const State b1 = vertices_[j];
      const State b2 = vertices_[(j + 1) % n];
      if (adjacent) {
        // Adjacent edges share one endpoint; they may not fold back onto each
        // other.
        const State shared = (j == i + 1) ? a2 : a1;
        const State other_a = (j == i + 1) ? a1 : a2;
        const State other_b = (j == i + 1) ? b2 : b1;
        if (sign(orient(shared, other_a, other_b)) == 0 &&
            (other_b.x - shared.x) * (other_a.x - shared.x) +
                    (other_b.y - shared.y) * (other_a.y - shared.y) >
                0.0) {
          throw std::invalid_argument("polygon edges overlap");
        }
        continue;
      }
      if (segments_intersect(a1, a2, b1, b2)) {
        throw std::invalid_argument("polygon is self-intersecting");
      }
    }
  }
  box_ = bounding_box(vertices_);
}

bool Polygon::contains(State p) const {
  if (!box_.contains(p)) return false;
  bool inside = false;
  const std::size_t n = vertices_.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const State a = vertices_[i];
    const State b = vertices_[j];
    if (sign(orient(a, b, p)) == 0 && on_segment(a, b, p)) return true;
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x_cross = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < x_cross) inside = !inside;
    }
  }
  return inside;
}

bool Polygon::boundary_intersects(State a, State b) const {
  if (!boxes_overlap(box_, a, b)) return false;
  const std::size_t n = vertices_.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (segments_intersect(a, b, vertices_[i], vertices_[(i + 1) % n])) {
      return true;
    }
  }
  return false;
}

double Polygon::area() const {
  double twice = 0.0;
  const std::size_t n = vertices_.size();
  for (std::size_t i = 0; i < n; ++i) {
    const State a = vertices_[i];
    const State b = vertices_[(i + 1) % n];
    twice += a.x * b.y - b.x * a.y;
  }
  return std::abs(twice) * 0.5;
}

// ---------------------------------------------------------------------------
// World

World::World(Bounds bounds, std::vector<Polygon> obstacles, State init,
             State goal)
    : bounds_(bounds),
      obstacles_(std::move(obstacles)),
      init_(init),
      goal_(goal) {
  if (!(bounds_.xmin < bounds_.xmax) || !(bounds_.ymin < bounds_.ymax) ||
      !std::isfinite(bounds_.area())) {
    throw ScenarioError("bounds", "empty or non-finite rectangle");
  }
  auto check_endpoint = [this](State s, const char* field) {
    if (!finite(s)) throw ScenarioError(field, "non-finite coordinate");
    if (!bounds_.contains(s)) throw ScenarioError(field, "outside bounds");
    for (std::size_t i = 0; i < obstacles_.size(); ++i) {
      if (obstacles_[i].contains(s)) {
        throw ScenarioError(field,
                            "inside obstacle " + std::to_string(i));
      }
    }
  };
  check_endpoint(init_, "init");
  check_endpoint(goal_, "goal");
}

bool World::is_free(State p) const {
  if (!bounds_.contains(p)) return false;
  return std::none_of(obstacles_.begin(), obstacles_.end(),
                      [p](const Polygon& poly) { return poly.contains(p); });
}

bool World::segment_collides(State a, State b) const {
  // Canonical endpoint order makes the predicate exactly symmetric under
  // floating point.
  if (b.x < a.x || (b.x == a.x && b.y < a.y)) std::swap(a, b);
  if (!bounds_.contains(a) || !bounds_.contains(b)) return true;
  const State mid{(a.x + b.x) * 0.5, (a.y + b.y) * 0.5};
  for (const Polygon& poly : obstacles_) {
    if (poly.boundary_intersects(a, b)) return true;
    if (poly.contains(mid)) return true;
  }
  return false;
}

double World::free_area_estimate(std::size_t samples) const {
  if (obstacles_.empty()) return bounds_.area();
  Rng rng(0x5eedf00dULL);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < samples; ++i) {
    const State p{rng.uniform(bounds_.xmin, bounds_.xmax),
                  rng.uniform(bounds_.ymin, bounds_.ymax)};
    if (is_free(p)) ++hits;
  }
  return bounds_.area() * static_cast<double>(hits) /
         static_cast<double>(samples);
}

State sample_free(Rng& rng, const World& world, std::size_t budget) {
  const Bounds& b = world.bounds();
  for (std::size_t attempt = 0; attempt < budget; ++attempt) {
    const State p{rng.uniform(b.xmin, b.xmax), rng.uniform(b.ymin, b.ymax)};
    if (world.is_free(p)) return p;
  }
  throw DegenerateWorldError("no free sample after " + std::to_string(budget) +
                             " attempts");
}

double heuristic(State v, const World& world) { return cost(v, world.goal()); }

// ---------------------------------------------------------------------------
// Scenario parsing

namespace {

using nlohmann::json;

double read_number(const json& node, const std::string& field) {
  if (!node.is_number()) throw ScenarioError(field, "expected a number");
  const double v = node.get<double>();
  if (!std::isfinite(v)) throw ScenarioError(field, "non-finite number");
  return v;
}

State read_point(const json& node, const std::string& field) {
  if (!node.is_array() || node.size() != 2) {
    throw ScenarioError(field, "expected [x, y] pair");
  }
  return {read_number(node[0], field + "[0]"), read_number(node[1], field + "[1]")};
}

const json& require(const json& doc, const char* key) {
  auto it = doc.find(key);
  if (it == doc.end()) throw ScenarioError(key, "missing field");
  return *it;
}

}  // namespace

World parse_scenario(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ScenarioError("<document>", e.what());
  }
  if (!doc.is_object()) throw ScenarioError("<document>", "expected an object");

  const json& jb = require(doc, "bounds");
  if (!jb.is_object()) throw ScenarioError("bounds", "expected an object");
  Bounds bounds;
  for (auto [key, slot] : {std::pair{"xmin", &bounds.xmin},
                           std::pair{"ymin", &bounds.ymin},
                           std::pair{"xmax", &bounds.xmax},
                           std::pair{"ymax", &bounds.ymax}}) {
    const std::string field = std::string("bounds.") + key;
    auto it = jb.find(key);
    if (it == jb.end()) throw ScenarioError(field, "missing field");
    *slot = read_number(*it, field);
  }

  std::vector<Polygon> obstacles;
  if (auto it = doc.find("obstacles"); it != doc.end()) {
    if (!it->is_array()) throw ScenarioError("obstacles", "expected a list");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const std::string field = "obstacles[" + std::to_string(i) + "]";
      const json& loop = (*it)[i];
      if (!loop.is_array()) throw ScenarioError(field, "expected a vertex list");
      std::vector<State> verts;
      for (std::size_t k = 0; k < loop.size(); ++k) {
        verts.push_back(read_point(loop[k], field + "[" + std::to_string(k) + "]"));
      }
      try {
        obstacles.emplace_back(std::move(verts));
      } catch (const std::invalid_argument& e) {
        throw ScenarioError(field, e.what());
      }
    }
  }

  const State init = read_point(require(doc, "init"), "init");
  const State goal = read_point(require(doc, "goal"), "goal");
  return World(bounds, std::move(obstacles), init, goal);
}

World load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("<file>", "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

// ---------------------------------------------------------------------------
// SpatialIndex

SpatialIndex::SpatialIndex(Bounds bounds) : bounds_(bounds) { rebucket(); }

std::size_t SpatialIndex::cell_x(double x) const {
  const double c = std::floor((x - bounds_.xmin) / cell_);
  if (!(c > 0.0)) return 0;
  return std::min(static_cast<std::size_t>(c), nx_ - 1);
}

std::size_t SpatialIndex::cell_y(double y) const {
  const double c = std::floor((y - bounds_.ymin) / cell_);
  if (!(c > 0.0)) return 0;
  return std::min(static_cast<std::size_t>(c), ny_ - 1);
}

void SpatialIndex::rebucket() {
  // Aim for a couple of points per cell at the next growth step.
  const double target = static_cast<double>(std::max<std::size_t>(next_rebucket_, 16)) / 2.0;
  cell_ = std::sqrt(bounds_.area() / target);
  nx_ = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(bounds_.width() / cell_)));
  ny_ = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(bounds_.height() / cell_)));
  cells_.assign(nx_ * ny_, {});
  for (std::uint32_t i = 0; i < points_.size(); ++i) {
    cells_[cell_y(points_[i].y) * nx_ + cell_x(points_[i].x)].push_back(i);
  }
}

void SpatialIndex::insert(VertexId id, State s) {
  points_.push_back(s);
  ids_.push_back(id);
  if (points_.size() > next_rebucket_) {
    next_rebucket_ *= 2;
    rebucket();
    return;
  }
  const auto slot = static_cast<std::uint32_t>(points_.size() - 1);
  cells_[cell_y(s.y) * nx_ + cell_x(s.x)].push_back(slot);
}

VertexId SpatialIndex::nearest(State q) const {
  if (empty()) throw std::logic_error("nearest() on an empty spatial index");
  const auto cx = static_cast<std::ptrdiff_t>(cell_x(q.x));
  const auto cy = static_cast<std::ptrdiff_t>(cell_y(q.y));
  // Distance from q to the nearest point of its own (clamped) cell; queries
  // outside the bounds are handled by subtracting this slack.
  const double ox = std::max({bounds_.xmin + cx * cell_ - q.x, 0.0,
                              q.x - (bounds_.xmin + (cx + 1) * cell_)});
  const double oy = std::max({bounds_.ymin + cy * cell_ - q.y, 0.0,
                              q.y - (bounds_.ymin + (cy + 1) * cell_)});
  const double slack = std::max(ox, oy);

  double best = kInfinity;
  VertexId best_id = kNoVertex;
  const auto max_ring = static_cast<std::ptrdiff_t>(std::max(nx_, ny_));
  for (std::ptrdiff_t ring = 0; ring <= max_ring; ++ring) {
    for (std::ptrdiff_t gy = cy - ring; gy <= cy + ring; ++gy) {
      if (gy < 0 || gy >= static_cast<std::ptrdiff_t>(ny_)) continue;
      const bool edge_row = gy == cy - ring || gy == cy + ring;
      const std::ptrdiff_t step = edge_row ? 1 : 2 * ring;
      for (std::ptrdiff_t gx = cx - ring; gx <= cx + ring; gx += std::max<std::ptrdiff_t>(step, 1)) {
        if (gx < 0 || gx >= static_cast<std::ptrdiff_t>(nx_)) continue;
        for (std::uint32_t slot : cells_[gy * nx_ + gx]) {
          const double d = cost(q, points_[slot]);
          if (d < best || (d == best && ids_[slot] < best_id)) {
            best = d;
            best_id = ids_[slot];
          }
        }
      }
    }
    // Every point in ring+1 or beyond is at least ring*cell_ - slack away.
    if (best_id != kNoVertex && static_cast<double>(ring) * cell_ - slack > best) break;
  }
  return best_id;
}

std::vector<VertexId> SpatialIndex::near(State q, double r) const {
  std::vector<VertexId> out;
  if (empty() || !(r >= 0.0)) return out;
  const std::size_t x0 = cell_x(q.x - r), x1 = cell_x(q.x + r);
  const std::size_t y0 = cell_y(q.y - r), y1 = cell_y(q.y + r);
  for (std::size_t gy = y0; gy <= y1; ++gy) {
    for (std::size_t gx = x0; gx <= x1; ++gx) {
      for (std::uint32_t slot : cells_[gy * nx_ + gx]) {
        if (cost(q, points_[slot]) <= r) out.push_back(ids_[slot]);
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace berrt
