#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "berrt/bench.hpp"
#include "berrt/planner.hpp"

namespace py = pybind11;
using namespace berrt;

namespace {

State to_state(py::handle h) {
  if (py::isinstance<State>(h)) return h.cast<State>();
  const auto seq = h.cast<std::vector<double>>();
  if (seq.size() != 2) throw py::value_error("a state is an (x, y) pair");
  return {seq[0], seq[1]};
}

World make_world(const Bounds& bounds, const std::vector<std::vector<py::object>>& obstacles,
                  const py::object& init, const py::object& goal) {
  std::vector<Polygon> polys;
  for (const auto& loop : obstacles) {
    std::vector<State> pts;
    for (const auto& p : loop) pts.push_back(to_state(p));
    polys.emplace_back(std::move(pts));
  }
  return World(bounds, std::move(polys), to_state(init), to_state(goal));
}

py::dict replan_dict(const ReplanStats& s) {
  py::dict d;
  d["iterations"] = s.iterations;
  d["delta_g_trace"] = s.delta_g_trace;
  d["wall_time"] = s.wall_time;
  d["rebuild_time"] = s.rebuild_time;
  d["goal_cost"] = s.goal_cost;
  d["promising_size"] = s.promising_size;
  return d;
}

py::dict summary_row_dict(const SummaryRow& r) {
  py::dict d;
  d["n_samples"] = r.n_samples;
  d["batch_size"] = r.batch_size;
  d["backend"] = r.backend;
  d["trials"] = r.trials;
  d["total_mean"] = r.total_mean;
  d["total_std"] = r.total_std;
  d["exploit_mean"] = r.exploit_mean;
  d["exploit_std"] = r.exploit_std;
  d["cost_mean"] = r.cost_mean;
  d["cost_std"] = r.cost_std;
  d["batch_speedup"] = r.batch_speedup;
  d["backend_speedup"] = r.backend_speedup;
  d["reference_speedup"] = r.reference_speedup;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Batched-extension policy-iteration planner";

  py::register_exception<ScenarioError>(m, "ScenarioError", PyExc_ValueError);
  py::register_exception<DegenerateWorldError>(m, "DegenerateWorldError", PyExc_RuntimeError);
  py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_RuntimeError);
  py::register_exception<GraphCorruptionError>(m, "GraphCorruptionError", PyExc_RuntimeError);

  py::class_<State>(m, "State")
      .def(py::init<double, double>(), py::arg("x"), py::arg("y"))
      .def_readwrite("x", &State::x)
      .def_readwrite("y", &State::y)
      .def("__iter__", [](const State& s) { return py::iter(py::make_tuple(s.x, s.y)); })
      .def("__eq__", [](const State& a, const State& b) { return a == b; })
      .def("__repr__", [](const State& s) {
        return "State(" + std::to_string(s.x) + ", " + std::to_string(s.y) + ")";
      });

  py::class_<Bounds>(m, "Bounds")
      .def(py::init([](double xmin, double ymin, double xmax, double ymax) {
             return Bounds{xmin, ymin, xmax, ymax};
           }),
           py::arg("xmin"), py::arg("ymin"), py::arg("xmax"), py::arg("ymax"))
      .def_readonly("xmin", &Bounds::xmin)
      .def_readonly("ymin", &Bounds::ymin)
      .def_readonly("xmax", &Bounds::xmax)
      .def_readonly("ymax", &Bounds::ymax)
      .def("area", &Bounds::area);

  py::class_<World>(m, "World")
      .def(py::init(&make_world), py::arg("bounds"), py::arg("obstacles"), py::arg("init"),
           py::arg("goal"))
      .def_property_readonly("bounds", &World::bounds)
      .def_property_readonly("init", &World::init)
      .def_property_readonly("goal", &World::goal)
      .def_property_readonly("obstacle_count", [](const World& w) { return w.obstacles().size(); })
      .def("is_free", [](const World& w, py::object p) { return w.is_free(to_state(p)); })
      .def("segment_collides", [](const World& w, py::object a, py::object b) {
        return w.segment_collides(to_state(a), to_state(b));
      })
      .def("free_area_estimate", &World::free_area_estimate, py::arg("samples") = 200'000);

  m.def("load_scenario", &load_scenario, py::arg("path"));
  m.def("parse_scenario", &parse_scenario, py::arg("text"));
  m.def("cost", [](py::object a, py::object b) { return cost(to_state(a), to_state(b)); });
  m.def("heuristic", [](py::object v, const World& w) { return heuristic(to_state(v), w); });

  py::class_<PlannerConfig>(m, "PlannerConfig")
      .def(py::init<>())
      .def_readwrite("n_samples", &PlannerConfig::n_samples)
      .def_readwrite("batch_size", &PlannerConfig::batch_size)
      .def_readwrite("epsilon", &PlannerConfig::epsilon)
      .def_readwrite("steer_range", &PlannerConfig::steer_range)
      .def_readwrite("gamma", &PlannerConfig::gamma)
      .def_readwrite("seed", &PlannerConfig::seed)
      .def_readwrite("workers", &PlannerConfig::workers)
      .def_readwrite("validate", &PlannerConfig::validate)
      .def_property(
          "backend", [](const PlannerConfig& c) { return std::string(to_string(c.backend)); },
          [](PlannerConfig& c, const std::string& name) { c.backend = parse_backend(name); });

  py::class_<PlanResult>(m, "PlanResult")
      .def_readonly("path", &PlanResult::path)
      .def_readonly("path_cost", &PlanResult::path_cost)
      .def_readonly("gamma", &PlanResult::gamma)
      .def_readonly("extensions_added", &PlanResult::extensions_added)
      .def_property_readonly("vertex_count", [](const PlanResult& r) { return r.vertices.size(); })
      .def_property_readonly("edge_count", [](const PlanResult& r) { return r.edges.size(); })
      .def_property_readonly("g", [](const PlanResult& r) { return r.vertices.g; })
      .def_property_readonly("parent", [](const PlanResult& r) { return r.vertices.parent; })
      .def_property_readonly("promising", [](const PlanResult& r) { return r.promising; })
      .def_property_readonly("edges",
                             [](const PlanResult& r) {
                               py::list out;
                               for (const Edge& e : r.edges) out.append(py::make_tuple(e.src, e.dst, e.cost));
                               return out;
                             })
      .def_property_readonly("per_replan",
                             [](const PlanResult& r) {
                               py::list out;
                               for (const auto& s : r.per_replan) out.append(replan_dict(s));
                               return out;
                             })
      .def_property_readonly("totals", [](const PlanResult& r) {
        py::dict d;
        d["explore"] = r.totals.explore;
        d["exploit"] = r.totals.exploit;
        d["rebuild"] = r.totals.rebuild;
        d["total"] = r.totals.total;
        return d;
      });

  m.def("plan", &plan, py::arg("world"), py::arg("config"),
        py::call_guard<py::gil_scoped_release>());

  py::class_<RunRecord>(m, "RunRecord")
      .def_readonly("scenario", &RunRecord::scenario)
      .def_readonly("n_samples", &RunRecord::n_samples)
      .def_readonly("batch_size", &RunRecord::batch_size)
      .def_readonly("backend", &RunRecord::backend)
      .def_readonly("workers", &RunRecord::workers)
      .def_readonly("trial", &RunRecord::trial)
      .def_readonly("seed", &RunRecord::seed)
      .def_readonly("status", &RunRecord::status)
      .def_readonly("message", &RunRecord::message)
      .def_readonly("vertices", &RunRecord::vertices)
      .def_readonly("edges", &RunRecord::edges)
      .def_readonly("replans", &RunRecord::replans)
      .def_readonly("policy_iterations", &RunRecord::policy_iterations)
      .def_readonly("max_policy_iterations", &RunRecord::max_policy_iterations)
      .def_readonly("path_cost", &RunRecord::path_cost)
      .def_readonly("explore_time", &RunRecord::explore_time)
      .def_readonly("exploit_time", &RunRecord::exploit_time)
      .def_readonly("rebuild_time", &RunRecord::rebuild_time)
      .def_readonly("total_time", &RunRecord::total_time)
      .def_readonly("monotone", &RunRecord::monotone)
      .def_readonly("replan_times", &RunRecord::replan_times)
      .def_readonly("replan_iterations", &RunRecord::replan_iterations)
      .def_readonly("goal_costs", &RunRecord::goal_costs);

  m.def(
      "run_matrix",
      [](const std::string& scenario, std::vector<std::size_t> samples,
         const std::vector<std::string>& batches, const std::vector<std::string>& backends,
         std::size_t trials, std::uint64_t seed, double epsilon, std::size_t workers,
         bool validate) {
        TrialSpec spec;
        spec.scenario = scenario;
        spec.samples = std::move(samples);
        for (const auto& b : batches) spec.batches.push_back(parse_batch_size(b));
        spec.backends.clear();
        for (const auto& b : backends) spec.backends.push_back(parse_backend(b));
        spec.trials = trials;
        spec.seed = seed;
        spec.epsilon = epsilon;
        spec.workers = workers;
        spec.validate = validate;
        py::gil_scoped_release release;
        return run_matrix(spec);
      },
      py::arg("scenario"), py::arg("samples"), py::arg("batches") = std::vector<std::string>{"1"},
      py::arg("backends") = std::vector<std::string>{"serial"}, py::arg("trials") = 5,
      py::arg("seed") = 1, py::arg("epsilon") = 1e-6, py::arg("workers") = 0,
      py::arg("validate") = false);

  m.def("summarize", [](const std::vector<RunRecord>& records) {
    const Summary s = summarize(records);
    py::list rows;
    for (const auto& r : s.rows) rows.append(summary_row_dict(r));
    py::dict crossovers;
    for (const auto& c : s.crossovers) crossovers[py::int_(c.batch_size)] = c.n0;
    py::dict out;
    out["rows"] = rows;
    out["crossovers"] = crossovers;
    return out;
  });
  m.def("to_csv", &to_csv);
  m.def("to_json", &to_json);
}
