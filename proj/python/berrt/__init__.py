"""Batched-extension policy-iteration planner (C++ core)."""

from ._core import (
    Bounds,
    PlannerConfig,
    PlanResult,
    RunRecord,
    ScenarioError,
    State,
    World,
    cost,
    heuristic,
    load_scenario,
    parse_scenario,
    plan,
    run_matrix,
    summarize,
    to_csv,
    to_json,
)

__all__ = [
    "Bounds",
    "PlannerConfig",
    "PlanResult",
    "RunRecord",
    "ScenarioError",
    "State",
    "World",
    "cost",
    "heuristic",
    "load_scenario",
    "parse_scenario",
    "plan",
    "run_matrix",
    "summarize",
    "to_csv",
    "to_json",
]
