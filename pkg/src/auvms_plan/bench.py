"""Seed sweeps comparing the guided planner with the RRT baseline."""

from __future__ import annotations

import csv
import io
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

from .artifacts import path_length
from .planner import FOUND, PLANNERS, PlannerParams
from .postprocess import smooth_path
from .world import Scenario

BENCH_HEADER = "# auvms-plan bench v1"
TABLE_HEADER = "# auvms-plan bench-table v1"
TIMING_COLUMNS = ("elapsed_s",)


@dataclass
class BenchRow:
    scenario: str
    algorithm: str
    seed: int
    status: str
    elapsed_s: float
    iterations: int
    tree_size: int
    raw_nodes: int
    smoothed_nodes: int
    raw_length_m: float
    smoothed_length_m: float
    rng_draws: int
    repeats: int = 1

    @property
    def found(self):
        return self.status == FOUND


@dataclass
class BenchReport:
    scenario: str
    max_total_iterations: int
    rows: list = field(default_factory=list)

    @property
    def algorithms(self):
        return list(dict.fromkeys(r.algorithm for r in self.rows))

    @property
    def seeds(self):
        return sorted({r.seed for r in self.rows})

    def effective_iterations(self, algorithm):
        """Iterations per row, NotFound rows charged the full iteration budget."""
        return [r.iterations if r.found else self.max_total_iterations
                for r in self.rows if r.algorithm == algorithm]

    def summary(self):
        """Per-algorithm aggregates; timing values live under the ``timing`` key."""
        out = {"scenario": self.scenario, "algorithms": {}, "timing": {}}
        for algo in self.algorithms:
            rows = [r for r in self.rows if r.algorithm == algo]
            out["algorithms"][algo] = {
                "runs": len(rows),
                "found": sum(r.found for r in rows),
                "median_iterations": statistics.median(self.effective_iterations(algo)),
                "median_tree_size": statistics.median(r.tree_size for r in rows),
            }
            out["timing"][algo] = {"median_elapsed_s": statistics.median(r.elapsed_s for r in rows)}
        if {"rrt", "rrtauvms"} <= set(self.algorithms):
            a, b = out["algorithms"]["rrt"], out["algorithms"]["rrtauvms"]
            out["iteration_speedup"] = a["median_iterations"] / max(b["median_iterations"], 1)
            ta = out["timing"]["rrt"]["median_elapsed_s"]
            tb = out["timing"]["rrtauvms"]["median_elapsed_s"]
            out["timing"]["time_speedup"] = ta / tb if tb > 0 else float("inf")
        return out

    def to_csv(self, include_timing=True):
        cols = [f for f in BenchRow.__dataclass_fields__ if include_timing or f not in TIMING_COLUMNS]
        buf = io.StringIO()
        buf.write(BENCH_HEADER + "\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(cols)
        for r in self.rows:
            d = asdict(r)
            w.writerow([_cell(d[c]) for c in cols])
        return buf.getvalue()

    def to_table(self):
        """Seed-by-algorithm layout: one line per seed, time and status per algorithm."""
        algos = self.algorithms
        by = {(r.algorithm, r.seed): r for r in self.rows}
        buf = io.StringIO()
        buf.write(TABLE_HEADER + "\n")
        w = csv.writer(buf, lineterminator="\n")
        head = ["seed"]
        for a in algos:
            head += [f"{a}_time_s", f"{a}_status", f"{a}_iterations"]
        w.writerow(head)
        for s in self.seeds:
            line = [s]
            for a in algos:
                r = by.get((a, s))
                line += ["", "", ""] if r is None else [f"{r.elapsed_s:.6f}", r.status, r.iterations]
            w.writerow(line)
        return buf.getvalue()


def _cell(v):
    if isinstance(v, float):
        return f"{v:.6f}" if v == v else "nan"
    return v


def _run_one(task):
    scenario, params, algorithm, seed, repeats = task
    p = params.with_changes(seed=seed)
    results = [PLANNERS[algorithm](scenario, p) for _ in range(repeats)]
    first = results[0]
    for r in results[1:]:
        if (r.status, r.iterations, len(r.tree)) != (first.status, first.iterations, len(first.tree)):
            raise RuntimeError(f"{algorithm} seed {seed}: repeated runs disagree")
    raw_nodes = smoothed_nodes = 0
    raw_len = sm_len = float("nan")
    if first.found:
        sm = smooth_path(first.raw_path, scenario)
        raw_nodes, smoothed_nodes = len(first.raw_path), len(sm)
        raw_len = path_length(first.raw_path, scenario.dh)
        sm_len = path_length(sm.nodes, scenario.dh)
    return BenchRow(
        scenario=scenario.name, algorithm=algorithm, seed=seed, status=first.status,
        elapsed_s=statistics.median(r.elapsed for r in results), iterations=first.iterations,
        tree_size=len(first.tree), raw_nodes=raw_nodes, smoothed_nodes=smoothed_nodes,
        raw_length_m=raw_len, smoothed_length_m=sm_len, rng_draws=first.rng_draws,
        repeats=repeats,
    )


def run_bench(scenario: Scenario, params: PlannerParams, seeds, algorithms=("rrt", "rrtauvms"),
              repeats=1, jobs=1) -> BenchReport:
    """One row per (algorithm, seed); NotFound rows are recorded, never fatal.

    Rows come back ordered by algorithm then seed whatever ``jobs`` is.
    """
    seeds = list(seeds)
    if not seeds:
        raise ValueError("need at least one seed")
    for a in algorithms:
        if a not in PLANNERS:
            raise ValueError(f"unknown algorithm {a!r}")
    tasks = [(scenario, params, a, s, repeats) for a in algorithms for s in seeds]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_run_one, tasks))
    else:
        rows = [_run_one(t) for t in tasks]
    return BenchReport(scenario.name, params.max_total_iterations, rows)
