"""Command-line front end: ``plan``, ``bench``, ``validate`` and ``replay``.

Outputs go under ``$AUVMS_PLAN_OUTPUT`` (default ``./auvms_runs``) unless
``--out`` names a directory explicitly.

Exit codes: 0 success, 1 planner found no path, 2 invalid input,
3 replayed path or tree collides.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path


from . import artifacts
from .bench import run_bench
from .errors import AUVMSError, DegeneratePath, InvalidScenario
from .planner import PLANNERS
from .postprocess import DEFAULT_SPEED, smooth_path, spline_trajectory
from .scenario import load_scenario
from .world import config_free, edge_free

log = logging.getLogger("auvms_plan")

OUTPUT_ENV = "AUVMS_PLAN_OUTPUT"
EXIT_OK, EXIT_NOT_FOUND, EXIT_INVALID, EXIT_COLLISION = 0, 1, 2, 3

# dedicated flag -> dotted scenario key
FLAG_KEYS = {
    "seed": "planner.seed",
    "p_g": "planner.p_g",
    "K": "planner.K",
    "max_iterations": "planner.max_total_iterations",
    "goal_threshold": "planner.goal_threshold",
    "stall_limit": "planner.stall_limit",
    "goal_radius": "goal.radius",
    "collision_margin": "collision_margin",
    "edge_resolution": "edge_resolution",
}


def output_root():
    return Path(os.environ.get(OUTPUT_ENV, "auvms_runs"))


def _overrides(args):
    out = []
    for attr, key in FLAG_KEYS.items():
        val = getattr(args, attr, None)
        if val is not None:
            out.append(f"{key}={val}")
    return out + list(getattr(args, "set", None) or [])


def run_plan(scenario_path, algorithm="rrtauvms", overrides=(), out_dir=None, speed=DEFAULT_SPEED,
             rate=10.0, figures=True):
    """Plan, smooth, spline and export; returns ``(PlanResult, {artifact: path})``."""
    scenario, params = load_scenario(scenario_path, overrides)
    result = PLANNERS[algorithm](scenario, params)
    if out_dir is None:
        out_dir = output_root() / f"{scenario.name}_{algorithm}_seed{params.seed}"
    out_dir = Path(out_dir)
    files = {}
    files["tree"] = artifacts.write_tree(out_dir / "tree_edges.csv", result.tree)
    files["path"] = artifacts.write_path(out_dir / "path.csv", result.raw_path, scenario.dh)
    meta = {
        "format": artifacts.RESULT_VERSION,
        "scenario": scenario.name,
        "algorithm": algorithm,
        "seed": params.seed,
        "status": result.status,
        "iterations": result.iterations,
        "passes": result.passes,
        "elapsed_s": result.elapsed,
        "rng_draws": result.rng_draws,
        "tree_size": len(result.tree),
        "raw_nodes": len(result.raw_path),
        "random_extensions": result.random_extensions,
        "goal_extensions": result.goal_extensions,
        "singular_jacobians": result.singular_count,
        "stalls": result.stall_count,
    }
    smoothed = traj = None
    if result.found:
        smoothed = smooth_path(result.raw_path, scenario)
        files["smoothed"] = artifacts.write_path(out_dir / "smoothed.csv", smoothed.nodes, scenario.dh)
        meta["smoothed_nodes"] = len(smoothed)
        meta["raw_length_m"] = artifacts.path_length(result.raw_path, scenario.dh)
        meta["smoothed_length_m"] = artifacts.path_length(smoothed.nodes, scenario.dh)
        try:
            traj = spline_trajectory(smoothed, speed)
        except DegeneratePath:
            log.info("path has no workspace length; trajectory skipped")
        if traj is not None:
            files["trajectory"] = artifacts.write_trajectory(
                out_dir / "trajectory.csv", traj.table(rate, scenario.dh))
            meta["trajectory"] = {"duration_s": traj.duration, "valid": traj.valid,
                                  "inserted_knots": traj.inserted, "speed_mps": speed, "rate_hz": rate}
    if figures:
        from . import plotting

        files["fig_search"] = plotting.plot_search(
            result, scenario, None if smoothed is None else smoothed.nodes, out_dir / "search.png")
        if traj is not None:
            files["fig_trajectory"] = plotting.plot_trajectory(traj, scenario, out_dir / "trajectory.png")
            files["fig_eef"] = plotting.plot_eef_history(traj, scenario, out_dir / "eef_history.png")
    files["result"] = artifacts.write_json(out_dir / "result.json", meta)
    return result, files


def _parse_seeds(text):
    seeds = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if ":" in part:
            lo, hi = part.split(":", 1)
            seeds.extend(range(int(lo), int(hi)))
        else:
            seeds.append(int(part))
    return seeds


def cmd_plan(args):
    result, files = run_plan(args.scenario, args.algo, _overrides(args), args.out, args.speed,
                             args.rate, not args.no_figures)
    print(f"{result.algorithm} seed={result.seed}: {result.status} after {result.iterations} "
          f"iterations ({result.elapsed:.3f} s), tree {len(result.tree)} nodes, "
          f"path {len(result.raw_path)} nodes")
    print(f"artifacts: {Path(files['result']).parent}")
    return EXIT_OK if result.found else EXIT_NOT_FOUND


def cmd_bench(args):
    scenario, params = load_scenario(args.scenario, _overrides(args))
    seeds = _parse_seeds(args.seeds)
    if not seeds:
        raise InvalidScenario("no seeds given")
    algos = [a.strip() for a in args.algos.split(",") if a.strip()]
    for a in algos:
        if a not in PLANNERS:
            raise InvalidScenario(f"unknown algorithm {a!r}")
    report = run_bench(scenario, params, seeds, algos, args.repeats, args.jobs)
    out = Path(args.out) if args.out else output_root() / f"bench_{scenario.name}"
    out.mkdir(parents=True, exist_ok=True)
    (out / "bench.csv").write_text(report.to_csv())
    (out / "bench_table.csv").write_text(report.to_table())
    artifacts.write_json(out / "summary.json", report.summary())
    if not args.no_figures:
        from . import plotting

        plotting.plot_bench(report, out / "bench.png")
    sys.stdout.write(report.to_table())
    print(json.dumps(report.summary(), indent=2, sort_keys=True))
    return EXIT_OK


def cmd_validate(args):
    scenario, params = load_scenario(args.scenario, _overrides(args))
    print(f"{scenario.name}: ok ({len(scenario.obstacles)} obstacles, goal "
          f"{list(scenario.goal_position)} r={scenario.goal_radius}, seed {params.seed})")
    return EXIT_OK


def cmd_replay(args):
    scenario, _ = load_scenario(args.scenario, _overrides(args))
    with open(args.file) as fh:
        header = fh.readline().strip()
    bad = []
    if header == artifacts.TREE_HEADER:
        edges = artifacts.read_tree(args.file)
        for child, parent, qc, qp in edges:
            if not edge_free(qp, qc, scenario):
                bad.append(f"edge {parent}->{child}")
        what = f"tree with {len(edges)} edges"
    elif header == artifacts.PATH_HEADER:
        path = artifacts.read_path(args.file)
        for i, q in enumerate(path):
            if not config_free(q, scenario):
                bad.append(f"node {i}")
        for i in range(len(path) - 1):
            if not edge_free(path[i], path[i + 1], scenario):
                bad.append(f"edge {i}->{i + 1}")
        if len(path) and args.require_goal:
            from .planner import distance_to_goal
            from .kinematics import eef_positions

            d = distance_to_goal(eef_positions(path[-1], scenario.dh)[0], scenario)
            if not d < scenario.goal_radius:
                bad.append(f"last node {d:.3f} m from goal")
        what = f"path with {len(path)} nodes"
    else:
        raise InvalidScenario(f"unrecognised export header {header!r}", args.file, 1)
    if bad:
        print(f"{what}: {len(bad)} violation(s): " + ", ".join(bad[:20]))
        return EXIT_COLLISION
    print(f"{what}: collision-free")
    return EXIT_OK


def _add_overrides(p):
    g = p.add_argument_group("overrides")
    g.add_argument("--seed", type=int)
    g.add_argument("--p-g", dest="p_g", type=float, help="random-extension probability")
    g.add_argument("--K", type=int, help="iterations per outer pass")
    g.add_argument("--max-iterations", type=int)
    g.add_argument("--goal-threshold", type=float)
    g.add_argument("--stall-limit", type=int)
    g.add_argument("--goal-radius", type=float)
    g.add_argument("--collision-margin", type=float)
    g.add_argument("--edge-resolution", type=float)
    g.add_argument("--set", action="append", metavar="KEY=VALUE",
                   help="override any scenario field by dotted key, e.g. planner.c_step=[...]")


def build_parser():
    parser = argparse.ArgumentParser(prog="auvms-plan", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("plan", help="run one planner and export its artifacts")
    p.add_argument("scenario")
    p.add_argument("--algo", choices=sorted(PLANNERS), default="rrtauvms")
    p.add_argument("--out", help="output directory")
    p.add_argument("--speed", type=float, default=DEFAULT_SPEED, help="tip speed for timing [m/s]")
    p.add_argument("--rate", type=float, default=10.0, help="trajectory sample rate [Hz]")
    p.add_argument("--no-figures", action="store_true")
    _add_overrides(p)
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("bench", help="sweep seeds over one or both planners")
    p.add_argument("scenario")
    p.add_argument("--seeds", default="10,20,30,40,50", help="comma list, ranges as a:b")
    p.add_argument("--algos", default="rrt,rrtauvms")
    p.add_argument("--repeats", type=int, default=1)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", help="output directory")
    p.add_argument("--no-figures", action="store_true")
    _add_overrides(p)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("validate", help="parse and check a scenario file")
    p.add_argument("scenario")
    _add_overrides(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("replay", help="re-check an exported path or tree against a scenario")
    p.add_argument("scenario")
    p.add_argument("file")
    p.add_argument("--require-goal", action="store_true", help="also require the path to end in the goal ball")
    _add_overrides(p)
    p.set_defaults(func=cmd_replay)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (AUVMSError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
