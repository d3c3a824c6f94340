"""Reading and writing scenario files.

A scenario file is YAML.  Every length is in meters and every angle in
radians; angle fields also accept the strings ``pi``, ``-pi/2``,
``0.5*pi`` and so on.  Top-level keys::

    name: paper_multi_obstacle
    bounds: {min: [-1, -1, -1], max: [6, 6, 6]}      # vehicle position box
    start: [x, y, z, yaw, q1, q2, q3, q4]
    goal: {position: [4, 4, 4], radius: 0.3}
    obstacles:                                       # spheres, may be empty
      - {center: [2, 2, 3], radius: 0.3}
    dh:                                              # exactly 4 rows
      - {a: 0.0, alpha: pi/2, d: 0.1, theta0: 0}
    limits:                                          # exactly 4 rows
      - {min: -2.0, max: 2.0, c: 1.0, bounded: true}
    vehicle_weights: [10, 10, 10, 10]
    collision_margin: 0.0
    edge_resolution: 0.05
    check_bodies: {vehicle_hull: [[x, y, z], ...], arm_links: false}
    planner:
      K: 100
      c_step: [0.1, 0.1, 0.1, 0.08, 0.05, 0.05, 0.05, 0.05]
      w_step: [0.2, 0.2, 0.2, 0.05, 0.05, 0.05]
      p_g: 0.5
      goal_threshold: null      # null: use goal.radius
      seed: 0
      max_total_iterations: 3000
      stall_limit: 20
      baseline_goal_bias: false

Everything except ``start`` and ``goal`` may be omitted and falls back to
the library defaults.
"""

from __future__ import annotations

import copy
import math
import re
from importlib import resources
from pathlib import Path

import yaml

from .errors import InvalidScenario
from .kinematics import DHParams
from .planner import PlannerParams
from .redundancy import JointLimits
from .world import CheckBodySet, Scenario, SphereObstacle

FORMAT_HEADER = "# auvms-plan scenario v1"

_PI_EXPR = re.compile(r"^\s*([-+]?)\s*(\d*\.?\d*)\s*\*?\s*pi\s*(?:/\s*(\d*\.?\d+))?\s*$")

TOP_KEYS = {
    "name", "bounds", "start", "goal", "obstacles", "dh", "limits", "vehicle_weights",
    "collision_margin", "edge_resolution", "check_bodies", "planner",
}
PLANNER_KEYS = set(PlannerParams.__dataclass_fields__)


class _Map(dict):
    """dict that remembers the source line of each key."""

    lines: dict
    line: int | None = None


class _LineLoader(yaml.SafeLoader):
    pass


def _construct_map(loader, node):
    loader.flatten_mapping(node)
    out = _Map()
    out.lines = {}
    out.line = node.start_mark.line + 1
    for key_node, value_node in node.value:
        key = loader.construct_object(key_node, deep=True)
        out[key] = loader.construct_object(value_node, deep=True)
        out.lines[key] = key_node.start_mark.line + 1
    return out


_LineLoader.add_constructor(yaml.resolver.BaseResolver.DEFAULT_MAPPING_TAG, _construct_map)


def parse_number(value):
    """Float from a number or a ``k*pi/n`` style string."""
    if isinstance(value, bool):
        raise ValueError(f"expected a number, got {value!r}")
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        m = _PI_EXPR.match(value)
        if m:
            sign, coef, den = m.groups()
            x = (float(coef) if coef not in ("", ".") else 1.0) * math.pi
            if den:
                x /= float(den)
            return -x if sign == "-" else x
        return float(value)
    raise ValueError(f"expected a number, got {value!r}")


def scenarios_dir() -> Path:
    return Path(str(resources.files("auvms_plan") / "scenarios"))


def resolve_scenario_path(name) -> Path:
    """Find a scenario file; bundled scenarios resolve by bare or ``scenarios/`` name."""
    p = Path(name)
    candidates = [p, p.with_suffix(".yaml")] if p.suffix == "" else [p]
    bundled = scenarios_dir()
    candidates += [bundled / p.name, bundled / (p.name + ".yaml")]
    for c in candidates:
        if c.is_file():
            return c
    raise FileNotFoundError(f"scenario not found: {name}")


class _Ctx:
    def __init__(self, source):
        self.source = source

    def fail(self, msg, mapping=None, key=None):
        line = None
        if isinstance(mapping, _Map):
            line = mapping.lines.get(key, mapping.line)
        raise InvalidScenario(msg, self.source, line)

    def num(self, mapping, key, default=None):
        if key not in mapping:
            if default is None:
                self.fail(f"missing required field {key!r}", mapping)
            return default
        try:
            return parse_number(mapping[key])
        except (TypeError, ValueError) as exc:
            self.fail(f"field {key!r}: {exc}", mapping, key)

    def vec(self, mapping, key, n, default=None):
        if key not in mapping:
            if default is None:
                self.fail(f"missing required field {key!r}", mapping)
            return tuple(default)
        val = mapping[key]
        if not isinstance(val, (list, tuple)) or len(val) != n:
            self.fail(f"field {key!r} must be a list of {n} numbers", mapping, key)
        try:
            return tuple(parse_number(v) for v in val)
        except (TypeError, ValueError) as exc:
            self.fail(f"field {key!r}: {exc}", mapping, key)

    def section(self, mapping, key):
        val = mapping.get(key, None)
        if val is None:
            return _empty()
        if not isinstance(val, dict):
            self.fail(f"field {key!r} must be a mapping", mapping, key)
        return val


def _empty():
    m = _Map()
    m.lines = {}
    return m


def build(doc, source="<scenario>"):
    """Scenario and PlannerParams from an already parsed document."""
    ctx = _Ctx(source)
    if not isinstance(doc, dict):
        raise InvalidScenario("scenario document must be a mapping", source, 1)
    for key in doc:
        if key not in TOP_KEYS:
            ctx.fail(f"unknown field {key!r}", doc, key)

    defaults = Scenario()
    bounds = ctx.section(doc, "bounds")
    goal = ctx.section(doc, "goal")
    if "goal" not in doc:
        ctx.fail("missing required field 'goal'", doc)

    obstacles = []
    raw_obs = doc.get("obstacles") or []
    if not isinstance(raw_obs, list):
        ctx.fail("field 'obstacles' must be a list", doc, "obstacles")
    for ob in raw_obs:
        if not isinstance(ob, dict):
            ctx.fail("each obstacle needs 'center' and 'radius'", doc, "obstacles")
        center = ctx.vec(ob, "center", 3)
        radius = ctx.num(ob, "radius")
        if not radius > 0:
            ctx.fail("obstacle radius must be positive", ob, "radius")
        obstacles.append(SphereObstacle(center, radius))

    dh = defaults.dh
    if doc.get("dh") is not None:
        rows = doc["dh"]
        if not isinstance(rows, list) or len(rows) != 4:
            ctx.fail("field 'dh' must hold exactly 4 rows", doc, "dh")
        dh = DHParams.from_rows([
            {k: ctx.num(r, k, 0.0) for k in ("a", "alpha", "d", "theta0")} for r in rows
        ])

    limits = defaults.limits
    if doc.get("limits") is not None:
        rows = doc["limits"]
        if not isinstance(rows, list) or len(rows) != 4:
            ctx.fail("field 'limits' must hold exactly 4 rows", doc, "limits")
        lo, hi, c, bounded = [], [], [], []
        for r in rows:
            b = bool(r.get("bounded", True))
            bounded.append(b)
            lo.append(ctx.num(r, "min", -math.pi if not b else None))
            hi.append(ctx.num(r, "max", math.pi if not b else None))
            c.append(ctx.num(r, "c", 1.0))
        try:
            limits = JointLimits(tuple(lo), tuple(hi), tuple(c), tuple(bounded))
        except ValueError as exc:
            ctx.fail(str(exc), doc, "limits")

    bodies = ctx.section(doc, "check_bodies")
    try:
        check = CheckBodySet(
            vehicle_hull=tuple(tuple(parse_number(v) for v in p) for p in bodies.get("vehicle_hull") or ()),
            arm_links=bool(bodies.get("arm_links", False)),
        )
    except (TypeError, ValueError) as exc:
        ctx.fail(f"check_bodies: {exc}", doc, "check_bodies")

    try:
        scenario = Scenario(
            name=str(doc.get("name", Path(str(source)).stem)),
            bounds_min=ctx.vec(bounds, "min", 3, defaults.bounds_min),
            bounds_max=ctx.vec(bounds, "max", 3, defaults.bounds_max),
            obstacles=tuple(obstacles),
            start=ctx.vec(doc, "start", 8),
            goal_position=ctx.vec(goal, "position", 3),
            goal_radius=ctx.num(goal, "radius"),
            dh=dh,
            limits=limits,
            vehicle_weights=ctx.vec(doc, "vehicle_weights", 4, defaults.vehicle_weights),
            collision_margin=ctx.num(doc, "collision_margin", defaults.collision_margin),
            edge_resolution=ctx.num(doc, "edge_resolution", defaults.edge_resolution),
            check_bodies=check,
        )
    except ValueError as exc:
        raise InvalidScenario(str(exc), source) from exc

    pl = ctx.section(doc, "planner")
    for key in pl:
        if key not in PLANNER_KEYS:
            ctx.fail(f"unknown planner field {key!r}", pl, key)
    pd = PlannerParams()
    try:
        params = PlannerParams(
            K=int(pl.get("K", pd.K)),
            c_step=ctx.vec(pl, "c_step", 8, pd.c_step),
            w_step=ctx.vec(pl, "w_step", 6, pd.w_step),
            p_g=ctx.num(pl, "p_g", pd.p_g),
            goal_threshold=None if pl.get("goal_threshold") is None else ctx.num(pl, "goal_threshold"),
            seed=int(pl.get("seed", pd.seed)),
            max_total_iterations=int(pl.get("max_total_iterations", pd.max_total_iterations)),
            stall_limit=int(pl.get("stall_limit", pd.stall_limit)),
            baseline_goal_bias=bool(pl.get("baseline_goal_bias", pd.baseline_goal_bias)),
        )
    except (TypeError, ValueError) as exc:
        ctx.fail(f"planner: {exc}", doc, "planner")

    try:
        scenario.validate()
    except InvalidScenario as exc:
        key = "start" if "start" in str(exc) else None
        ctx.fail(str(exc), doc, key)
    return scenario, params


def parse_document(text, source="<scenario>"):
    try:
        doc = yaml.load(text, Loader=_LineLoader)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        line = mark.line + 1 if mark is not None else None
        raise InvalidScenario(f"YAML parse error: {getattr(exc, 'problem', exc)}", source, line) from exc
    return doc


def apply_overrides(doc, overrides):
    """Set dotted ``key=value`` pairs (values parsed as YAML) on a parsed document."""
    doc = copy.deepcopy(doc) if doc is not None else {}
    for item in overrides or ():
        if "=" not in item:
            raise InvalidScenario(f"override {item!r} is not key=value")
        key, raw = item.split("=", 1)
        value = yaml.safe_load(raw)
        parts = key.strip().split(".")
        node = doc
        for p in parts[:-1]:
            nxt = node.get(p)
            if not isinstance(nxt, dict):
                nxt = _empty()
                node[p] = nxt
            node = nxt
        node[parts[-1]] = value
    return doc


def load_scenario(path, overrides=()):
    """Parse and validate a scenario file; returns ``(Scenario, PlannerParams)``."""
    try:
        p = resolve_scenario_path(path)
    except FileNotFoundError as exc:
        raise InvalidScenario(str(exc), str(path)) from exc
    doc = parse_document(p.read_text(), str(p))
    return build(apply_overrides(doc, overrides), str(p))


def scenario_to_dict(scenario: Scenario, params: PlannerParams | None = None):
    lim = scenario.limits
    doc = {
        "name": scenario.name,
        "bounds": {"min": list(scenario.bounds_min), "max": list(scenario.bounds_max)},
        "start": list(scenario.start),
        "goal": {"position": list(scenario.goal_position), "radius": scenario.goal_radius},
        "obstacles": [{"center": list(o.center), "radius": o.radius} for o in scenario.obstacles],
        "dh": scenario.dh.rows(),
        "limits": [
            {"min": lim.q_min[i], "max": lim.q_max[i], "c": lim.c[i], "bounded": lim.bounded[i]}
            for i in range(4)
        ],
        "vehicle_weights": list(scenario.vehicle_weights),
        "collision_margin": scenario.collision_margin,
        "edge_resolution": scenario.edge_resolution,
        "check_bodies": {
            "vehicle_hull": [list(p) for p in scenario.check_bodies.vehicle_hull],
            "arm_links": scenario.check_bodies.arm_links,
        },
    }
    if params is not None:
        doc["planner"] = {
            "K": params.K, "c_step": list(params.c_step), "w_step": list(params.w_step),
            "p_g": params.p_g, "goal_threshold": params.goal_threshold, "seed": params.seed,
            "max_total_iterations": params.max_total_iterations,
            "stall_limit": params.stall_limit, "baseline_goal_bias": params.baseline_goal_bias,
        }
    return doc


def dump_scenario(scenario, params=None) -> str:
    body = yaml.safe_dump(scenario_to_dict(scenario, params), sort_keys=False, default_flow_style=None)
    return FORMAT_HEADER + "\n" + body
