"""Scenario description and collision predicates against sphere obstacles."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import InvalidScenario
from .kinematics import DHParams, JOINTS, POS, YAW, arm_frames, config_delta, make_config
from .redundancy import JointLimits

DEFAULT_EDGE_RESOLUTION = 0.05
MAX_SUBDIVISION_LEVEL = 20


@dataclass(frozen=True)
class SphereObstacle:
    center: tuple
    radius: float

    def __post_init__(self):
        c = tuple(float(v) for v in self.center)
        if len(c) != 3:
            raise ValueError("obstacle center needs 3 coordinates")
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "radius", float(self.radius))
        if not self.radius > 0:
            raise ValueError("obstacle radius must be positive")


@dataclass(frozen=True)
class CheckBodySet:
    """Body-attached probe points tested against obstacles.

    The arm tip is always checked.  ``vehicle_hull`` holds extra points in
    the vehicle body frame; ``arm_links`` adds the midpoint of every link.
    """

    vehicle_hull: tuple = ()
    arm_links: bool = False

    def __post_init__(self):
        hull = tuple(tuple(float(v) for v in p) for p in self.vehicle_hull)
        if any(len(p) != 3 for p in hull):
            raise ValueError("vehicle hull points need 3 coordinates")
        object.__setattr__(self, "vehicle_hull", hull)

    @property
    def count(self):
        return 1 + len(self.vehicle_hull) + (4 if self.arm_links else 0)


@dataclass(frozen=True)
class Scenario:
    name: str = "unnamed"
    bounds_min: tuple = (-1.0, -1.0, -1.0)
    bounds_max: tuple = (6.0, 6.0, 6.0)
    obstacles: tuple = ()
    start: tuple = tuple(make_config(joints=(0.0, 0.0, 0.0, np.pi)))
    goal_position: tuple = (4.0, 4.0, 4.0)
    goal_radius: float = 0.3
    dh: DHParams = field(default_factory=DHParams)
    limits: JointLimits = field(default_factory=JointLimits)
    vehicle_weights: tuple = (10.0, 10.0, 10.0, 10.0)
    collision_margin: float = 0.0
    edge_resolution: float = DEFAULT_EDGE_RESOLUTION
    check_bodies: CheckBodySet = field(default_factory=CheckBodySet)

    def __post_init__(self):
        for name, n in (("bounds_min", 3), ("bounds_max", 3), ("start", 8),
                        ("goal_position", 3), ("vehicle_weights", 4)):
            vals = tuple(float(v) for v in getattr(self, name))
            if len(vals) != n:
                raise ValueError(f"{name} needs {n} entries, got {len(vals)}")
            object.__setattr__(self, name, vals)
        object.__setattr__(self, "obstacles", tuple(self.obstacles))
        object.__setattr__(self, "goal_radius", float(self.goal_radius))
        object.__setattr__(self, "collision_margin", float(self.collision_margin))
        object.__setattr__(self, "edge_resolution", float(self.edge_resolution))
        # cached arrays for the hot collision path
        object.__setattr__(self, "_lo", np.array(self.bounds_min))
        object.__setattr__(self, "_hi", np.array(self.bounds_max))
        if self.obstacles:
            centers = np.array([o.center for o in self.obstacles])
            radii = np.array([o.radius for o in self.obstacles]) + self.collision_margin
        else:
            centers, radii = np.zeros((0, 3)), np.zeros(0)
        object.__setattr__(self, "_centers", centers)
        object.__setattr__(self, "_radii", radii)

    def with_changes(self, **kw):
        return replace(self, **kw)

    @property
    def start_config(self):
        return np.array(self.start)

    @property
    def goal(self):
        return np.array(self.goal_position)

    def validate(self):
        """Raise InvalidScenario on inconsistent fields or a colliding start."""
        if not np.all(self._lo < self._hi):
            raise InvalidScenario("bounds_min must be below bounds_max on every axis")
        if not self.goal_radius > 0:
            raise InvalidScenario("goal radius must be positive")
        if not self.edge_resolution > 0:
            raise InvalidScenario("edge resolution must be positive")
        if self.collision_margin < 0:
            raise InvalidScenario("collision margin must be non-negative")
        if any(w <= 0 for w in self.vehicle_weights):
            raise InvalidScenario("vehicle weights must be positive")
        q = self.start_config
        if not np.all(np.isfinite(q)):
            raise InvalidScenario("start configuration is not finite")
        if not np.all((q[POS] >= self._lo) & (q[POS] <= self._hi)):
            raise InvalidScenario("start vehicle position lies outside the bounds")
        if not self.limits.inside(q[JOINTS]):
            raise InvalidScenario("start joints violate the joint limits")
        if not config_free(q, self):
            raise InvalidScenario("start configuration is in collision")
        return self


def probe_points(configs, scenario: Scenario) -> np.ndarray:
    """Earth-frame probe points, shape (N, P, 3); index 0 is the arm tip."""
    q = np.atleast_2d(np.asarray(configs, dtype=float))
    bodies = scenario.check_bodies
    T = arm_frames(q[:, JOINTS], scenario.dh)
    local = [T[:, 4, :3, 3][:, None, :]]
    if bodies.vehicle_hull:
        hull = np.asarray(bodies.vehicle_hull)
        local.append(np.broadcast_to(hull, (q.shape[0],) + hull.shape))
    if bodies.arm_links:
        origins = T[:, :, :3, 3]
        local.append(0.5 * (origins[:, :-1] + origins[:, 1:]))
    pts = np.concatenate(local, axis=1)
    c, s = np.cos(q[:, YAW])[:, None], np.sin(q[:, YAW])[:, None]
    out = np.empty_like(pts)
    out[..., 0] = c * pts[..., 0] - s * pts[..., 1]
    out[..., 1] = s * pts[..., 0] + c * pts[..., 1]
    out[..., 2] = pts[..., 2]
    out += q[:, None, POS]
    return out


def _points_free(points, scenario):
    """Boolean mask over the leading axes of ``points`` (..., 3)."""
    if scenario._centers.shape[0] == 0:
        return np.ones(points.shape[:-1], dtype=bool)
    diff = points[..., None, :] - scenario._centers
    dist2 = np.einsum("...k,...k->...", diff, diff)
    return np.all(dist2 > scenario._radii ** 2, axis=-1)


def point_free(p, scenario: Scenario) -> bool:
    p = np.asarray(p, dtype=float)
    for o in scenario.obstacles:
        if math.dist(p, o.center) <= o.radius + scenario.collision_margin:
            return False
    return True


def config_free_batch(configs, scenario: Scenario, points=None) -> np.ndarray:
    q = np.atleast_2d(np.asarray(configs, dtype=float))
    if points is None:
        points = probe_points(q, scenario)
    ok = np.all((q[:, POS] >= scenario._lo) & (q[:, POS] <= scenario._hi), axis=1)
    ok &= scenario.limits.inside_batch(q[:, JOINTS])
    ok &= np.all(_points_free(points, scenario), axis=1)
    ok &= np.all(np.isfinite(q), axis=1)
    return ok


def config_free(config, scenario: Scenario) -> bool:
    """Bounds, joint limits and every probe point clear of every obstacle."""
    return bool(config_free_batch(config, scenario)[0])


def _canonical(a, b):
    # evaluate edges in a fixed orientation so the result is symmetric in (a, b)
    return (a, b) if tuple(a) <= tuple(b) else (b, a)


def interpolate_edge(a, b, n):
    t = np.linspace(0.0, 1.0, n + 1)[:, None]
    return a + t * config_delta(a, b)


def edge_free(a, b, scenario: Scenario, resolution=None) -> bool:
    """Check the straight C-space edge from ``a`` to ``b``.

    The edge is cut into 2**k equal pieces, with k the smallest level at
    which no probe point moves more than ``resolution`` between consecutive
    samples.  Levels are nested, so a finer resolution only adds samples.
    """
    res = scenario.edge_resolution if resolution is None else float(resolution)
    if not res > 0:
        raise ValueError("resolution must be positive")
    a, b = _canonical(np.asarray(a, dtype=float), np.asarray(b, dtype=float))
    ends = np.stack([a, b])
    ends_pts = probe_points(ends, scenario)
    if not np.all(config_free_batch(ends, scenario, ends_pts)):
        return False
    chord = float(np.max(np.linalg.norm(ends_pts[1] - ends_pts[0], axis=-1)))
    k = max(0, math.ceil(math.log2(chord / res))) if chord > res else 0
    while k <= MAX_SUBDIVISION_LEVEL:
        qs = interpolate_edge(a, b, 2 ** k)
        pts = probe_points(qs, scenario)
        step = np.max(np.linalg.norm(np.diff(pts, axis=0), axis=-1))
        if step <= res:
            return bool(np.all(config_free_batch(qs, scenario, pts)))
        k += 1
    return bool(np.all(config_free_batch(qs, scenario, pts)))
