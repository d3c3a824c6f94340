"""Shortcut smoothing of raw tree paths and cubic-spline time parameterization."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import DegeneratePath, InvalidPath
from .kinematics import WRAPPED, config_delta, eef_positions
from .world import Scenario, config_free_batch, edge_free

log = logging.getLogger(__name__)

DEFAULT_SPEED = 0.1
MIN_SEGMENT = 1e-6
MAX_REFINE_ROUNDS = 64


@dataclass
class SmoothedPath:
    nodes: np.ndarray
    indices: list  # position of each node in the raw path, None for inserted midpoints
    raw: np.ndarray = field(repr=False)
    scenario: Scenario = field(repr=False)

    def __len__(self):
        return len(self.nodes)


def smooth_path(raw, scenario: Scenario) -> SmoothedPath:
    """Greedy shortcutting: from each anchor jump to the farthest node it can see.

    Raises InvalidPath if two consecutive raw nodes are not joined by a free
    edge, since then the scan has no guaranteed fallback.
    """
    raw = np.asarray(raw, dtype=float)
    n = len(raw)
    if n == 0:
        raise InvalidPath("empty path")
    for i in range(n - 1):
        if not edge_free(raw[i], raw[i + 1], scenario):
            raise InvalidPath(f"raw edge {i}->{i + 1} is not collision-free")
    keep = [0]
    start = 0
    while start < n - 1:
        end = n - 1
        while end > start + 1 and not edge_free(raw[start], raw[end], scenario):
            end -= 1
        keep.append(end)
        start = end
    return SmoothedPath(raw[keep].copy(), keep, raw, scenario)


@dataclass
class Trajectory:
    """Natural cubic spline through the smoothed nodes, per configuration coordinate.

    Wrapped angles are unwrapped before fitting, so sampled yaw and wrist
    values are continuous and may leave (-pi, pi].
    """

    knot_times: np.ndarray
    knots: np.ndarray
    spline: CubicSpline = field(repr=False)
    valid: bool = True
    inserted: int = 0

    @property
    def duration(self):
        return float(self.knot_times[-1])

    def sample(self, t):
        return self.spline(t)

    def derivative(self, t, order=1):
        return self.spline(t, order)

    def table(self, rate, dh):
        """Rows of (t, 8 config coordinates, 3 eef coordinates) sampled at ``rate`` Hz."""
        if not rate > 0:
            raise ValueError("sample rate must be positive")
        t = np.arange(int(math.floor(self.duration * rate)) + 1) / rate
        if t[-1] < self.duration:
            t = np.append(t, self.duration)
        q = self.sample(t)
        return np.column_stack([t, q, eef_positions(q, dh)])


def _unwrap(nodes):
    out = np.array(nodes, dtype=float)
    for j in WRAPPED:
        out[:, j] = np.unwrap(out[:, j])
    return out


def _fit(nodes, dh, speed):
    knots = _unwrap(nodes)
    seg = np.linalg.norm(np.diff(eef_positions(knots, dh), axis=0), axis=1)
    if seg.sum() < 1e-9:
        raise DegeneratePath(f"total workspace length {seg.sum():.3g} m is below 1e-9")
    t = np.concatenate([[0.0], np.cumsum(np.maximum(seg, MIN_SEGMENT))]) / speed
    return t, knots, CubicSpline(t, knots, axis=0, bc_type="natural")


def _first_violation(t_knots, spline, scenario, speed):
    # sample densely enough that the nominal tip motion per sample stays
    # well below the edge resolution
    n = max(1000, int(math.ceil(t_knots[-1] * speed / (scenario.edge_resolution / 4))))
    ts = np.linspace(0.0, t_knots[-1], n + 1)
    ok = config_free_batch(spline(ts), scenario)
    if np.all(ok):
        return None
    bad_t = ts[np.argmin(ok)]
    return int(min(np.searchsorted(t_knots, bad_t, side="right") - 1, len(t_knots) - 2))


def spline_trajectory(path: SmoothedPath, speed=DEFAULT_SPEED, validate=True) -> Trajectory:
    """Fit the spline; with ``validate``, refine segments until dense samples are free.

    A colliding or limit-violating segment gets an extra knot: the raw-path
    node halfway between its endpoints when both halves are free edges,
    otherwise the C-space midpoint of the segment.
    """
    if len(path.nodes) < 2:
        raise DegeneratePath("need at least two nodes")
    if not speed > 0:
        raise ValueError("speed must be positive")
    scenario = path.scenario
    nodes = [np.array(q) for q in path.nodes]
    idx = list(path.indices)
    t, knots, spline = _fit(nodes, scenario.dh, speed)
    if not validate:
        return Trajectory(t, knots, spline)

    inserted = 0
    for _ in range(MAX_REFINE_ROUNDS):
        k = _first_violation(t, spline, scenario, speed)
        if k is None:
            return Trajectory(t, knots, spline, True, inserted)
        a, b = nodes[k], nodes[k + 1]
        ia, ib = idx[k], idx[k + 1]
        new, new_idx = None, None
        if ia is not None and ib is not None and ib - ia >= 2:
            mid = (ia + ib) // 2
            cand = path.raw[mid]
            if edge_free(a, cand, scenario) and edge_free(cand, b, scenario):
                new, new_idx = cand, mid
        if new is None:
            new = a + 0.5 * config_delta(a, b)
        nodes.insert(k + 1, np.array(new))
        idx.insert(k + 1, new_idx)
        inserted += 1
        t, knots, spline = _fit(nodes, scenario.dh, speed)
    log.warning("spline still violates constraints after %d refinements", MAX_REFINE_ROUNDS)
    return Trajectory(t, knots, spline, _first_violation(t, spline, scenario, speed) is None, inserted)
