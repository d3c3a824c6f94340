"""Jacobian-guided RRT for the vehicle-manipulator system, and a plain RRT baseline.

Both planners grow a single tree from the start configuration and stop as
soon as some node puts the arm tip inside the workspace goal ball.  They
share one random stream discipline: every iteration draws one branch number
``u`` in [0, 1), and every random extension then draws one 8-vector sample.
The generator is numpy's PCG64 seeded with the integer seed, which is
reproducible across platforms.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import SingularJacobian
from .kinematics import JOINTS, WRAPPED, config_delta, eef_positions, normalize_config, system_jacobian
from .redundancy import system_weights, weighted_pseudo_inverse
from .world import Scenario, edge_free

log = logging.getLogger(__name__)

FOUND = "Found"
NOT_FOUND = "NotFound"

# nearest-neighbour metric: 1 on positions, 0.5 on the five angles
METRIC_WEIGHTS = np.array([1.0, 1.0, 1.0, 0.5, 0.5, 0.5, 0.5, 0.5])
DUPLICATE_TOL = 1e-9


@dataclass(frozen=True)
class PlannerParams:
    K: int = 100
    c_step: tuple = (0.1, 0.1, 0.1, 0.08, 0.05, 0.05, 0.05, 0.05)
    w_step: tuple = (0.2, 0.2, 0.2, 0.05, 0.05, 0.05)
    p_g: float = 0.5
    goal_threshold: float | None = None  # None: use the scenario goal radius
    seed: int = 0
    max_total_iterations: int = 3000
    stall_limit: int = 20
    baseline_goal_bias: bool = False

    def __post_init__(self):
        c = tuple(float(v) for v in self.c_step)
        w = tuple(float(v) for v in self.w_step)
        if len(c) != 8 or len(w) != 6:
            raise ValueError("c_step needs 8 entries and w_step 6")
        if min(c) <= 0 or min(w) <= 0:
            raise ValueError("step sizes must be positive")
        if not 0.0 <= self.p_g <= 1.0:
            raise ValueError("p_g must lie in [0, 1]")
        if self.K < 1 or self.max_total_iterations < 0 or self.stall_limit < 1:
            raise ValueError("K and stall_limit must be >= 1, max_total_iterations >= 0")
        if self.goal_threshold is not None and not self.goal_threshold > 0:
            raise ValueError("goal_threshold must be positive")
        object.__setattr__(self, "c_step", c)
        object.__setattr__(self, "w_step", w)

    def with_changes(self, **kw):
        return replace(self, **kw)

    def threshold(self, scenario):
        return scenario.goal_radius if self.goal_threshold is None else self.goal_threshold


class Tree:
    """Growing search tree; node 0 is the root and parents always precede children."""

    def __init__(self, root, eef):
        self._nodes = np.empty((256, 8))
        self._eef = np.empty((256, 3))
        self._nodes[0] = root
        self._eef[0] = eef
        self.parent = [None]
        self.size = 1

    def __len__(self):
        return self.size

    @property
    def nodes(self):
        return self._nodes[: self.size]

    @property
    def eef(self):
        return self._eef[: self.size]

    def add(self, q, parent, eef):
        if self.size == self._nodes.shape[0]:
            self._nodes = np.concatenate([self._nodes, np.empty_like(self._nodes)])
            self._eef = np.concatenate([self._eef, np.empty_like(self._eef)])
        self._nodes[self.size] = q
        self._eef[self.size] = eef
        self.parent.append(parent)
        self.size += 1
        return self.size - 1

    def path_to(self, idx):
        chain = []
        while idx is not None:
            chain.append(idx)
            idx = self.parent[idx]
        chain.reverse()
        return self.nodes[chain].copy()

    def edges(self):
        """(child, parent) index pairs in insertion order."""
        return [(i, p) for i, p in enumerate(self.parent) if p is not None]


@dataclass
class PlanResult:
    status: str
    raw_path: np.ndarray
    tree: Tree = field(repr=False)
    iterations: int
    elapsed: float
    rng_draws: int
    algorithm: str = "rrtauvms"
    seed: int = 0
    goal_index: int | None = None
    random_extensions: int = 0
    goal_extensions: int = 0
    singular_count: int = 0
    stall_count: int = 0
    passes: int = 0

    @property
    def found(self):
        return self.status == FOUND


@dataclass
class _Stats:
    draws: int = 0
    singular: int = 0
    random_ext: int = 0
    goal_ext: int = 0


def distance_to_goal(eef_position, scenario: Scenario) -> float:
    return float(math.dist(eef_position, scenario.goal_position))


def closest_node_to_goal(tree: Tree, scenario: Scenario) -> int:
    d2 = np.sum((tree.eef - scenario.goal) ** 2, axis=1)
    return int(np.argmin(d2))  # argmin returns the lowest index on ties


def workspace_step(from_position, scenario: Scenario, w_step) -> np.ndarray:
    """Position step toward the goal, uniformly shrunk until every axis fits ``w_step``.

    When the remaining offset already fits on every axis the step lands
    exactly on the goal.  Orientation entries stay zero.
    """
    pos = from_position.position if hasattr(from_position, "position") else from_position
    r = scenario.goal - np.asarray(pos, dtype=float)
    cap = np.asarray(w_step[:3], dtype=float)
    dx = np.zeros(6)
    mag = np.abs(r)
    if not np.any(mag > 0):
        return dx
    scale = min(1.0, float(np.min(np.where(mag > 0, cap / np.where(mag > 0, mag, 1.0), np.inf))))
    dx[:3] = r * scale
    return dx


def nearest_node(tree: Tree, q) -> int:
    diff = tree.nodes - q
    diff[:, WRAPPED] = (diff[:, WRAPPED] + np.pi) % (2 * np.pi) - np.pi
    d2 = (diff * diff) @ METRIC_WEIGHTS
    return int(np.argmin(d2))


def sample_config(scenario: Scenario, rng, stats=None) -> np.ndarray:
    lims = scenario.limits
    lo = np.empty(8)
    hi = np.empty(8)
    lo[:3], hi[:3] = scenario.bounds_min, scenario.bounds_max
    lo[3], hi[3] = -np.pi, np.pi
    for i in range(4):
        if lims.bounded[i]:
            lo[4 + i], hi[4 + i] = lims.q_min[i], lims.q_max[i]
        else:
            lo[4 + i], hi[4 + i] = -np.pi, np.pi
    if stats is not None:
        stats.draws += 8
    return rng.uniform(lo, hi)


def _try_add(tree, scenario, parent_idx, q_new):
    parent = tree.nodes[parent_idx]
    if np.max(np.abs(config_delta(parent, q_new))) <= DUPLICATE_TOL:
        return None
    # edge_free also checks both endpoints
    if not edge_free(parent, q_new, scenario):
        return None
    return tree.add(q_new, parent_idx, eef_positions(q_new, scenario.dh)[0])


def steer(q_near, q_target, c_step):
    step = np.clip(config_delta(q_near, q_target), -np.asarray(c_step), np.asarray(c_step))
    return normalize_config(q_near + step)


def extend_randomly(tree, scenario, params, rng, stats=None, target=None):
    """Grow one C-space step from the nearest node toward a uniform sample.

    Returns the new node index, or None when the step was rejected.
    """
    if stats is not None:
        stats.random_ext += 1
    q_rand = sample_config(scenario, rng, stats) if target is None else target
    near = nearest_node(tree, q_rand)
    q_new = steer(tree.nodes[near], q_rand, params.c_step)
    return _try_add(tree, scenario, near, q_new)


def extend_to_goal(tree, scenario, params, stats=None):
    """Jacobian-guided step from the node whose tip is closest to the goal."""
    if stats is not None:
        stats.goal_ext += 1
    near = closest_node_to_goal(tree, scenario)
    q_near = tree.nodes[near]
    dx = workspace_step(tree.eef[near], scenario, params.w_step)
    if not np.any(dx):
        return None
    try:
        J = system_jacobian(q_near, scenario.dh)
        W = system_weights(q_near[JOINTS], scenario.limits, scenario.vehicle_weights)
        dq = weighted_pseudo_inverse(J, W) @ dx
    except SingularJacobian:
        if stats is not None:
            stats.singular += 1
        return None
    return _try_add(tree, scenario, near, normalize_config(q_near + dq))


def mapped_goal_config(scenario: Scenario) -> np.ndarray:
    """C-space goal: start arm posture, vehicle shifted so the tip sits on the goal."""
    q = scenario.start_config
    tip = eef_positions(q, scenario.dh)[0]
    q[:3] = np.clip(q[:3] + scenario.goal - tip, scenario.bounds_min, scenario.bounds_max)
    return q


def _plan(scenario, params, guided):
    scenario.validate()
    q0 = scenario.start_config
    rng = np.random.Generator(np.random.PCG64(params.seed))
    stats = _Stats()
    tree = Tree(q0, eef_positions(q0, scenario.dh)[0])
    thresh = params.threshold(scenario)
    algorithm = "rrtauvms" if guided else "rrt"
    goal_cfg = mapped_goal_config(scenario) if (not guided and params.baseline_goal_bias) else None

    def finish(status, goal_idx, iterations, passes, stalls, t0):
        path = tree.path_to(goal_idx) if goal_idx is not None else np.empty((0, 8))
        return PlanResult(
            status=status, raw_path=path, tree=tree, iterations=iterations,
            elapsed=time.perf_counter() - t0, rng_draws=stats.draws, algorithm=algorithm,
            seed=params.seed, goal_index=goal_idx, random_extensions=stats.random_ext,
            goal_extensions=stats.goal_ext, singular_count=stats.singular,
            stall_count=stalls, passes=passes,
        )

    t0 = time.perf_counter()
    if distance_to_goal(tree.eef[0], scenario) < thresh:
        return finish(FOUND, 0, 0, 0, 0, t0)

    it = passes = stalls = 0
    failed_goal = forced = 0
    while it < params.max_total_iterations:
        passes += 1
        for _ in range(min(params.K, params.max_total_iterations - it)):
            it += 1
            u = rng.random()
            stats.draws += 1
            if guided:
                if forced > 0:
                    forced -= 1
                    new = extend_randomly(tree, scenario, params, rng, stats)
                elif u < params.p_g:
                    new = extend_randomly(tree, scenario, params, rng, stats)
                else:
                    new = extend_to_goal(tree, scenario, params, stats)
                    failed_goal = 0 if new is not None else failed_goal + 1
                    if failed_goal >= params.stall_limit:
                        forced, failed_goal = params.stall_limit, 0
                        stalls += 1
            elif goal_cfg is not None and u >= params.p_g:
                new = extend_randomly(tree, scenario, params, rng, stats, target=goal_cfg)
            else:
                new = extend_randomly(tree, scenario, params, rng, stats)
            if new is not None and distance_to_goal(tree.eef[new], scenario) < thresh:
                log.debug("%s seed=%d found after %d iterations", algorithm, params.seed, it)
                return finish(FOUND, new, it, passes, stalls, t0)
    return finish(NOT_FOUND, None, it, passes, stalls, t0)


def plan_rrtauvms(scenario: Scenario, params: PlannerParams) -> PlanResult:
    """Mix uniform C-space extensions (probability p_g) with Jacobian-guided goal steps."""
    return _plan(scenario, params, guided=True)


def plan_rrt_baseline(scenario: Scenario, params: PlannerParams) -> PlanResult:
    """Plain C-space RRT with the same goal ball test.

    The branch number is still drawn every iteration so both planners consume
    the stream identically.  With ``baseline_goal_bias`` the ``u >= p_g``
    branch steers toward :func:`mapped_goal_config` instead of a uniform
    sample; by default every extension is uniform.
    """
    return _plan(scenario, params, guided=False)


PLANNERS = {"rrtauvms": plan_rrtauvms, "rrt": plan_rrt_baseline}
