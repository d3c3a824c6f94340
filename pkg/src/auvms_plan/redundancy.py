"""Joint-limit weighting and weighted least-norm velocity resolution."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import OutOfRange, SingularJacobian

COND_CAP = 1e12


@dataclass(frozen=True)
class JointLimits:
    """Per-joint limits and cost shaping constants.

    Joints with ``bounded[i] == False`` contribute nothing to the cost and
    are never rejected by the limit checks.
    """

    q_min: tuple = (-2.0, -2.0, -2.0, -np.pi)
    q_max: tuple = (2.0, 2.0, 2.0, np.pi)
    c: tuple = (1.0, 1.0, 1.0, 1.0)
    bounded: tuple = (True, True, True, False)

    def __post_init__(self):
        for name in ("q_min", "q_max", "c"):
            vals = tuple(float(v) for v in getattr(self, name))
            if len(vals) != 4:
                raise ValueError(f"joint limit field {name!r} needs 4 entries")
            object.__setattr__(self, name, vals)
        bounded = tuple(bool(b) for b in self.bounded)
        if len(bounded) != 4:
            raise ValueError("joint limit field 'bounded' needs 4 entries")
        object.__setattr__(self, "bounded", bounded)
        for i in range(4):
            if self.c[i] <= 0:
                raise ValueError(f"C_{i + 1} must be positive")
            if bounded[i] and not self.q_min[i] < self.q_max[i]:
                raise ValueError(f"joint {i + 1}: q_min must be below q_max")

    @property
    def mask(self):
        return np.array(self.bounded)

    def inside(self, joints) -> bool:
        q = np.asarray(joints, dtype=float)
        m = self.mask
        lo, hi = np.asarray(self.q_min), np.asarray(self.q_max)
        return bool(np.all((q[m] > lo[m]) & (q[m] < hi[m])))

    def inside_batch(self, joints):
        q = np.atleast_2d(np.asarray(joints, dtype=float))
        m = self.mask
        lo, hi = np.asarray(self.q_min)[m], np.asarray(self.q_max)[m]
        qm = q[:, m]
        return np.all((qm > lo) & (qm < hi), axis=1)


@dataclass
class WeightMatrix:
    """Diagonal configuration weights ``[w_x, w_y, w_z, w_r, w_1..w_4]``."""

    diagonal: np.ndarray

    def matrix(self):
        return np.diag(self.diagonal)


def _bounded_terms(joints, limits):
    q = np.asarray(joints, dtype=float)
    if q.shape != (4,):
        raise ValueError(f"expected 4 joint values, got shape {q.shape}")
    m = limits.mask
    lo = np.asarray(limits.q_min)[m]
    hi = np.asarray(limits.q_max)[m]
    qb = q[m]
    upper = hi - qb
    lower = qb - lo
    bad = (upper <= 0) | (lower <= 0)
    if np.any(bad):
        idx = np.flatnonzero(m)[bad] + 1
        raise OutOfRange(f"joint(s) {idx.tolist()} at or beyond their limits")
    return m, lo, hi, qb, upper, lower, np.asarray(limits.c)[m]


def joint_limit_cost(joints, limits: JointLimits) -> float:
    """Barrier cost sum((q_max - q_min) / (C (q_max - q)(q - q_min))) over bounded joints."""
    _, lo, hi, _, upper, lower, c = _bounded_terms(joints, limits)
    return float(np.sum((hi - lo) / (c * upper * lower)))


def joint_limit_gradient(joints, limits: JointLimits) -> np.ndarray:
    m, lo, hi, qb, upper, lower, c = _bounded_terms(joints, limits)
    g = np.zeros(4)
    g[m] = (hi - lo) * (2 * qb - hi - lo) / (c * upper ** 2 * lower ** 2)
    return g


def system_weights(joints, limits: JointLimits, vehicle_weights) -> WeightMatrix:
    vw = np.asarray(vehicle_weights, dtype=float)
    if vw.shape != (4,) or np.any(vw <= 0) or not np.all(np.isfinite(vw)):
        raise ValueError("vehicle weights must be 4 positive finite numbers")
    w = np.empty(8)
    w[:4] = vw
    w[4:] = 1.0 + np.abs(joint_limit_gradient(joints, limits))
    return WeightMatrix(w)


def weighted_pseudo_inverse(J, W, cond_cap=COND_CAP) -> np.ndarray:
    """``W^-1 J^T (J W^-1 J^T)^-1`` as an 8x6 matrix.

    The 6x6 core is factorised (Cholesky) rather than inverted.  Raises
    SingularJacobian when its condition number exceeds ``cond_cap``.
    """
    J = np.asarray(J, dtype=float)
    w = np.asarray(W.diagonal if isinstance(W, WeightMatrix) else np.diag(W), dtype=float)
    JWi = J / w
    core = JWi @ J.T
    cond = np.linalg.cond(core)
    if not np.isfinite(cond) or cond > cond_cap:
        raise SingularJacobian(f"condition number {cond:.3g} exceeds {cond_cap:g}")
    try:
        factor = scipy.linalg.cho_factor(core)
    except np.linalg.LinAlgError as exc:
        raise SingularJacobian(str(exc)) from exc
    return scipy.linalg.cho_solve(factor, JWi).T


def resolve_velocity(J, W, xdot, cond_cap=COND_CAP) -> np.ndarray:
    """Configuration rate of minimum weighted norm reproducing ``xdot``."""
    return weighted_pseudo_inverse(J, W, cond_cap) @ np.asarray(xdot, dtype=float)
