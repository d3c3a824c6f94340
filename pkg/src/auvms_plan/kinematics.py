"""Forward kinematics and Jacobians of the vehicle-manipulator system.

A configuration is a flat float array of 8 entries::

    [x_v, y_v, z_v, yaw, q1, q2, q3, q4]

vehicle position in the earth frame, vehicle yaw, then the four arm joints.
Roll and pitch of the vehicle are frozen at zero, so the vehicle rotation is
a pure yaw.  The arm is a 4-revolute chain in standard Denavit-Hartenberg
form whose base frame coincides with the vehicle body frame.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import SingularPitch

NDOF = 8
POS = slice(0, 3)
YAW = 3
JOINTS = slice(4, 8)
# indices of wrapped angular coordinates (yaw and the continuous wrist joint)
WRAPPED = (3, 7)
ANGULAR = (3, 4, 5, 6, 7)

PITCH_TOL = 1e-6


class EulerAngles(NamedTuple):
    """Roll, pitch, yaw in radians (ZYX convention)."""

    phi: float = 0.0
    theta: float = 0.0
    psi: float = 0.0


@dataclass(frozen=True)
class DHParams:
    """Standard D-H table, one row per joint: ``T = Rz(q+theta0) Tz(d) Tx(a) Rx(alpha)``."""

    # shoulder offset keeps the zero posture (arm hanging below the hull)
    # away from the wrist/yaw axis alignment
    a: tuple = (0.0, 0.3, 0.3, 0.0)
    alpha: tuple = (np.pi / 2, np.pi / 2, np.pi / 2, 0.0)
    d: tuple = (0.1, 0.0, 0.0, 0.15)
    theta0: tuple = (0.0, -np.pi / 2, 0.0, 0.0)

    def __post_init__(self):
        for name in ("a", "alpha", "d", "theta0"):
            vals = tuple(float(v) for v in getattr(self, name))
            if len(vals) != 4:
                raise ValueError(f"DH column {name!r} needs 4 entries, got {len(vals)}")
            if not np.all(np.isfinite(vals)):
                raise ValueError(f"DH column {name!r} has non-finite entries")
            object.__setattr__(self, name, vals)

    @classmethod
    def zeros(cls):
        return cls(a=(0,) * 4, alpha=(0,) * 4, d=(0,) * 4, theta0=(0,) * 4)

    def rows(self):
        return [
            {"a": a, "alpha": al, "d": d, "theta0": t0}
            for a, al, d, t0 in zip(self.a, self.alpha, self.d, self.theta0)
        ]

    @classmethod
    def from_rows(cls, rows):
        rows = list(rows)
        if len(rows) != 4:
            raise ValueError(f"DH table needs exactly 4 rows, got {len(rows)}")
        return cls(
            a=[r.get("a", 0.0) for r in rows],
            alpha=[r.get("alpha", 0.0) for r in rows],
            d=[r.get("d", 0.0) for r in rows],
            theta0=[r.get("theta0", 0.0) for r in rows],
        )


@dataclass
class ArmPose:
    """End-effector pose in the vehicle body frame."""

    position: np.ndarray
    orientation: EulerAngles
    rotation: np.ndarray
    gimbal_lock: bool = False


@dataclass
class EefPose:
    """End-effector pose in the earth-fixed frame."""

    position: np.ndarray
    orientation: EulerAngles
    rotation: np.ndarray
    gimbal_lock: bool = False


@dataclass
class SystemJacobian:
    """6x8 map from configuration rates to the eef twist.

    Rows are earth-frame linear velocity then earth-frame angular velocity.
    """

    matrix: np.ndarray = field(repr=False)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.matrix, dtype=dtype)

    @property
    def shape(self):
        return self.matrix.shape


def make_config(position=(0.0, 0.0, 0.0), yaw=0.0, joints=(0.0, 0.0, 0.0, 0.0)):
    q = np.empty(NDOF)
    q[POS] = position
    q[YAW] = yaw
    q[JOINTS] = joints
    return q


def wrap_angle(a):
    """Map angles onto (-pi, pi]."""
    a = np.asarray(a, dtype=float)
    w = np.mod(a + np.pi, 2 * np.pi) - np.pi
    return np.where(w == -np.pi, np.pi, w)


def normalize_config(q):
    q = np.array(q, dtype=float)
    q[..., list(WRAPPED)] = wrap_angle(q[..., list(WRAPPED)])
    return q


def config_delta(a, b):
    """Displacement from ``a`` to ``b`` taking the short way round on wrapped angles."""
    d = np.asarray(b, dtype=float) - np.asarray(a, dtype=float)
    d[..., list(WRAPPED)] = wrap_angle(d[..., list(WRAPPED)])
    return d


def rotation_body_to_world(angles) -> np.ndarray:
    """ZYX Euler rotation ``Rz(psi) Ry(theta) Rx(phi)``."""
    phi, theta, psi = angles
    cf, sf = np.cos(phi), np.sin(phi)
    ct, st = np.cos(theta), np.sin(theta)
    cp, sp = np.cos(psi), np.sin(psi)
    return np.array([
        [cp * ct, -sp * cf + cp * st * sf, sp * sf + cp * st * cf],
        [sp * ct, cp * cf + sp * st * sf, -cp * sf + sp * st * cf],
        [-st, sf * ct, cf * ct],
    ])


def euler_rate_transform(angles, tol=PITCH_TOL) -> np.ndarray:
    """Map body angular velocity to ZYX Euler-angle rates.

    Raises SingularPitch when ``|cos(theta)| <= tol``.
    """
    phi, theta, _ = angles
    ct = np.cos(theta)
    if abs(ct) <= tol:
        raise SingularPitch(f"cos(pitch)={ct:.3g} within {tol:g} of zero")
    cf, sf, st = np.cos(phi), np.sin(phi), np.sin(theta)
    return np.array([
        [ct, sf * st, cf * st],
        [0.0, cf * ct, -ct * sf],
        [0.0, sf, cf],
    ]) / ct


def skew(omega) -> np.ndarray:
    wx, wy, wz = omega
    return np.array([
        [0.0, -wz, wy],
        [wz, 0.0, -wx],
        [-wy, wx, 0.0],
    ])


def euler_from_rotation(R, tol=PITCH_TOL):
    """ZYX angles of ``R``; second value flags gimbal lock (roll then set to 0)."""
    s = -R[2, 0]
    s = min(1.0, max(-1.0, s))
    theta = float(np.arcsin(s))
    if np.sqrt(R[2, 1] ** 2 + R[2, 2] ** 2) <= tol:
        # pitch at +-pi/2: only psi -/+ phi is observable
        psi = float(np.arctan2(-R[0, 1], R[1, 1]))
        return EulerAngles(0.0, theta, psi), True
    phi = float(np.arctan2(R[2, 1], R[2, 2]))
    psi = float(np.arctan2(R[1, 0], R[0, 0]))
    return EulerAngles(phi, theta, psi), False


def _dh_transforms(joints, dh):
    """Per-joint D-H transforms, shape (N, 4, 4, 4) for joints of shape (N, 4)."""
    q = np.atleast_2d(np.asarray(joints, dtype=float))
    th = q + np.asarray(dh.theta0)
    ct, st = np.cos(th), np.sin(th)
    ca, sa = np.cos(dh.alpha), np.sin(dh.alpha)
    a, d = np.asarray(dh.a), np.asarray(dh.d)
    A = np.zeros(q.shape + (4, 4))
    A[..., 0, 0] = ct
    A[..., 0, 1] = -st * ca
    A[..., 0, 2] = st * sa
    A[..., 0, 3] = a * ct
    A[..., 1, 0] = st
    A[..., 1, 1] = ct * ca
    A[..., 1, 2] = -ct * sa
    A[..., 1, 3] = a * st
    A[..., 2, 1] = sa
    A[..., 2, 2] = ca
    A[..., 2, 3] = d
    A[..., 3, 3] = 1.0
    return A


def arm_frames(joints, dh):
    """Cumulative frames T_0..T_4 of the arm in the body frame, shape (N, 5, 4, 4)."""
    A = _dh_transforms(joints, dh)
    n = A.shape[0]
    T = np.empty((n, 5, 4, 4))
    T[:, 0] = np.eye(4)
    for i in range(4):
        T[:, i + 1] = T[:, i] @ A[:, i]
    return T


def arm_forward_kinematics(joints, dh, strict=False) -> ArmPose:
    """Tip pose of the arm in the body frame.

    With ``strict`` a gimbal-locked orientation raises SingularPitch;
    otherwise it is reported through ``ArmPose.gimbal_lock``.
    """
    T = arm_frames(joints, dh)[0, 4]
    R = T[:3, :3].copy()
    angles, locked = euler_from_rotation(R)
    if locked and strict:
        raise SingularPitch("arm tip pitch at +-pi/2")
    return ArmPose(T[:3, 3].copy(), angles, R, locked)


def arm_jacobian(joints, dh) -> np.ndarray:
    """Geometric 6x4 Jacobian of the arm tip, expressed in the body frame."""
    T = arm_frames(joints, dh)[0]
    p_e = T[4, :3, 3]
    J = np.zeros((6, 4))
    for i in range(4):
        z = T[i, :3, 2]
        J[:3, i] = np.cross(z, p_e - T[i, :3, 3])
        J[3:, i] = z
    return J


def yaw_rotation(psi) -> np.ndarray:
    c, s = np.cos(psi), np.sin(psi)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def eef_world_pose(config, dh, strict=False) -> EefPose:
    q = np.asarray(config, dtype=float)
    arm = arm_forward_kinematics(q[JOINTS], dh)
    Rv = yaw_rotation(q[YAW])
    R = Rv @ arm.rotation
    angles, locked = euler_from_rotation(R)
    if locked and strict:
        raise SingularPitch("end-effector pitch at +-pi/2")
    return EefPose(q[POS] + Rv @ arm.position, angles, R, locked)


def eef_positions(configs, dh) -> np.ndarray:
    """Vectorised earth-frame tip positions for configs of shape (N, 8)."""
    q = np.atleast_2d(np.asarray(configs, dtype=float))
    T = arm_frames(q[:, JOINTS], dh)
    p = T[:, 4, :3, 3]
    c, s = np.cos(q[:, YAW]), np.sin(q[:, YAW])
    out = q[:, POS].copy()
    out[:, 0] += c * p[:, 0] - s * p[:, 1]
    out[:, 1] += s * p[:, 0] + c * p[:, 1]
    out[:, 2] += p[:, 2]
    return out


def system_jacobian(config, dh, frame="config") -> SystemJacobian:
    """Whole-system Jacobian for the yaw-only vehicle.

    ``frame="config"`` (default) takes the vehicle translation as earth-frame
    rates, i.e. derivatives with respect to the configuration coordinates, so
    ``q + J^+ dx`` is a first-order step.  ``frame="body"`` keeps the
    body-fixed linear velocity columns ``J_v1``; the two differ by the vehicle
    rotation on the first three columns.
    """
    q = np.asarray(config, dtype=float)
    joints = q[JOINTS]
    T = arm_frames(joints, dh)[0]
    p_ve = T[4, :3, 3]
    Jm = np.zeros((6, 4))
    for i in range(4):
        z = T[i, :3, 2]
        Jm[:3, i] = np.cross(z, p_ve - T[i, :3, 3])
        Jm[3:, i] = z

    angles = EulerAngles(0.0, 0.0, q[YAW])
    Jv1 = rotation_body_to_world(angles)
    Jv2 = euler_rate_transform(angles)
    yaw_axis = Jv2[:, 2]

    J = np.zeros((6, NDOF))
    J[:3, POS] = Jv1 if frame == "body" else np.eye(3)
    J[:3, YAW] = -skew(Jv1 @ p_ve) @ yaw_axis
    J[3:, YAW] = yaw_axis
    J[:3, JOINTS] = Jv1 @ Jm[:3]
    J[3:, JOINTS] = Jv1 @ Jm[3:]
    if frame not in ("config", "body"):
        raise ValueError(f"unknown frame {frame!r}")
    return SystemJacobian(J)
