import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from auvms_plan.errors import SingularPitch
from auvms_plan.kinematics import (
    DHParams, EulerAngles, arm_forward_kinematics, arm_jacobian, eef_positions, eef_world_pose,
    euler_rate_transform, make_config, rotation_body_to_world, skew, system_jacobian, wrap_angle,
)

from conftest import random_configs
from oracles import dh_chain, fd_twist_jacobian, world_tip

DH = DHParams()
ROWS = list(zip(DH.a, DH.alpha, DH.d, DH.theta0))
angle = st.floats(-np.pi, np.pi)
safe_pitch = st.floats(-1.5, 1.5)


def test_rotation_identity_at_zero():
    np.testing.assert_array_equal(rotation_body_to_world(EulerAngles(0, 0, 0)), np.eye(3))


def test_rotation_quarter_yaw():
    R = rotation_body_to_world(EulerAngles(0, 0, np.pi / 2))
    np.testing.assert_allclose(R, [[0, -1, 0], [1, 0, 0], [0, 0, 1]], atol=1e-15)


@settings(max_examples=200)
@given(angle, angle, angle)
def test_rotation_orthonormal(phi, theta, psi):
    R = rotation_body_to_world(EulerAngles(phi, theta, psi))
    assert np.max(np.abs(R.T @ R - np.eye(3))) < 1e-12
    assert abs(np.linalg.det(R) - 1) < 1e-12


def test_rotation_is_zyx_product():
    phi, theta, psi = 0.3, -0.7, 2.1
    Rz, Rx = sp.rot_axis3, sp.rot_axis1
    # sympy's rot_axis matrices are passive (transposed) rotations
    expected = (Rz(psi).T @ sp.rot_axis2(theta).T @ Rx(phi).T).evalf()
    np.testing.assert_allclose(rotation_body_to_world((phi, theta, psi)),
                               np.array(expected, dtype=float), atol=1e-14)


def test_rate_transform_identity_at_zero():
    np.testing.assert_array_equal(euler_rate_transform(EulerAngles(0, 0, 0)), np.eye(3))


def test_rate_transform_roll_quarter():
    r = np.sqrt(2) / 2
    np.testing.assert_allclose(euler_rate_transform(EulerAngles(np.pi / 4, 0, 0)),
                               [[1, 0, 0], [0, r, -r], [0, r, r]], atol=1e-15)


def test_rate_transform_singular():
    with pytest.raises(SingularPitch):
        euler_rate_transform(EulerAngles(0, np.pi / 2 - 1e-9, 0))


def _symbolic_rate_transform():
    """Invert omega_body = E(phi, theta) * euler_rates, derived from the rotation factors."""
    phi, theta = sp.symbols("phi theta")
    Rx = sp.rot_axis1(phi)  # passive: maps world-ish vectors into the rolled frame
    Ry = sp.rot_axis2(theta)
    e1, e2, e3 = sp.eye(3)[:, 0], sp.eye(3)[:, 1], sp.eye(3)[:, 2]
    E = sp.Matrix.hstack(e1, Rx @ e2, Rx @ Ry @ e3)
    return sp.lambdify((phi, theta), sp.simplify(E.inv()), "numpy")


SYM_RATE = _symbolic_rate_transform()


def test_rate_transform_matches_symbolic_derivation():
    rng = np.random.default_rng(4)
    for phi, theta, psi in zip(rng.uniform(-np.pi, np.pi, 100), rng.uniform(-1.5, 1.5, 100),
                               rng.uniform(-np.pi, np.pi, 100)):
        np.testing.assert_allclose(euler_rate_transform((phi, theta, psi)), SYM_RATE(phi, theta),
                                   atol=1e-12)


@settings(max_examples=100)
@given(angle, safe_pitch, angle, st.lists(st.floats(-1, 1), min_size=3, max_size=3))
def test_rate_transform_integrates_body_rates(phi, theta, psi, omega):
    """Euler rates from J_v2 reproduce R' = R S(omega) to second order."""
    e = np.array([phi, theta, psi])
    rates = euler_rate_transform(e) @ omega
    h = 1e-6
    Rdot = (rotation_body_to_world(e + h * rates) - rotation_body_to_world(e - h * rates)) / (2 * h)
    R = rotation_body_to_world(e)
    np.testing.assert_allclose(Rdot, R @ skew(omega), atol=1e-6)


def test_skew_zero_and_layout():
    np.testing.assert_array_equal(skew([0, 0, 0]), np.zeros((3, 3)))
    np.testing.assert_array_equal(skew([1, 2, 3]), [[0, -3, 2], [3, 0, -1], [-2, 1, 0]])


@given(st.lists(st.floats(-10, 10), min_size=3, max_size=3),
       st.lists(st.floats(-10, 10), min_size=3, max_size=3),
       st.floats(-5, 5))
def test_skew_cross_antisymmetric_linear(w, v, a):
    S = skew(w)
    np.testing.assert_array_equal(S.T, -S)
    np.testing.assert_allclose(S @ v, np.cross(w, v), atol=1e-14 * (1 + np.abs(w).max() * np.abs(v).max()))
    np.testing.assert_allclose(skew(a * np.asarray(w)), a * S, atol=1e-13)


def test_arm_fk_zero_joints_matches_transform_product():
    pose = arm_forward_kinematics(np.zeros(4), DH)
    T = dh_chain(np.zeros(4), ROWS)
    np.testing.assert_allclose(pose.position, T[:3, 3], atol=1e-15)
    np.testing.assert_allclose(pose.rotation, T[:3, :3], atol=1e-15)


def test_arm_fk_random_joints_match_oracle():
    rng = np.random.default_rng(1)
    for q in rng.uniform(-3, 3, (200, 4)):
        pose = arm_forward_kinematics(q, DH)
        T = dh_chain(q, ROWS)
        np.testing.assert_allclose(pose.position, T[:3, 3], atol=1e-14)
        np.testing.assert_allclose(pose.rotation, T[:3, :3], atol=1e-14)


def test_arm_fk_degenerate_chain_at_origin():
    zero = DHParams.zeros()
    for q in np.random.default_rng(2).uniform(-3, 3, (20, 4)):
        np.testing.assert_array_equal(arm_forward_kinematics(q, zero).position, np.zeros(3))


@settings(max_examples=100)
@given(st.lists(st.floats(-3, 3), min_size=4, max_size=4), st.integers(0, 3))
def test_arm_fk_periodic(q, j):
    q = np.array(q)
    q2 = q.copy()
    q2[j] += 2 * np.pi
    a, b = arm_forward_kinematics(q, DH), arm_forward_kinematics(q2, DH)
    np.testing.assert_allclose(a.position, b.position, atol=1e-12)
    np.testing.assert_allclose(a.rotation, b.rotation, atol=1e-12)


def test_wrist_roll_leaves_tip_position():
    q = np.array([0.3, -0.4, 0.9, 0.0])
    p0 = arm_forward_kinematics(q, DH).position
    for q4 in np.linspace(-3, 3, 7):
        q[3] = q4
        np.testing.assert_allclose(arm_forward_kinematics(q, DH).position, p0, atol=1e-15)


def test_arm_fk_strict_gimbal_lock():
    # zero posture with q4 = pi points the tool x axis straight up: pitch -pi/2
    q = np.array([0, 0, 0, np.pi])
    assert arm_forward_kinematics(q, DH).gimbal_lock
    with pytest.raises(SingularPitch):
        arm_forward_kinematics(q, DH, strict=True)


def test_arm_jacobian_position_block_vs_fd():
    rng = np.random.default_rng(3)
    h = 1e-6
    for q in rng.uniform(-2, 2, (50, 4)):
        J = arm_jacobian(q, DH)
        for k in range(4):
            dq = np.zeros(4)
            dq[k] = h
            fd = (dh_chain(q + dq, ROWS)[:3, 3] - dh_chain(q - dq, ROWS)[:3, 3]) / (2 * h)
            np.testing.assert_allclose(J[:3, k], fd, atol=1e-5)


def test_arm_jacobian_zero_chain():
    np.testing.assert_array_equal(arm_jacobian([0.1, 0.2, 0.3, 0.4], DHParams.zeros())[:3], np.zeros((3, 4)))


def test_arm_jacobian_wrist_column_geometric():
    q = np.array([0.2, 0.5, -0.3, 1.0])
    T3 = dh_chain(q[:3], ROWS[:3])
    pe = dh_chain(q, ROWS)[:3, 3]
    z3 = T3[:3, 2]
    np.testing.assert_allclose(arm_jacobian(q, DH)[:3, 3], skew(z3) @ (pe - T3[:3, 3]), atol=1e-15)


def test_system_jacobian_zero_config_identity_block():
    J = system_jacobian(np.zeros(8), DH).matrix
    np.testing.assert_array_equal(J[:3, :3], np.eye(3))


def test_system_jacobian_vs_fd():
    for q in random_configs_default(200):
        np.testing.assert_allclose(system_jacobian(q, DH).matrix, fd_twist_jacobian(q, ROWS), atol=1e-7)


def random_configs_default(n, seed=5):
    from auvms_plan.world import Scenario

    return random_configs(Scenario(), n, seed)


def test_system_jacobian_translation_invariant():
    q = make_config((0, 0, 0), 0.7, (0.3, -0.2, 0.5, 1.0))
    q2 = q.copy()
    q2[:3] = (3.0, -2.0, 5.5)
    np.testing.assert_array_equal(system_jacobian(q, DH).matrix, system_jacobian(q2, DH).matrix)


def test_system_jacobian_body_frame_relation():
    q = make_config((1, 2, 3), 1.2, (0.3, -0.2, 0.5, 1.0))
    Jc = system_jacobian(q, DH).matrix
    Jb = system_jacobian(q, DH, frame="body").matrix
    R = rotation_body_to_world((0, 0, 1.2))
    np.testing.assert_allclose(Jb[:, :3], Jc[:, :3] @ R)
    np.testing.assert_array_equal(Jb[:, 3:], Jc[:, 3:])


def test_eef_pose_identity_vehicle_equals_arm():
    q = np.array([0.4, -0.3, 0.8, 2.0])
    arm = arm_forward_kinematics(q, DH)
    eef = eef_world_pose(make_config(joints=q), DH)
    np.testing.assert_allclose(eef.position, arm.position, atol=1e-15)
    np.testing.assert_allclose(eef.rotation, arm.rotation, atol=1e-15)


def test_eef_pose_yaw_pi_reflects_xy():
    q = make_config((0, 0, 0), 0.0, (0.4, -0.3, 0.8, 2.0))
    p = eef_world_pose(q, DH).position
    q[3] = np.pi
    p2 = eef_world_pose(q, DH).position
    np.testing.assert_allclose(p2, [-p[0], -p[1], p[2]], atol=1e-14)


def test_eef_pose_matches_oracle_and_batch():
    qs = random_configs_default(100, seed=8)
    batch = eef_positions(qs, DH)
    for q, pb in zip(qs, batch):
        T = world_tip(q, ROWS)
        pose = eef_world_pose(q, DH)
        np.testing.assert_allclose(pose.position, T[:3, 3], atol=1e-13)
        np.testing.assert_allclose(pose.rotation, T[:3, :3], atol=1e-13)
        np.testing.assert_allclose(pb, T[:3, 3], atol=1e-13)


def test_start_pose_golden():
    # worked by hand through the default table: the shoulder offset sends link 2
    # straight down (0.1 - 0.3), link 3 continues down (-0.5), the wrist axis ends
    # up along +y so the 0.15 tool offset lands at y = 0.15; q4 = pi flips the
    # tool x axis to +z, giving pitch -pi/2
    q = np.array([0, 0, 0, 0, 0, 0, 0, np.pi])
    pose = eef_world_pose(q, DH)
    np.testing.assert_allclose(pose.position, [0.0, 0.15, -0.5], atol=1e-15)
    np.testing.assert_allclose(pose.position, world_tip(q, ROWS)[:3, 3], atol=1e-15)
    assert pose.orientation.theta == pytest.approx(-np.pi / 2)
    assert pose.gimbal_lock


def test_wrap_angle_range():
    a = np.array([-3 * np.pi, -np.pi, 0.0, np.pi, 3 * np.pi, 7.0])
    w = wrap_angle(a)
    assert np.all((w > -np.pi) & (w <= np.pi))
    np.testing.assert_allclose(np.cos(w), np.cos(a), atol=1e-12)
