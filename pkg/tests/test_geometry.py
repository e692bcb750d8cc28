"""Rotation construction, conversion, and frame validation tests.

The roll-pitch-yaw product is checked against a hand-written pure-Python
matrix oracle so a regression in composition order or in any single-axis
rotation cannot slip through via a shared numpy code path.
"""

import math

import numpy as np
import pytest

from eyehand import (
    AxisAngle,
    FrameTriad,
    RpyAngles,
    axis_angle_to_rotation,
    cosine_distance,
    rotation_to_axis_angle,
    rpy_to_rotation,
    wrap_angle,
)
from eyehand.geometry import TAU, normalize, require_rotation, rot_x, rot_y, rot_z


def _mul(a, b):
    return [
        [sum(a[i][k] * b[k][j] for k in range(3)) for j in range(3)]
        for i in range(3)
    ]


def _rx(t):
    c, s = math.cos(t), math.sin(t)
    return [[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]]


def _ry(t):
    c, s = math.cos(t), math.sin(t)
    return [[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]]


def _rz(t):
    c, s = math.cos(t), math.sin(t)
    return [[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]]


def random_rotation(rng):
    """Uniform-ish random rotation via QR, independent of the library."""
    q, r = np.linalg.qr(rng.normal(size=(3, 3)))
    q *= np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 2] = -q[:, 2]
    return q


def test_single_axis_rotations_match_hand_matrices():
    for angle in (0.0, 0.3, -1.2, math.pi / 2, math.pi):
        np.testing.assert_allclose(rot_x(angle), _rx(angle), rtol=0, atol=0)
        np.testing.assert_allclose(rot_y(angle), _ry(angle), rtol=0, atol=0)
        np.testing.assert_allclose(rot_z(angle), _rz(angle), rtol=0, atol=0)


def test_rpy_matches_pure_python_triple_product():
    rng = np.random.default_rng(7)
    for _ in range(200):
        roll, pitch, yaw = rng.uniform(0.0, TAU, size=3)
        got = rpy_to_rotation(RpyAngles(roll, pitch, yaw))
        want = _mul(_ry(yaw), _mul(_rx(pitch), _rz(roll)))
        np.testing.assert_allclose(got, want, rtol=0, atol=1e-14)


def test_rpy_composition_order_is_not_commuted():
    rpy = RpyAngles(0.4, 0.7, 1.1)
    wrong = _mul(_rz(rpy.roll), _mul(_rx(rpy.pitch), _ry(rpy.yaw)))
    assert np.max(np.abs(rpy_to_rotation(rpy) - np.array(wrong))) > 1e-3


def test_rpy_outputs_are_valid_rotations():
    rng = np.random.default_rng(11)
    for _ in range(10_000):
        roll, pitch, yaw = rng.uniform(0.0, TAU, size=3)
        require_rotation(rpy_to_rotation(RpyAngles(roll, pitch, yaw)))


def test_rpy_angles_normalize_to_0_2pi():
    rpy = RpyAngles(-0.5, TAU + 0.25, 3 * TAU)
    assert 0.0 <= rpy.roll < TAU
    assert math.isclose(rpy.roll, TAU - 0.5, abs_tol=1e-12)
    assert math.isclose(rpy.pitch, 0.25, abs_tol=1e-12)
    assert rpy.yaw == 0.0


def test_rpy_rejects_non_finite():
    with pytest.raises(ValueError):
        RpyAngles(math.nan, 0.0, 0.0)
    with pytest.raises(ValueError):
        RpyAngles(0.0, math.inf, 0.0)


def test_rpy_degree_round_trip_on_grid():
    for deg in (0.0, 45.0, 90.0, 135.0, 180.0, 225.0, 270.0, 315.0):
        back = RpyAngles.from_degrees(deg, 0.0, 45.0).to_degrees()
        assert math.isclose(back[0], deg, abs_tol=1e-12)
        assert back[1] == 0.0
        assert math.isclose(back[2], 45.0, abs_tol=1e-12)


def test_wrap_angle_range_and_periodicity():
    rng = np.random.default_rng(3)
    for angle in rng.uniform(-50.0, 50.0, size=2000):
        w = wrap_angle(angle)
        assert -math.pi < w <= math.pi
        assert math.isclose(wrap_angle(angle + TAU), w, abs_tol=1e-9)
    assert wrap_angle(math.pi) == math.pi
    assert wrap_angle(-math.pi) == math.pi
    assert wrap_angle(0.0) == 0.0


def test_cosine_distance_hand_values():
    assert cosine_distance((1, 0, 0), (1, 0, 0)) == pytest.approx(0.0, abs=1e-15)
    assert cosine_distance((1, 0, 0), (0, 1, 0)) == pytest.approx(1.0, abs=1e-15)
    assert cosine_distance((1, 0, 0), (-1, 0, 0)) == pytest.approx(2.0, abs=1e-15)


def test_cosine_distance_symmetric_and_scale_invariant():
    rng = np.random.default_rng(5)
    for _ in range(300):
        a, b = rng.normal(size=(2, 3))
        lam, mu = rng.uniform(0.1, 10.0, size=2)
        d = cosine_distance(a, b)
        assert math.isclose(d, cosine_distance(b, a), abs_tol=1e-12)
        assert math.isclose(d, cosine_distance(lam * a, mu * b), abs_tol=1e-12)


def test_normalize_unit_length_and_zero_rejected():
    v = normalize((3.0, 0.0, 4.0))
    np.testing.assert_allclose(v, (0.6, 0.0, 0.8), atol=1e-15)
    with pytest.raises(ValueError):
        normalize((0.0, 0.0, 0.0))


def test_axis_angle_round_trip():
    rng = np.random.default_rng(13)
    for _ in range(1000):
        matrix = random_rotation(rng)
        back = axis_angle_to_rotation(rotation_to_axis_angle(matrix))
        assert np.max(np.abs(back - matrix)) < 1e-9


def test_axis_angle_identity_convention():
    aa = rotation_to_axis_angle(np.eye(3))
    assert aa.angle == 0.0
    assert aa.axis == (0.0, 0.0, 1.0)


def test_axis_angle_half_turn():
    aa = rotation_to_axis_angle(_rx(math.pi))
    assert math.isclose(abs(aa.angle), math.pi, abs_tol=1e-12)
    assert math.isclose(abs(aa.axis[0]), 1.0, abs_tol=1e-9)


def test_axis_angle_rejects_non_unit_axis():
    with pytest.raises(ValueError):
        AxisAngle((1.0, 1.0, 0.0), 0.5)


def test_require_rotation_rejects_reflection_and_scaling():
    reflection = np.diag([1.0, 1.0, -1.0])
    with pytest.raises(ValueError):
        require_rotation(reflection)
    with pytest.raises(ValueError):
        require_rotation(2.0 * np.eye(3))
    with pytest.raises(ValueError):
        require_rotation(np.eye(4))


def test_frame_triad_validation():
    FrameTriad((1, 0, 0), (0, 1, 0), (0, 0, 1))
    with pytest.raises(ValueError):
        FrameTriad((1, 0, 0), (1, 0, 0), (0, 0, 1))
    with pytest.raises(ValueError):
        FrameTriad((1, 0, 0), (0, 1, 0), (0, 0, -1))
    with pytest.raises(ValueError):
        FrameTriad((2, 0, 0), (0, 1, 0), (0, 0, 1))


def test_frame_triad_matrix_round_trip():
    rng = np.random.default_rng(17)
    for _ in range(200):
        matrix = random_rotation(rng)
        triad = FrameTriad.from_rotation(matrix)
        np.testing.assert_allclose(triad.as_matrix(), matrix, atol=1e-15)
