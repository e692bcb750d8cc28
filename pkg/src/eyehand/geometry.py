"""Rotation representations and the vector primitives built on them.

Everything here works in millimetres and radians on float64 numpy arrays.
Rotation matrices are active transforms acting on column vectors; the
roll-pitch-yaw composition used throughout is

    R = Rot(y, yaw) @ Rot(x, pitch) @ Rot(z, roll)

i.e. roll is applied first, about the frame's own Z axis.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

TAU = 2.0 * math.pi

# Orthonormality / unit-length tolerance shared by all frame validation.
ORTHONORMAL_TOL = 1e-9

_ZERO_NORM_MSG = "zero-norm vector has no direction"
_NOT_ROTATION_MSG = "matrix is not a rotation: "


def as_vec3(v, name: str = "vector") -> np.ndarray:
    """Return ``v`` as a float64 array of shape (3,), rejecting non-finite input."""
    arr = np.asarray(v, dtype=np.float64)
    if arr.shape != (3,):
        raise ValueError(f"{name} must have shape (3,), got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must be finite, got {arr}")
    return arr


def normalize(v) -> np.ndarray:
    v = as_vec3(v)
    n = float(np.linalg.norm(v))
    if n == 0.0:
        raise ValueError(_ZERO_NORM_MSG)
    return v / n


def cosine_distance(a, b) -> float:
    """1 - cos(angle between a and b); in [0, 2] for any nonzero vectors."""
    a = as_vec3(a, "a")
    b = as_vec3(b, "b")
    na = float(np.linalg.norm(a))
    nb = float(np.linalg.norm(b))
    if na == 0.0 or nb == 0.0:
        raise ValueError(_ZERO_NORM_MSG)
    return 1.0 - float(np.dot(a, b)) / (na * nb)


def wrap_angle(angle: float) -> float:
    """Wrap ``angle`` to (-pi, pi]."""
    a = math.fmod(angle, TAU)
    if a > math.pi:
        a -= TAU
    elif a <= -math.pi:
        a += TAU
    return a


def rot_x(angle: float) -> np.ndarray:
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])


def rot_y(angle: float) -> np.ndarray:
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


def rot_z(angle: float) -> np.ndarray:
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


@dataclass(frozen=True)
class RpyAngles:
    """Roll, pitch, yaw in radians, stored normalized to [0, 2*pi)."""

    roll: float = 0.0
    pitch: float = 0.0
    yaw: float = 0.0

    def __post_init__(self):
        for name in ("roll", "pitch", "yaw"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value}")
            object.__setattr__(self, name, float(value) % TAU)

    @classmethod
    def from_degrees(cls, roll: float, pitch: float, yaw: float) -> "RpyAngles":
        return cls(math.radians(roll), math.radians(pitch), math.radians(yaw))

    def to_degrees(self) -> tuple[float, float, float]:
        return (math.degrees(self.roll), math.degrees(self.pitch), math.degrees(self.yaw))


def rpy_to_rotation(rpy: RpyAngles) -> np.ndarray:
    """Compose roll about Z, then pitch about X, then yaw about Y."""
    return rot_y(rpy.yaw) @ rot_x(rpy.pitch) @ rot_z(rpy.roll)


def require_rotation(matrix, tol: float = ORTHONORMAL_TOL) -> np.ndarray:
    """Validate a 3x3 rotation matrix (orthonormal, det +1) and return it."""
    R = np.ascontiguousarray(matrix, dtype=np.float64)
    if R.shape != (3, 3):
        raise ValueError(_NOT_ROTATION_MSG + f"shape {R.shape}")
    if not np.all(np.isfinite(R)):
        raise ValueError(_NOT_ROTATION_MSG + "non-finite entries")
    if not np.allclose(R.T @ R, np.eye(3), rtol=0.0, atol=tol):
        raise ValueError(_NOT_ROTATION_MSG + "columns are not orthonormal")
    if abs(float(np.linalg.det(R)) - 1.0) > tol:
        raise ValueError(_NOT_ROTATION_MSG + "determinant is not +1")
    return R


@dataclass(frozen=True)
class AxisAngle:
    """Unit rotation axis and angle in [0, pi].

    The zero rotation carries the conventional axis (0, 0, 1). At exactly
    pi, where the axis sign is ambiguous, the representative with positive
    first nonzero component is chosen.
    """

    axis: tuple[float, float, float]
    angle: float

    def __post_init__(self):
        ax = as_vec3(self.axis, "axis")
        n = float(np.linalg.norm(ax))
        if abs(n - 1.0) > ORTHONORMAL_TOL:
            raise ValueError(f"axis must be unit length, got norm {n}")
        if not (0.0 <= self.angle <= math.pi + ORTHONORMAL_TOL):
            raise ValueError(f"angle must lie in [0, pi], got {self.angle}")

    @property
    def axis_array(self) -> np.ndarray:
        return np.array(self.axis, dtype=np.float64)


def rotation_to_axis_angle(matrix) -> AxisAngle:
    """Extract the axis-angle form of a rotation matrix.

    Goes through the quaternion with the largest component (Shepperd's
    method), which stays well conditioned near 0 and near pi.
    """
    R = require_rotation(matrix)
    t = float(np.trace(R))
    candidates = [t, R[0, 0], R[1, 1], R[2, 2]]
    best = int(np.argmax(candidates))
    if best == 0:
        r = math.sqrt(1.0 + t)
        w = 0.5 * r
        x = 0.5 * (R[2, 1] - R[1, 2]) / r
        y = 0.5 * (R[0, 2] - R[2, 0]) / r
        z = 0.5 * (R[1, 0] - R[0, 1]) / r
    elif best == 1:
        r = math.sqrt(1.0 + R[0, 0] - R[1, 1] - R[2, 2])
        w = 0.5 * (R[2, 1] - R[1, 2]) / r
        x = 0.5 * r
        y = 0.5 * (R[0, 1] + R[1, 0]) / r
        z = 0.5 * (R[0, 2] + R[2, 0]) / r
    elif best == 2:
        r = math.sqrt(1.0 - R[0, 0] + R[1, 1] - R[2, 2])
        w = 0.5 * (R[0, 2] - R[2, 0]) / r
        x = 0.5 * (R[0, 1] + R[1, 0]) / r
        y = 0.5 * r
        z = 0.5 * (R[1, 2] + R[2, 1]) / r
    else:
        r = math.sqrt(1.0 - R[0, 0] - R[1, 1] + R[2, 2])
        w = 0.5 * (R[1, 0] - R[0, 1]) / r
        x = 0.5 * (R[0, 2] + R[2, 0]) / r
        y = 0.5 * (R[1, 2] + R[2, 1]) / r
        z = 0.5 * r

    if w < 0.0:
        w, x, y, z = -w, -x, -y, -z
    vec_norm = math.sqrt(x * x + y * y + z * z)
    angle = 2.0 * math.atan2(vec_norm, w)
    if vec_norm == 0.0 or angle == 0.0:
        return AxisAngle((0.0, 0.0, 1.0), 0.0)
    axis = np.array([x, y, z]) / vec_norm
    if angle > math.pi:
        # atan2 keeps angle in [0, pi] for w >= 0; guard against rounding.
        angle = math.pi
    if w == 0.0:
        # Half-turn: fix the sign convention deterministically.
        for component in axis:
            if component != 0.0:
                if component < 0.0:
                    axis = -axis
                break
    return AxisAngle((float(axis[0]), float(axis[1]), float(axis[2])), float(angle))


def axis_angle_to_rotation(aa: AxisAngle) -> np.ndarray:
    """Rodrigues' formula: R = I + sin(t) K + (1 - cos(t)) K^2."""
    kx, ky, kz = aa.axis
    K = np.array([[0.0, -kz, ky], [kz, 0.0, -kx], [-ky, kx, 0.0]])
    return np.eye(3) + math.sin(aa.angle) * K + (1.0 - math.cos(aa.angle)) * (K @ K)


@dataclass(frozen=True)
class FrameTriad:
    """Right-handed orthonormal triad (X, Y, Z), e.g. the axes of a camera.

    Stored as tuples so that triads are hashable and trivially immutable;
    use :meth:`as_matrix` for numerical work.
    """

    x: tuple[float, float, float]
    y: tuple[float, float, float]
    z: tuple[float, float, float]

    def __post_init__(self):
        vx = as_vec3(self.x, "x")
        vy = as_vec3(self.y, "y")
        vz = as_vec3(self.z, "z")
        for name, v in (("x", vx), ("y", vy), ("z", vz)):
            if abs(float(np.linalg.norm(v)) - 1.0) > ORTHONORMAL_TOL:
                raise ValueError(f"frame axis {name} is not unit length")
        if (
            abs(float(np.dot(vx, vy))) > ORTHONORMAL_TOL
            or abs(float(np.dot(vy, vz))) > ORTHONORMAL_TOL
            or abs(float(np.dot(vz, vx))) > ORTHONORMAL_TOL
        ):
            raise ValueError("frame axes are not mutually orthogonal")
        if float(np.linalg.norm(np.cross(vx, vy) - vz)) > ORTHONORMAL_TOL:
            raise ValueError("frame is not right-handed (X x Y != Z)")

    @classmethod
    def identity(cls) -> "FrameTriad":
        return cls((1.0, 0.0, 0.0), (0.0, 1.0, 0.0), (0.0, 0.0, 1.0))

    @classmethod
    def from_rotation(cls, matrix) -> "FrameTriad":
        R = require_rotation(matrix)
        return cls(tuple(R[:, 0]), tuple(R[:, 1]), tuple(R[:, 2]))

    def as_matrix(self) -> np.ndarray:
        return np.column_stack([self.x, self.y, self.z])

    @property
    def x_array(self) -> np.ndarray:
        return np.array(self.x, dtype=np.float64)

    @property
    def y_array(self) -> np.ndarray:
        return np.array(self.y, dtype=np.float64)

    @property
    def z_array(self) -> np.ndarray:
        return np.array(self.z, dtype=np.float64)
