"""Closed-form roll correction between a teleoperation frame and a camera frame.

The misalignment that matters for screen-space teleoperation is the roll
of the camera about its own viewing axis. Given the teleoperation triad T
and the actual camera triad A, the roll angle that best aligns the
corrected X/Y axes with T maximizes

    g(theta) = X_T . X_C(theta) + Y_T . Y_C(theta)
             = (X_T . Y_A - Y_T . X_A) sin(theta)
               + (X_T . X_A + Y_T . Y_A) cos(theta)

whose maximizer has the closed form theta = atan2(s, c) with
s = X_T . Y_A - Y_T . X_A and c = X_T . X_A + Y_T . Y_A.
"""
from __future__ import annotations

import math

import numpy as np

from . import _kernels
from .geometry import FrameTriad

MIN_GRID_SIZE = 16


class DegenerateAlignmentError(ValueError):
    """Raised when both atan2 arguments vanish exactly and no roll is preferred."""


def alignment_objective(teleop: FrameTriad, actual: FrameTriad, theta: float) -> float:
    """Value of the alignment objective at roll angle ``theta``; range [-2, 2]."""
    s, c = _alignment_terms(teleop, actual)
    return s * math.sin(theta) + c * math.cos(theta)


def correction_angle(teleop: FrameTriad, actual: FrameTriad) -> float:
    """Roll angle in (-pi, pi] that best aligns ``actual`` with ``teleop``.

    Raises DegenerateAlignmentError when both atan2 arguments are exactly
    zero (e.g. the frames are related by a half-turn about X or Y);
    interactive callers should keep their previous angle in that case.
    """
    s, c = _alignment_terms(teleop, actual)
    if s == 0.0 and c == 0.0:
        raise DegenerateAlignmentError(
            "alignment objective is constant; correction angle is undefined"
        )
    return math.atan2(s, c)


def apply_roll_correction(frame: FrameTriad, theta: float) -> FrameTriad:
    """Rotate ``frame`` by ``theta`` about its own Z axis.

    X_C = X cos(theta) + Y sin(theta), Y_C = Y cos(theta) - X sin(theta),
    Z_C = Z: equivalent to R @ Rot(z, theta) on the frame's matrix.
    """
    x = frame.x_array
    y = frame.y_array
    c, s = math.cos(theta), math.sin(theta)
    xc = x * c + y * s
    yc = y * c - x * s
    return FrameTriad(tuple(xc), tuple(yc), frame.z)


def brute_force_correction(
    teleop: FrameTriad, actual: FrameTriad, grid_size: int = 4096
) -> float:
    """Grid-search maximizer of the alignment objective over (-pi, pi].

    Independent oracle for :func:`correction_angle`; agrees with it to
    within one grid step. Ties resolve to the smallest angle.
    """
    if grid_size < MIN_GRID_SIZE:
        raise ValueError(f"grid_size must be at least {MIN_GRID_SIZE}, got {grid_size}")
    s, c = _alignment_terms(teleop, actual)
    angles, sin_tab, cos_tab = _kernels.theta_grid(grid_size)
    k = _kernels.grid_argmax(s, c, sin_tab, cos_tab)
    return float(angles[k])


def _alignment_terms(teleop: FrameTriad, actual: FrameTriad) -> tuple[float, float]:
    xt, yt = teleop.x_array, teleop.y_array
    xa, ya = actual.x_array, actual.y_array
    s = float(np.dot(xt, ya)) - float(np.dot(yt, xa))
    c = float(np.dot(xt, xa)) + float(np.dot(yt, ya))
    return s, c
