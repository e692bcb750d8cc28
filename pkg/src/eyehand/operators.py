"""Scripted operator policies that stand in for a human driving the camera.

Each policy maps the rendered view to a joystick command in [-1, 1]^3,
once per tick. The naive policy trusts the display: it assumes screen
right is teleop +X, screen up is teleop +Y, and size error maps to Z.
Under a roll-misaligned, uncorrected view that trust is exactly what
breaks down, which these policies are built to demonstrate.
"""
from __future__ import annotations

import math
from collections import deque

from .simcore import SimConfig, ViewFrame, clamp_axes

Vec3 = tuple[float, float, float]


class NaiveProportional:
    """Proportional recentering on the sphere, as a trusting operator would.

    Lateral axes are proportional to the sphere's pixel offset from the
    image center (normalized by the half-image), with the sign that would
    recentre it if the view were unmisaligned. The Z axis is proportional
    to log(target_radius / observed_radius), positive when the sphere
    looks too small (approach) and negative when too large (back away).
    An invisible sphere yields a zero command.
    """

    def __init__(self, config: SimConfig, gain_xy: float = 0.8, gain_z: float = 1.0):
        self.config = config
        self.gain_xy = float(gain_xy)
        self.gain_z = float(gain_z)
        intr = config.intrinsics
        self._target_radius_px = (intr.annulus_inner_px + intr.annulus_outer_px) / 2.0

    def command(self, view: ViewFrame) -> Vec3:
        if not view.visible:
            return (0.0, 0.0, 0.0)
        ax, ay = self._lateral(view)
        az = self.gain_z * math.log(self._target_radius_px / view.sphere_radius_px)
        return clamp_axes((ax, ay, az))

    def _lateral(self, view: ViewFrame) -> tuple[float, float]:
        intr = self.config.intrinsics
        cx, cy = intr.center
        u, v = view.sphere_center
        ax = self.gain_xy * (u - cx) / (intr.image_width_px / 2.0)
        ay = self.gain_xy * (cy - v) / (intr.image_height_px / 2.0)
        return ax, ay


class AdaptiveRotation(NaiveProportional):
    """Naive policy plus an online estimate of the view's roll rotation.

    The policy pairs each commanded lateral displacement with the sphere
    displacement observed on the next tick. For an aligned view a command
    (ax, ay) moves the sphere along (-ax, +ay) in pixel coordinates; the
    rotation between that expectation and the observations, estimated in
    closed form as atan2(sum of 2D crosses, sum of 2D dots) over a sliding
    window, is the apparent roll of the view. The naive lateral command is
    counter-rotated by the estimate before being issued, so the policy
    recovers alignment even where the naive one diverges. Pairs are kept
    only when the commanded displacement exceeds ``min_displacement_px``
    to keep sensor-scale noise out of the estimate; the estimate is zero
    until two pairs are available. Policies are single-trial objects.
    """

    def __init__(
        self,
        config: SimConfig,
        gain_xy: float = 0.8,
        gain_z: float = 1.0,
        window: int = 20,
        min_displacement_px: float = 0.2,
    ):
        super().__init__(config, gain_xy, gain_z)
        if window < 2:
            raise ValueError("window must be at least 2 pairs")
        self.window = int(window)
        self.min_displacement_px = float(min_displacement_px)
        self._pairs: deque[tuple[tuple[float, float], tuple[float, float]]] = deque(
            maxlen=self.window
        )
        self._pending: tuple[int, tuple[float, float], tuple[float, float], float] | None = None

    @property
    def view_roll_estimate(self) -> float:
        """Current estimate of the view's roll rotation, radians."""
        if len(self._pairs) < 2:
            return 0.0
        cross = sum(e[0] * o[1] - e[1] * o[0] for e, o in self._pairs)
        dot = sum(e[0] * o[0] + e[1] * o[1] for e, o in self._pairs)
        if cross == 0.0 and dot == 0.0:
            return 0.0
        return math.atan2(cross, dot)

    def command(self, view: ViewFrame) -> Vec3:
        if not view.visible:
            self._pending = None
            return (0.0, 0.0, 0.0)
        self._absorb_observation(view)

        ax, ay = self._lateral(view)
        phi = self.view_roll_estimate
        c, s = math.cos(phi), math.sin(phi)
        ax, ay = ax * c - ay * s, ax * s + ay * c
        az = self.gain_z * math.log(self._target_radius_px / view.sphere_radius_px)
        command = clamp_axes((ax, ay, az))

        expected_px = (
            self.config.translation_speed_mm_s
            * self.config.dt_s
            * (view.sphere_radius_px / self.config.scene.sphere_radius_mm)
            * math.hypot(command[0], command[1])
        )
        # For an aligned view, command (ax, ay) moves the sphere along
        # (-ax, +ay) on screen.
        self._pending = (
            view.tick,
            view.sphere_center,
            (-command[0], command[1]),
            expected_px,
        )
        return command

    def _absorb_observation(self, view: ViewFrame) -> None:
        if self._pending is None:
            return
        tick, center, expected_dir, expected_px = self._pending
        if tick + 1 == view.tick and expected_px > self.min_displacement_px:
            observed = (
                view.sphere_center[0] - center[0],
                view.sphere_center[1] - center[1],
            )
            self._pairs.append((expected_dir, observed))
        self._pending = None


class Replay:
    """Plays back a fixed command script, tick for tick; zeros beyond its end."""

    def __init__(self, script):
        self._script: list[Vec3] = [
            (float(a[0]), float(a[1]), float(a[2])) for a in script
        ]

    def command(self, view: ViewFrame) -> Vec3:
        if view.tick < len(self._script):
            return self._script[view.tick]
        return (0.0, 0.0, 0.0)


def make_operator(name: str, config: SimConfig, gain_xy: float = 0.8,
                  gain_z: float = 1.0, script=None):
    """CLI-facing factory mapping an operator name to a fresh policy."""
    if name == "naive-p":
        return NaiveProportional(config, gain_xy, gain_z)
    if name == "adaptive":
        return AdaptiveRotation(config, gain_xy, gain_z)
    if name == "replay":
        if script is None:
            raise ValueError("replay operator needs a command script")
        return Replay(script)
    raise ValueError(f"unknown operator {name!r}")
