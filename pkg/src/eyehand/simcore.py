"""Deterministic fixed-timestep simulator for eye-in-hand viewpoint alignment.

The scene is a sphere flanked by three cubes (a quadruplet), fixed in the
teleoperation frame. The operator translates the camera with joystick
axes; the camera's orientation is a constant roll-pitch-yaw misalignment,
optionally roll-corrected for display. One trial ends when the projected
sphere sits inside the success annulus, or when the step budget runs out.

State evolves only through :func:`step`, which is pure: the same state,
command, and config produce bit-identical results on every platform and
backend. Roll correction changes the displayed view, never the dynamics,
so with- and without-correction runs of the same command script produce
identical rel_pos traces.

Conventions: the camera looks along the +Z axis of its displayed frame,
depth is the +Z camera coordinate, and pixel v grows downward (so a
camera-frame +Y offset moves the projection up the image).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np

from .correction import DegenerateAlignmentError, correction_angle
from .geometry import FrameTriad, RpyAngles, rpy_to_rotation
from .triallog import Sample, TrialLog, quantize, quantize_vec

Vec3 = tuple[float, float, float]


class TrialOverError(RuntimeError):
    """Raised when stepping a state whose trial has already ended."""


@dataclass(frozen=True)
class CameraIntrinsics:
    """Pinhole camera and success annulus, all in pixels except the clip plane."""

    focal_length_px: float = 400.0
    image_width_px: int = 480
    image_height_px: int = 480
    annulus_inner_px: float = 30.0
    annulus_outer_px: float = 60.0
    near_clip_mm: float = 1.0

    def __post_init__(self):
        if self.focal_length_px <= 0.0:
            raise ValueError("focal length must be positive")
        if self.image_width_px <= 0 or self.image_height_px <= 0:
            raise ValueError("image dimensions must be positive")
        if not 0.0 < self.annulus_inner_px < self.annulus_outer_px:
            raise ValueError("annulus radii must satisfy 0 < inner < outer")
        if self.annulus_outer_px >= min(self.image_width_px, self.image_height_px) / 2:
            raise ValueError("outer annulus radius must fit inside the image")
        if self.near_clip_mm <= 0.0:
            raise ValueError("near clip must be positive")

    @property
    def center(self) -> tuple[float, float]:
        return (self.image_width_px / 2.0, self.image_height_px / 2.0)


@dataclass(frozen=True)
class SceneSpec:
    """Quadruplet geometry and the two position constants of the task.

    ``start_offset_mm`` is rotated by the camera misalignment and added to
    ``default_position_mm`` to place the quadruplet at trial start; the
    start-goal distance is therefore the same under every misalignment.
    The cube offsets are pairwise distinct and linearly independent so the
    arrangement has no rotational or mirror symmetry (the view identifies
    the orientation uniquely).
    """

    sphere_radius_mm: float = 4.0
    cube_edge_mm: float = 6.0
    cube_offsets_mm: tuple[Vec3, Vec3, Vec3] = (
        (10.0, 0.0, 0.0),
        (0.0, 14.0, 0.0),
        (-8.0, -8.0, 12.0),
    )
    start_offset_mm: Vec3 = (30.0, 30.0, 140.0)
    default_position_mm: Vec3 = (0.0, 0.0, -40.0)

    def __post_init__(self):
        if self.sphere_radius_mm <= 0.0 or self.cube_edge_mm <= 0.0:
            raise ValueError("sphere radius and cube edge must be positive")
        offsets = [np.array(o, dtype=np.float64) for o in self.cube_offsets_mm]
        if len(offsets) != 3:
            raise ValueError("exactly three cube offsets are required")
        for i in range(3):
            for j in range(i + 1, 3):
                if np.array_equal(offsets[i], offsets[j]):
                    raise ValueError("cube offsets must be pairwise distinct")
        if abs(float(np.linalg.det(np.column_stack(offsets)))) < 1e-9:
            raise ValueError(
                "cube offsets must be linearly independent to break symmetry"
            )


@dataclass(frozen=True)
class SimConfig:
    """Everything that determines a trial, except the command stream."""

    rpy: RpyAngles = RpyAngles()
    correction: bool = False
    translation_speed_mm_s: float = 40.0
    dt_s: float = 1.0 / 60.0
    log_rate_hz: float = 20.0
    max_duration_s: float = 90.0
    seed: int = 0
    free_mode: bool = False
    intrinsics: CameraIntrinsics = CameraIntrinsics()
    scene: SceneSpec = SceneSpec()

    def __post_init__(self):
        if self.translation_speed_mm_s <= 0.0:
            raise ValueError("translation speed must be positive")
        if not 0.0 < self.dt_s <= 1.0:
            raise ValueError("dt must lie in (0, 1] seconds")
        if self.max_duration_s <= 0.0:
            raise ValueError("max duration must be positive")
        if self.log_rate_hz <= 0.0:
            raise ValueError("log rate must be positive")
        stride = 1.0 / (self.dt_s * self.log_rate_hz)
        if abs(stride - round(stride)) > 1e-9 or round(stride) < 1:
            raise ValueError(
                "log rate must divide the tick rate to a whole number of ticks"
            )
        if not self.free_mode:
            for name, value in (("pitch", self.rpy.pitch), ("yaw", self.rpy.yaw)):
                degrees = math.degrees(value)
                if min(abs(degrees - level) for level in (0.0, 45.0)) > 1e-9:
                    raise ValueError(
                        f"{name} must be 0 or 45 degrees unless free_mode is set"
                    )

    @property
    def log_stride_ticks(self) -> int:
        return round(1.0 / (self.dt_s * self.log_rate_hz))

    @property
    def max_steps(self) -> int:
        return round(self.max_duration_s / self.dt_s)


@dataclass(frozen=True)
class SimState:
    """Instantaneous simulation state; advanced only by :func:`step`."""

    rel_pos: Vec3
    tick: int = 0
    elapsed_s: float = 0.0
    moved: bool = False
    done: bool = False
    theta: float = 0.0


@dataclass(frozen=True)
class ViewFrame:
    """What the operator sees at one tick, in pixel coordinates.

    When ``visible`` is false (sphere at or behind the near clip plane)
    the sphere fields are zeroed and must not be interpreted.
    """

    sphere_center: tuple[float, float]
    sphere_radius_px: float
    cube_polygons: tuple[tuple[tuple[float, float], ...], ...]
    annulus_px: tuple[float, float]
    tick: int
    visible: bool


def clamp_axes(axes) -> Vec3:
    """Clamp a 3-axis command to [-1, 1]; non-finite input is an error."""
    if len(axes) != 3:
        raise ValueError(f"command must have 3 axes, got {len(axes)}")
    clamped = []
    for a in axes:
        value = float(a)
        if not math.isfinite(value):
            raise ValueError(f"command axes must be finite, got {axes}")
        clamped.append(min(1.0, max(-1.0, value)))
    return (clamped[0], clamped[1], clamped[2])


@lru_cache(maxsize=None)
def physical_rotation(rpy: RpyAngles) -> np.ndarray:
    R = rpy_to_rotation(rpy)
    R.setflags(write=False)
    return R


@lru_cache(maxsize=None)
def correction_for_rpy(rpy: RpyAngles) -> float:
    """Roll correction between the identity teleoperation frame and rpy's frame."""
    actual = FrameTriad.from_rotation(rpy_to_rotation(rpy))
    return correction_angle(FrameTriad.identity(), actual)


@lru_cache(maxsize=None)
def _displayed_rotation_cached(rpy: RpyAngles, correction: bool) -> np.ndarray:
    if not correction:
        return physical_rotation(rpy)
    theta = correction_for_rpy(rpy)
    corrected = RpyAngles(rpy.roll + theta, rpy.pitch, rpy.yaw)
    R = rpy_to_rotation(corrected)
    R.setflags(write=False)
    return R


def displayed_rotation(config: SimConfig) -> np.ndarray:
    """Rotation used to render the view: rpy with theta added to roll under WC."""
    return _displayed_rotation_cached(config.rpy, config.correction)


def correction_for_config(config: SimConfig) -> float:
    return correction_for_rpy(config.rpy) if config.correction else 0.0


def initial_relative_position(R, scene: SceneSpec) -> np.ndarray:
    """Start position of the quadruplet relative to the camera (teleop frame)."""
    R = np.asarray(R, dtype=np.float64)
    v_o = np.array(scene.start_offset_mm, dtype=np.float64)
    p_q = np.array(scene.default_position_mm, dtype=np.float64)
    return R @ v_o + p_q


def initial_state(config: SimConfig) -> SimState:
    rel = initial_relative_position(physical_rotation(config.rpy), config.scene)
    return SimState(
        rel_pos=(float(rel[0]), float(rel[1]), float(rel[2])),
        theta=correction_for_config(config),
    )


def _sphere_in_camera(rel_pos: Vec3, R) -> tuple[float, float, float]:
    """Camera-frame sphere center (x, y, depth) for rotation matrix R."""
    r0, r1, r2 = rel_pos
    x = float(R[0, 0] * r0 + R[1, 0] * r1 + R[2, 0] * r2)
    y = float(R[0, 1] * r0 + R[1, 1] * r1 + R[2, 1] * r2)
    depth = float(R[0, 2] * r0 + R[1, 2] * r1 + R[2, 2] * r2)
    return x, y, depth


def _success_at(rel_pos: Vec3, R, config: SimConfig) -> bool:
    """Goal predicate, evaluated on the physical camera frame.

    The predicate only involves the distance from the image center and
    the projected radius, both invariant under roll about the viewing
    axis, so with- and without-correction agree exactly.
    """
    intr = config.intrinsics
    x, y, depth = _sphere_in_camera(rel_pos, R)
    if depth <= intr.near_clip_mm:
        return False
    f = intr.focal_length_px
    offset = math.hypot(f * x / depth, f * y / depth)
    radius = f * config.scene.sphere_radius_mm / depth
    return (
        offset + intr.annulus_inner_px <= radius
        and offset + radius <= intr.annulus_outer_px
    )


def step(state: SimState, axes, config: SimConfig, _rphys=None) -> SimState:
    """Advance one tick: move the camera, then evaluate the goal predicate.

    ``axes`` is the joystick command in the teleoperation frame; positive
    axes move the camera toward positive teleop directions, decreasing
    rel_pos. Correction never enters here, which is what makes WC and WOC
    trajectories bit-identical for equal command scripts.
    """
    if state.done:
        raise TrialOverError("cannot step a finished trial")
    ax, ay, az = clamp_axes(axes)
    travel = config.translation_speed_mm_s * config.dt_s
    rel = (
        state.rel_pos[0] - ax * travel,
        state.rel_pos[1] - ay * travel,
        state.rel_pos[2] - az * travel,
    )
    tick = state.tick + 1
    R = physical_rotation(config.rpy) if _rphys is None else _rphys
    return SimState(
        rel_pos=rel,
        tick=tick,
        elapsed_s=tick * config.dt_s,
        moved=state.moved or ax != 0.0 or ay != 0.0 or az != 0.0,
        done=_success_at(rel, R, config),
        theta=state.theta,
    )


def _convex_hull(points: np.ndarray) -> tuple[tuple[float, float], ...]:
    """2D convex hull (Andrew's monotone chain), counter-clockwise."""
    order = np.lexsort((points[:, 1], points[:, 0]))
    pts = [tuple(points[i]) for i in order]
    unique = []
    for p in pts:
        if not unique or p != unique[-1]:
            unique.append(p)
    if len(unique) <= 2:
        return tuple(unique)

    def turn(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower = []
    for p in unique:
        while len(lower) >= 2 and turn(lower[-2], lower[-1], p) <= 0.0:
            lower.pop()
        lower.append(p)
    upper = []
    for p in reversed(unique):
        while len(upper) >= 2 and turn(upper[-2], upper[-1], p) <= 0.0:
            upper.pop()
        upper.append(p)
    return tuple(lower[:-1] + upper[:-1])


_CORNER_SIGNS = np.array(
    [[sx, sy, sz] for sx in (-1.0, 1.0) for sy in (-1.0, 1.0) for sz in (-1.0, 1.0)]
)


def project(
    state: SimState, config: SimConfig, include_cubes: bool = True, _rdisp=None
) -> ViewFrame:
    """Render the quadruplet through the displayed (possibly corrected) frame."""
    intr = config.intrinsics
    R = displayed_rotation(config) if _rdisp is None else _rdisp
    x, y, depth = _sphere_in_camera(state.rel_pos, R)
    cx, cy = intr.center
    f = intr.focal_length_px

    if depth <= intr.near_clip_mm:
        return ViewFrame(
            sphere_center=(0.0, 0.0),
            sphere_radius_px=0.0,
            cube_polygons=((), (), ()),
            annulus_px=(intr.annulus_inner_px, intr.annulus_outer_px),
            tick=state.tick,
            visible=False,
        )

    center = (f * x / depth + cx, -f * y / depth + cy)
    radius = f * config.scene.sphere_radius_mm / depth

    polygons: list[tuple[tuple[float, float], ...]] = []
    if include_cubes:
        rel = np.array(state.rel_pos, dtype=np.float64)
        half = config.scene.cube_edge_mm / 2.0
        corners = _CORNER_SIGNS * half
        for offset in config.scene.cube_offsets_mm:
            world = rel + np.asarray(offset, dtype=np.float64) + corners
            cam = world @ R  # row-vector form of R.T @ world_i
            depths = cam[:, 2]
            if np.any(depths <= intr.near_clip_mm):
                polygons.append(())
                continue
            uv = np.column_stack(
                (f * cam[:, 0] / depths + cx, -f * cam[:, 1] / depths + cy)
            )
            polygons.append(_convex_hull(uv))
    else:
        polygons = [(), (), ()]

    return ViewFrame(
        sphere_center=center,
        sphere_radius_px=radius,
        cube_polygons=tuple(polygons),
        annulus_px=(intr.annulus_inner_px, intr.annulus_outer_px),
        tick=state.tick,
        visible=True,
    )


def check_success(view: ViewFrame, intrinsics: CameraIntrinsics, sphere_radius_px=None) -> bool:
    """Annulus predicate on a rendered view: the sphere's disc must contain
    the inner circle and fit inside the outer circle."""
    if not view.visible:
        return False
    cx, cy = intrinsics.center
    radius = view.sphere_radius_px if sphere_radius_px is None else sphere_radius_px
    offset = math.hypot(view.sphere_center[0] - cx, view.sphere_center[1] - cy)
    return (
        offset + intrinsics.annulus_inner_px <= radius
        and offset + radius <= intrinsics.annulus_outer_px
    )


def config_to_record(config: SimConfig) -> dict:
    """Header record for trial logs: degrees and millimetres.

    Header floats are written at full precision, unlike the 9-digit
    sample records: dt = 1/60 rounded to 9 digits would no longer divide
    the log rate into whole ticks, breaking reconstruction.
    """
    roll_deg, pitch_deg, yaw_deg = config.rpy.to_degrees()
    intr = config.intrinsics
    scene = config.scene
    return {
        "roll_deg": float(roll_deg),
        "pitch_deg": float(pitch_deg),
        "yaw_deg": float(yaw_deg),
        "correction": config.correction,
        "translation_speed_mm_s": float(config.translation_speed_mm_s),
        "dt_s": float(config.dt_s),
        "log_rate_hz": float(config.log_rate_hz),
        "max_duration_s": float(config.max_duration_s),
        "seed": config.seed,
        "free_mode": config.free_mode,
        "intrinsics": {
            "focal_length_px": float(intr.focal_length_px),
            "image_width_px": intr.image_width_px,
            "image_height_px": intr.image_height_px,
            "annulus_inner_px": float(intr.annulus_inner_px),
            "annulus_outer_px": float(intr.annulus_outer_px),
            "near_clip_mm": float(intr.near_clip_mm),
        },
        "scene": {
            "sphere_radius_mm": float(scene.sphere_radius_mm),
            "cube_edge_mm": float(scene.cube_edge_mm),
            "cube_offsets_mm": [list(map(float, o)) for o in scene.cube_offsets_mm],
            "start_offset_mm": list(map(float, scene.start_offset_mm)),
            "default_position_mm": list(map(float, scene.default_position_mm)),
        },
    }


def record_to_config(record: dict) -> SimConfig:
    intr = record["intrinsics"]
    scene = record["scene"]
    return SimConfig(
        rpy=RpyAngles.from_degrees(
            record["roll_deg"], record["pitch_deg"], record["yaw_deg"]
        ),
        correction=bool(record["correction"]),
        translation_speed_mm_s=record["translation_speed_mm_s"],
        dt_s=record["dt_s"],
        log_rate_hz=record["log_rate_hz"],
        max_duration_s=record["max_duration_s"],
        seed=int(record["seed"]),
        free_mode=bool(record["free_mode"]),
        intrinsics=CameraIntrinsics(
            focal_length_px=intr["focal_length_px"],
            image_width_px=int(intr["image_width_px"]),
            image_height_px=int(intr["image_height_px"]),
            annulus_inner_px=intr["annulus_inner_px"],
            annulus_outer_px=intr["annulus_outer_px"],
            near_clip_mm=intr["near_clip_mm"],
        ),
        scene=SceneSpec(
            sphere_radius_mm=scene["sphere_radius_mm"],
            cube_edge_mm=scene["cube_edge_mm"],
            cube_offsets_mm=tuple(tuple(o) for o in scene["cube_offsets_mm"]),
            start_offset_mm=tuple(scene["start_offset_mm"]),
            default_position_mm=tuple(scene["default_position_mm"]),
        ),
    )


class TrialRunner:
    """Drives one trial tick by tick and assembles its TrialLog.

    Both the scripted runner and the interactive session server use this
    class, so a replayed command script reproduces a live trial's log
    byte for byte.
    """

    def __init__(self, config: SimConfig, max_steps: int | None = None):
        self.config = config
        self.max_steps = config.max_steps if max_steps is None else int(max_steps)
        if self.max_steps < 1:
            raise ValueError("max_steps must be at least 1")
        self._rphys = physical_rotation(config.rpy)
        self._correction = config.correction
        self._theta = correction_for_config(config)
        self._rdisp = displayed_rotation(config)
        self.state = replace(initial_state(config), theta=self._theta)
        self._stride = config.log_stride_ticks
        self._samples: list[Sample] = []
        self._script: list[Vec3] = []
        self._moved_tick: int | None = None
        self._done_tick: int | None = None
        self._aborted = False

    @property
    def done(self) -> bool:
        return self.state.done or self._aborted

    @property
    def out_of_time(self) -> bool:
        return self.state.tick >= self.max_steps

    @property
    def finished(self) -> bool:
        return self.done or self.out_of_time

    @property
    def theta(self) -> float:
        return self._theta

    def view(self, include_cubes: bool = True) -> ViewFrame:
        return project(self.state, self.config, include_cubes, _rdisp=self._rdisp)

    def set_correction(self, enabled: bool) -> None:
        """Switch the displayed frame mid-trial; dynamics are unaffected.

        If the corrected angle is degenerate (no preferred roll), the
        previous angle is kept.
        """
        self._correction = bool(enabled)
        if not self._correction:
            self._theta = 0.0
            self._rdisp = self._rphys
        else:
            try:
                self._theta = correction_for_rpy(self.config.rpy)
            except DegenerateAlignmentError:
                pass  # hold the previous angle
            rpy = self.config.rpy
            self._rdisp = _displayed_rotation_cached(
                RpyAngles(rpy.roll + self._theta, rpy.pitch, rpy.yaw), False
            )
        self.state = replace(self.state, theta=self._theta)

    def apply(self, axes) -> None:
        """Consume one command: log if on a 20 Hz boundary, then step."""
        if self.finished:
            raise TrialOverError("trial has ended; no further commands accepted")
        command = clamp_axes(axes)
        if self._moved_tick is None and command != (0.0, 0.0, 0.0):
            self._moved_tick = self.state.tick
        if self.state.tick % self._stride == 0:
            self._samples.append(self._sample(command))
        self._script.append(command)
        self.state = step(self.state, command, self.config, _rphys=self._rphys)
        if self.state.done:
            self._done_tick = self.state.tick

    def abort(self) -> None:
        if self.state.done:
            raise TrialOverError("cannot abort a trial that already succeeded")
        self._aborted = True

    def finish(self) -> TrialLog:
        """Assemble the log; also emits the terminal sample when it falls
        on a 20 Hz boundary."""
        if self.state.tick % self._stride == 0 and not (
            self._samples and self._samples[-1].tick == self.state.tick
        ):
            self._samples.append(self._sample((0.0, 0.0, 0.0)))
        if self._aborted:
            outcome = "aborted"
        elif self.state.done:
            outcome = "success"
        else:
            outcome = "timeout"
        completion = None
        if outcome == "success" and self._moved_tick is not None:
            completion = quantize(
                (self._done_tick - self._moved_tick) * self.config.dt_s
            )
        return TrialLog(
            config=config_to_record(self.config),
            samples=tuple(self._samples),
            outcome=outcome,
            completion_time_s=completion,
            script=tuple(self._script),
        )

    def _sample(self, command: Vec3) -> Sample:
        state = self.state
        return Sample(
            tick=state.tick,
            t=quantize(state.tick * self.config.dt_s),
            axes=quantize_vec(command),
            rel_pos=quantize_vec(state.rel_pos),
            theta_deg=quantize(math.degrees(self._theta)),
            success=state.done or _success_at(state.rel_pos, self._rphys, self.config),
        )


def run_scripted(config: SimConfig, operator, max_steps: int | None = None) -> TrialLog:
    """Run one trial driven by an operator policy; returns its TrialLog.

    The policy sees the displayed view (without cube outlines, which no
    policy uses) and returns a 3-axis command each tick.
    """
    runner = TrialRunner(config, max_steps)
    while not runner.finished:
        view = runner.view(include_cubes=False)
        runner.apply(operator.command(view))
    return runner.finish()
