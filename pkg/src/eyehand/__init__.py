"""Eye-in-hand teleoperation simulator with closed-form camera roll correction."""

from ._kernels import BACKEND
from .correction import (
    DegenerateAlignmentError,
    alignment_objective,
    apply_roll_correction,
    brute_force_correction,
    correction_angle,
)
from .geometry import (
    AxisAngle,
    FrameTriad,
    RpyAngles,
    axis_angle_to_rotation,
    cosine_distance,
    rotation_to_axis_angle,
    rpy_to_rotation,
    wrap_angle,
)
from .metrics import (
    DegenerateTestError,
    NoCompletionError,
    PairedTestResult,
    SummaryStats,
    Trajectory,
    completion_time,
    hausdorff_distance,
    paired_t_test,
    pairwise_hausdorff,
    summarize,
    trajectory_length,
)
from .operators import AdaptiveRotation, NaiveProportional, Replay, make_operator
from .schedule import (
    ConditionGrid,
    Schedule,
    ScheduleEntry,
    build_schedule,
    format_schedule_tsv,
    parse_schedule_tsv,
    williams_square,
)
from .simcore import (
    CameraIntrinsics,
    SceneSpec,
    SimConfig,
    SimState,
    TrialOverError,
    TrialRunner,
    ViewFrame,
    check_success,
    correction_for_config,
    displayed_rotation,
    initial_relative_position,
    initial_state,
    project,
    run_scripted,
    step,
)
from .triallog import (
    OUTCOME_ABORTED,
    OUTCOME_SUCCESS,
    OUTCOME_TIMEOUT,
    Sample,
    TrialLog,
    TrialLogParseError,
    parse_trial_log,
    read_trial_log,
    format_trial_log,
    write_trial_log,
)

__version__ = "0.1.0"

__all__ = [
    "AdaptiveRotation",
    "AxisAngle",
    "BACKEND",
    "CameraIntrinsics",
    "ConditionGrid",
    "DegenerateAlignmentError",
    "DegenerateTestError",
    "FrameTriad",
    "NaiveProportional",
    "NoCompletionError",
    "OUTCOME_ABORTED",
    "OUTCOME_SUCCESS",
    "OUTCOME_TIMEOUT",
    "PairedTestResult",
    "Replay",
    "RpyAngles",
    "Sample",
    "SceneSpec",
    "Schedule",
    "ScheduleEntry",
    "SimConfig",
    "SimState",
    "SummaryStats",
    "Trajectory",
    "TrialLog",
    "TrialLogParseError",
    "TrialOverError",
    "TrialRunner",
    "ViewFrame",
    "alignment_objective",
    "apply_roll_correction",
    "axis_angle_to_rotation",
    "brute_force_correction",
    "build_schedule",
    "check_success",
    "completion_time",
    "correction_angle",
    "correction_for_config",
    "cosine_distance",
    "displayed_rotation",
    "format_schedule_tsv",
    "format_trial_log",
    "hausdorff_distance",
    "initial_relative_position",
    "initial_state",
    "make_operator",
    "paired_t_test",
    "pairwise_hausdorff",
    "parse_schedule_tsv",
    "parse_trial_log",
    "project",
    "read_trial_log",
    "rotation_to_axis_angle",
    "rpy_to_rotation",
    "run_scripted",
    "step",
    "summarize",
    "trajectory_length",
    "williams_square",
    "wrap_angle",
    "write_trial_log",
]
