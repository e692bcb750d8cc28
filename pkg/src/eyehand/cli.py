"""Command-line entry point (installed as ``sim``).

Subcommands: run, batch, correct, metrics, schedule, serve. Angles cross
this boundary in degrees and are converted to radians immediately; all
internal math is radians and millimetres.

Exit codes: 0 success, 1 runtime error, 2 trial timed out, 64 usage,
65 malformed input data.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .correction import DegenerateAlignmentError, correction_angle
from .geometry import FrameTriad, RpyAngles, require_rotation
from .metrics import (
    NoCompletionError,
    completion_time,
    paired_t_test,
    pairwise_hausdorff,
    summarize,
    Trajectory,
    trajectory_length,
)
from .operators import make_operator
from .schedule import ConditionGrid, build_schedule, format_schedule_tsv
from .simcore import SimConfig, TrialRunner, correction_for_config, run_scripted
from .triallog import OUTCOME_SUCCESS, OUTCOME_TIMEOUT, TrialLogParseError, read_trial_log

EX_OK = 0
EX_ERROR = 1
EX_TIMEOUT = 2
EX_USAGE = 64
EX_DATAERR = 65

CONFIG_ENV_VAR = "EYEHAND_CONFIG"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EX_USAGE, f"{self.prog}: error: {message}\n")


def load_base_config(path: str | None) -> SimConfig:
    """Build a SimConfig from defaults plus an optional JSON override file.

    The file may override any top-level SimConfig field except the
    per-trial ones (rpy, correction); intrinsics and scene are nested
    objects overriding individual fields.
    """
    if path is None:
        path = os.environ.get(CONFIG_ENV_VAR)
    config = SimConfig()
    if path is None:
        return config
    with open(path, encoding="utf-8") as fh:
        raw = json.load(fh)
    if not isinstance(raw, dict):
        raise ValueError("config file must hold a JSON object")
    allowed = {
        "translation_speed_mm_s",
        "dt_s",
        "log_rate_hz",
        "max_duration_s",
        "seed",
        "free_mode",
        "intrinsics",
        "scene",
    }
    unknown = set(raw) - allowed
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    overrides = dict(raw)
    for nested_field in ("intrinsics", "scene"):
        if nested_field in overrides:
            base = getattr(config, nested_field)
            overrides[nested_field] = replace(base, **overrides[nested_field])
    return replace(config, **overrides)


def _add_config_arg(parser) -> None:
    parser.add_argument(
        "--config",
        metavar="FILE",
        help=f"JSON config overrides (default: ${CONFIG_ENV_VAR} if set)",
    )


def _add_condition_args(parser) -> None:
    parser.add_argument(
        "--rpy",
        nargs=3,
        type=float,
        default=(0.0, 0.0, 0.0),
        metavar=("ROLL", "PITCH", "YAW"),
        help="camera mounting angles in degrees (default: 0 0 0)",
    )
    parser.add_argument(
        "--correction",
        action=argparse.BooleanOptionalAction,
        default=False,
        help="enable roll correction of the displayed frame",
    )


def _add_operator_args(parser) -> None:
    parser.add_argument(
        "--operator",
        choices=("naive-p", "adaptive"),
        default="naive-p",
        help="automated operator driving the trial (default: naive-p)",
    )
    parser.add_argument("--gain-xy", type=float, default=None, help="lateral gain")
    parser.add_argument("--gain-z", type=float, default=None, help="depth gain")


def _operator_kwargs(args) -> dict:
    kwargs = {}
    if args.gain_xy is not None:
        kwargs["gain_xy"] = args.gain_xy
    if args.gain_z is not None:
        kwargs["gain_z"] = args.gain_z
    return kwargs


def _trial_config(base: SimConfig, args) -> SimConfig:
    roll, pitch, yaw = args.rpy
    return replace(
        base,
        rpy=RpyAngles.from_degrees(roll, pitch, yaw),
        correction=args.correction,
    )


def cmd_run(args) -> int:
    base = load_base_config(args.config)
    config = _trial_config(base, args)
    operator = make_operator(args.operator, config, **_operator_kwargs(args))
    log = run_scripted(config, operator)
    if args.log is not None:
        from .triallog import write_trial_log

        write_trial_log(log, args.log)
    theta_deg = math.degrees(correction_for_config(config))
    print(f"outcome\t{log.outcome}")
    print(f"theta_deg\t{theta_deg:.6f}")
    if log.outcome == OUTCOME_SUCCESS:
        print(f"completion_time_s\t{log.completion_time_s:.9g}")
        return EX_OK
    return EX_TIMEOUT


def cmd_batch(args) -> int:
    base = load_base_config(args.config)
    grid = ConditionGrid(repetitions=args.repetitions)
    schedule = build_schedule(grid, args.subjects, seed=args.seed)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "schedule.tsv").write_text(format_schedule_tsv(schedule), encoding="utf-8")
    from .triallog import write_trial_log

    n_success = 0
    for entry in schedule.entries:
        config = replace(
            base,
            rpy=RpyAngles.from_degrees(entry.roll_deg, entry.pitch_deg, entry.yaw_deg),
            correction=entry.correction,
        )
        operator = make_operator(args.operator, config, **_operator_kwargs(args))
        log = run_scripted(config, operator)
        name = f"s{entry.subject:02d}_t{entry.trial_index:03d}.jsonl"
        write_trial_log(log, out_dir / name)
        n_success += log.outcome == OUTCOME_SUCCESS
        print(
            f"{name}\troll={entry.roll_deg:g} pitch={entry.pitch_deg:g} "
            f"yaw={entry.yaw_deg:g} {'WC' if entry.correction else 'WOC'}"
            f"\t{log.outcome}"
        )
    total = len(schedule.entries)
    print(f"done\t{n_success}/{total} trials succeeded")
    return EX_OK


def _frames_from_file(path: str) -> tuple[FrameTriad, FrameTriad]:
    with open(path, encoding="utf-8") as fh:
        raw = json.load(fh)
    frames = []
    for key in ("teleop", "actual"):
        if key not in raw:
            raise ValueError(f"frame file is missing {key!r}")
        matrix = require_rotation(np.asarray(raw[key], dtype=float))
        frames.append(FrameTriad.from_rotation(matrix))
    return frames[0], frames[1]


def cmd_correct(args) -> int:
    if args.frames is not None:
        try:
            teleop, actual = _frames_from_file(args.frames)
        except (ValueError, json.JSONDecodeError) as exc:
            print(f"sim correct: bad frame file: {exc}", file=sys.stderr)
            return EX_DATAERR
        theta = correction_angle(teleop, actual)
    else:
        base = load_base_config(args.config)
        config = _trial_config(base, args)
        theta = correction_for_config(config)
    print(f"{math.degrees(theta):.6f}")
    return EX_OK


def _format_rows(rows: list[dict], columns: tuple[str, ...], fmt: str) -> str:
    def cell(value) -> str:
        if isinstance(value, bool):
            return "WC" if value else "WOC"
        if isinstance(value, float):
            return f"{value:.9g}"
        return str(value)

    if fmt == "json-lines":
        return "\n".join(json.dumps(r, sort_keys=True) for r in rows) + "\n"
    table = [columns] + [tuple(cell(row[c]) for c in columns) for row in rows]
    if fmt == "tsv":
        return "\n".join("\t".join(row) for row in table) + "\n"
    widths = [max(len(row[i]) for row in table) for i in range(len(columns))]
    lines = ["  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip() for row in table]
    return "\n".join(lines) + "\n"


_CONDITION_KEYS = ("roll_deg", "pitch_deg", "yaw_deg", "correction")


def _load_logs(log_dir: str) -> list:
    paths = sorted(Path(log_dir).glob("*.jsonl"))
    if not paths:
        raise FileNotFoundError(f"no .jsonl trial logs under {log_dir}")
    return [read_trial_log(p) for p in paths]


def cmd_metrics(args) -> int:
    try:
        logs = _load_logs(args.logs)
    except FileNotFoundError as exc:
        print(f"sim metrics: {exc}", file=sys.stderr)
        return EX_ERROR
    except TrialLogParseError as exc:
        print(f"sim metrics: {exc}", file=sys.stderr)
        return EX_DATAERR

    groups: dict[tuple, list] = {}
    for log in logs:
        key = tuple(log.config[k] for k in _CONDITION_KEYS)
        groups.setdefault(key, []).append(log)

    summary_rows = []
    for key in sorted(groups, key=lambda k: (k[1], k[2], k[0], k[3])):
        condition = dict(zip(_CONDITION_KEYS, key))
        for metric, values in _condition_metrics(groups[key]).items():
            if not values:
                continue
            stats = summarize(np.asarray(values))
            summary_rows.append(
                {
                    "metric": metric,
                    **condition,
                    "n": stats.n,
                    "mean": stats.mean,
                    "sd": stats.sd,
                    "median": stats.median,
                    "ci95_lo": stats.ci95[0],
                    "ci95_hi": stats.ci95[1],
                }
            )
    columns = ("metric",) + _CONDITION_KEYS + ("n", "mean", "sd", "median", "ci95_lo", "ci95_hi")
    sys.stdout.write(_format_rows(summary_rows, columns, args.format))

    if args.paired:
        test_rows = _paired_rows(groups)
        if test_rows:
            sys.stdout.write("\n")
            sys.stdout.write(
                _format_rows(
                    test_rows,
                    ("metric", "roll_deg", "pitch_deg", "yaw_deg", "n", "t", "df", "p"),
                    args.format,
                )
            )
    return EX_OK


def _condition_metrics(logs) -> dict[str, list[float]]:
    times, lengths = [], []
    trajectories = []
    for log in logs:
        try:
            times.append(completion_time(log))
        except NoCompletionError:
            pass
        if log.n_samples >= 2:
            lengths.append(trajectory_length(log))
            trajectories.append(Trajectory.from_trial_log(log))
    metrics = {"completion_time_s": times, "trajectory_length_mm": lengths}
    if len(trajectories) >= 2:
        metrics["pairwise_hausdorff_mm"] = list(pairwise_hausdorff(trajectories))
    return metrics


def _paired_rows(groups: dict[tuple, list]) -> list[dict]:
    """WC vs WOC paired tests per mounting, pairing trials by file order."""
    rows = []
    mountings = sorted({k[:3] for k in groups})
    for roll_deg, pitch_deg, yaw_deg in mountings:
        with_c = groups.get((roll_deg, pitch_deg, yaw_deg, True), [])
        without = groups.get((roll_deg, pitch_deg, yaw_deg, False), [])
        for metric, extract in (
            ("completion_time_s", _safe_completion),
            ("trajectory_length_mm", _safe_length),
        ):
            a = [v for v in map(extract, with_c) if v is not None]
            b = [v for v in map(extract, without) if v is not None]
            n = min(len(a), len(b))
            if n < 2:
                continue
            try:
                result = paired_t_test(np.asarray(a[:n]), np.asarray(b[:n]))
            except ValueError:
                continue
            rows.append(
                {
                    "metric": metric,
                    "roll_deg": roll_deg,
                    "pitch_deg": pitch_deg,
                    "yaw_deg": yaw_deg,
                    "n": result.n,
                    "t": result.t_statistic,
                    "df": result.df,
                    "p": result.p_two_tailed,
                }
            )
    return rows


def _safe_completion(log) -> float | None:
    try:
        return completion_time(log)
    except NoCompletionError:
        return None


def _safe_length(log) -> float | None:
    return trajectory_length(log) if log.n_samples >= 2 else None


def cmd_schedule(args) -> int:
    grid = ConditionGrid(repetitions=args.repetitions)
    schedule = build_schedule(grid, args.subjects, seed=args.seed)
    text = format_schedule_tsv(schedule)
    if args.out is not None:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EX_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .server import create_app

    base = load_base_config(args.config)
    schedule = None
    if args.subjects > 0:
        schedule = build_schedule(ConditionGrid(), args.subjects, seed=args.seed)
    app = create_app(
        base,
        log_dir=args.log_dir,
        schedule=schedule,
        static_dir=args.static,
        lockstep=args.lockstep,
    )
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return EX_OK


def build_parser() -> _Parser:
    parser = _Parser(prog="sim", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one automated trial")
    _add_config_arg(p_run)
    _add_condition_args(p_run)
    _add_operator_args(p_run)
    p_run.add_argument("--log", metavar="FILE", help="write the trial log here")
    p_run.set_defaults(func=cmd_run)

    p_batch = sub.add_parser("batch", help="run a full schedule of automated trials")
    _add_config_arg(p_batch)
    _add_operator_args(p_batch)
    p_batch.add_argument("--subjects", type=int, default=12)
    p_batch.add_argument("--repetitions", type=int, default=3)
    p_batch.add_argument("--seed", type=int, default=0)
    p_batch.add_argument("--out", required=True, metavar="DIR")
    p_batch.set_defaults(func=cmd_batch)

    p_correct = sub.add_parser("correct", help="print the roll-correction angle in degrees")
    _add_config_arg(p_correct)
    _add_condition_args(p_correct)
    p_correct.add_argument(
        "--frames",
        metavar="FILE",
        help="JSON file with explicit teleop/actual rotation matrices",
    )
    p_correct.set_defaults(func=cmd_correct)

    p_metrics = sub.add_parser("metrics", help="summarize a directory of trial logs")
    p_metrics.add_argument("--logs", required=True, metavar="DIR")
    p_metrics.add_argument(
        "--format", choices=("table", "tsv", "json-lines"), default="table"
    )
    p_metrics.add_argument(
        "--paired",
        action=argparse.BooleanOptionalAction,
        default=True,
        help="include paired correction-vs-none tests per mounting",
    )
    p_metrics.set_defaults(func=cmd_metrics)

    p_schedule = sub.add_parser("schedule", help="emit a counterbalanced trial schedule")
    p_schedule.add_argument("--subjects", type=int, default=12)
    p_schedule.add_argument("--repetitions", type=int, default=3)
    p_schedule.add_argument("--seed", type=int, default=0)
    p_schedule.add_argument("--out", metavar="FILE")
    p_schedule.set_defaults(func=cmd_schedule)

    p_serve = sub.add_parser("serve", help="serve interactive sessions over WebSocket")
    _add_config_arg(p_serve)
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8700)
    p_serve.add_argument("--log-dir", metavar="DIR")
    p_serve.add_argument("--static", metavar="DIR", help="directory with the browser UI")
    p_serve.add_argument("--lockstep", action="store_true")
    p_serve.add_argument("--subjects", type=int, default=12, help="size of /schedule")
    p_serve.add_argument("--seed", type=int, default=0)
    p_serve.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except DegenerateAlignmentError as exc:
        print(f"sim: {exc}", file=sys.stderr)
        return EX_ERROR
    except (ValueError, OSError) as exc:
        print(f"sim: {exc}", file=sys.stderr)
        return EX_ERROR


if __name__ == "__main__":
    sys.exit(main())
