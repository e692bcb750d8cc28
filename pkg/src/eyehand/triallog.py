"""Trial log records and their line-delimited file format.

A log file is a header line carrying the full simulation config, one line
per 20 Hz sample, and a footer line with the outcome:

    {"kind":"header","schema":1,...}
    {"kind":"sample","tick":0,"t":0,...}
    ...
    {"kind":"footer","completion_time_s":...,"n_samples":...,"outcome":...}

Every float is quantized to 9 significant decimal digits at the moment a
record is created, so serialization is bit-exact: write -> read -> write
reproduces the file byte for byte, and read -> write of an in-memory log
round-trips exactly.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

SCHEMA_VERSION = 1

OUTCOME_SUCCESS = "success"
OUTCOME_TIMEOUT = "timeout"
OUTCOME_ABORTED = "aborted"
OUTCOMES = (OUTCOME_SUCCESS, OUTCOME_TIMEOUT, OUTCOME_ABORTED)


class TrialLogParseError(ValueError):
    """Malformed trial log file; the message names the offending line."""


def quantize(value: float) -> float:
    """Round to 9 significant decimal digits (the log's native precision)."""
    return float(f"{value:.9g}")


def quantize_vec(values: Iterable[float]) -> tuple[float, ...]:
    return tuple(quantize(float(v)) for v in values)


@dataclass(frozen=True)
class Sample:
    """State of the simulation at one 20 Hz logging instant.

    ``axes`` is the (clamped) command applied at this tick; zeros on a
    terminal sample, where no further command exists. ``success`` is the
    goal predicate evaluated at this instant.
    """

    tick: int
    t: float
    axes: tuple[float, float, float]
    rel_pos: tuple[float, float, float]
    theta_deg: float
    success: bool


@dataclass(frozen=True)
class TrialLog:
    """One trial: config record, 20 Hz samples, and the outcome.

    ``config`` is the quantized header record (plain dict), which keeps
    equality and round-trips exact. ``script`` optionally carries the full
    per-tick command sequence for replay; it is not serialized and is
    excluded from comparisons.
    """

    config: dict
    samples: tuple[Sample, ...]
    outcome: str
    completion_time_s: float | None
    script: tuple[tuple[float, float, float], ...] | None = field(
        default=None, compare=False, repr=False
    )

    def __post_init__(self):
        if self.outcome not in OUTCOMES:
            raise ValueError(f"unknown outcome {self.outcome!r}")

    @property
    def n_samples(self) -> int:
        return len(self.samples)


def _dumps(record: dict) -> str:
    return json.dumps(record, sort_keys=True, separators=(",", ":"))


def _sample_record(sample: Sample) -> dict:
    return {
        "kind": "sample",
        "tick": sample.tick,
        "t": sample.t,
        "axes": list(sample.axes),
        "rel_pos": list(sample.rel_pos),
        "theta_deg": sample.theta_deg,
        "success": sample.success,
    }


def format_trial_log(log: TrialLog) -> str:
    header = dict(log.config)
    header["kind"] = "header"
    header["schema"] = SCHEMA_VERSION
    lines = [_dumps(header)]
    lines.extend(_dumps(_sample_record(s)) for s in log.samples)
    footer = {
        "kind": "footer",
        "outcome": log.outcome,
        "completion_time_s": log.completion_time_s,
        "n_samples": log.n_samples,
    }
    lines.append(_dumps(footer))
    return "\n".join(lines) + "\n"


def write_trial_log(log: TrialLog, path) -> None:
    Path(path).write_text(format_trial_log(log), encoding="utf-8")


def parse_trial_log(text: str) -> TrialLog:
    lines = text.splitlines()
    if len(lines) < 2:
        raise TrialLogParseError("log must have at least a header and a footer line")

    records = []
    for lineno, line in enumerate(lines, start=1):
        try:
            records.append(json.loads(line))
        except json.JSONDecodeError as exc:
            raise TrialLogParseError(f"line {lineno}: invalid JSON ({exc.msg})") from exc
        if not isinstance(records[-1], dict) or "kind" not in records[-1]:
            raise TrialLogParseError(f"line {lineno}: record has no 'kind' field")

    header = records[0]
    if header["kind"] != "header":
        raise TrialLogParseError("line 1: expected header record")
    if header.get("schema") != SCHEMA_VERSION:
        raise TrialLogParseError(
            f"line 1: unsupported schema {header.get('schema')!r}"
        )
    footer = records[-1]
    if footer["kind"] != "footer":
        raise TrialLogParseError(f"line {len(lines)}: expected footer record")

    samples = []
    previous_tick = -1
    for lineno, record in enumerate(records[1:-1], start=2):
        if record["kind"] != "sample":
            raise TrialLogParseError(f"line {lineno}: expected sample record")
        try:
            sample = Sample(
                tick=int(record["tick"]),
                t=float(record["t"]),
                axes=tuple(float(a) for a in record["axes"]),
                rel_pos=tuple(float(p) for p in record["rel_pos"]),
                theta_deg=float(record["theta_deg"]),
                success=bool(record["success"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise TrialLogParseError(f"line {lineno}: bad sample field ({exc})") from exc
        if len(sample.axes) != 3 or len(sample.rel_pos) != 3:
            raise TrialLogParseError(f"line {lineno}: axes/rel_pos must have 3 entries")
        if sample.tick <= previous_tick:
            raise TrialLogParseError(f"line {lineno}: sample ticks must increase")
        previous_tick = sample.tick
        samples.append(sample)

    try:
        outcome = footer["outcome"]
        completion = footer["completion_time_s"]
        n_samples = int(footer["n_samples"])
    except KeyError as exc:
        raise TrialLogParseError(f"footer is missing field {exc}") from exc
    if n_samples != len(samples):
        raise TrialLogParseError(
            f"footer n_samples={n_samples} but file has {len(samples)} samples"
        )
    if outcome not in OUTCOMES:
        raise TrialLogParseError(f"footer outcome {outcome!r} is not recognized")

    config = {k: v for k, v in header.items() if k not in ("kind", "schema")}
    return TrialLog(
        config=config,
        samples=tuple(samples),
        outcome=outcome,
        completion_time_s=None if completion is None else float(completion),
    )


def read_trial_log(path) -> TrialLog:
    return parse_trial_log(Path(path).read_text(encoding="utf-8"))
