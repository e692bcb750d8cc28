"""Counterbalanced trial schedules for multi-subject sessions.

The within-subject factors are roll level and correction (WC/WOC); their
cells are ordered by a Williams Latin square so first-order carryover is
balanced across subjects for even cell counts. Pitch-yaw pairs are a
between-subject factor assigned cyclically. Each subject runs the full
square row once per repetition.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from pathlib import Path

import numpy as np

DEFAULT_ROLL_LEVELS_DEG = (0.0, 45.0, 90.0, 135.0, 180.0, 225.0, 270.0, 315.0)
DEFAULT_PITCH_YAW_PAIRS_DEG = ((0.0, 0.0), (0.0, 45.0), (45.0, 0.0), (45.0, 45.0))


@dataclass(frozen=True)
class ConditionGrid:
    """Factor levels of an experiment; defaults reproduce the 3x8x2 design."""

    roll_levels_deg: tuple[float, ...] = DEFAULT_ROLL_LEVELS_DEG
    pitch_yaw_pairs_deg: tuple[tuple[float, float], ...] = DEFAULT_PITCH_YAW_PAIRS_DEG
    correction_levels: tuple[bool, ...] = (False, True)
    repetitions: int = 3

    def __post_init__(self):
        if not self.roll_levels_deg or not self.pitch_yaw_pairs_deg:
            raise ValueError("grid needs at least one roll level and pitch-yaw pair")
        if len(set(self.roll_levels_deg)) != len(self.roll_levels_deg):
            raise ValueError("roll levels must be distinct")
        if len(set(self.correction_levels)) != len(self.correction_levels):
            raise ValueError("correction levels must be distinct")
        if self.repetitions < 1:
            raise ValueError("repetitions must be at least 1")

    @property
    def cells(self) -> tuple[tuple[float, bool], ...]:
        """Within-subject (roll, correction) cells, in grid order."""
        return tuple(
            (roll, correction)
            for roll in self.roll_levels_deg
            for correction in self.correction_levels
        )

    @property
    def trials_per_subject(self) -> int:
        return len(self.cells) * self.repetitions


@dataclass(frozen=True)
class ScheduleEntry:
    subject: int
    trial_index: int
    roll_deg: float
    pitch_deg: float
    yaw_deg: float
    correction: bool
    repetition: int


@dataclass(frozen=True)
class Schedule:
    grid: ConditionGrid
    n_subjects: int
    seed: int
    entries: tuple[ScheduleEntry, ...]


def williams_square(size: int) -> np.ndarray:
    """Latin square of the given size with Williams' carryover balance.

    Row 0 interleaves the sequence from both ends (0, 1, n-1, 2, n-2, ...)
    and each later row adds 1 modulo n. For even n every ordered pair of
    distinct symbols appears exactly once in adjacent positions across the
    rows; odd sizes would need the mirrored square appended as well, and
    are rejected here since the within-subject cell count is always even
    (correction has two levels).
    """
    if size < 2:
        raise ValueError("square size must be at least 2")
    if size % 2 != 0:
        raise ValueError("Williams balance needs an even size")
    first = [0]
    low, high = 1, size - 1
    while len(first) < size:
        first.append(low)
        low += 1
        if len(first) < size:
            first.append(high)
            high -= 1
    base = np.array(first, dtype=np.int64)
    return np.stack([(base + r) % size for r in range(size)])


def build_schedule(grid: ConditionGrid, n_subjects: int, seed: int = 0) -> Schedule:
    """Deterministic schedule: every subject gets every (roll, correction)
    cell exactly ``repetitions`` times, ordered by a Williams square row.

    The seed shuffles the assignment of cells to square symbols and hence
    the orderings, but never the per-subject cell counts. Pitch-yaw pairs
    rotate across subjects in grid order.
    """
    if n_subjects < 1:
        raise ValueError("need at least one subject")
    cells = grid.cells
    square = williams_square(len(cells))
    rng = random.Random(seed)
    labeling = list(cells)
    rng.shuffle(labeling)

    entries = []
    for subject in range(n_subjects):
        pitch, yaw = grid.pitch_yaw_pairs_deg[subject % len(grid.pitch_yaw_pairs_deg)]
        row = square[subject % len(cells)]
        trial_index = 0
        for repetition in range(1, grid.repetitions + 1):
            for symbol in row:
                roll, correction = labeling[symbol]
                entries.append(
                    ScheduleEntry(
                        subject=subject,
                        trial_index=trial_index,
                        roll_deg=roll,
                        pitch_deg=pitch,
                        yaw_deg=yaw,
                        correction=correction,
                        repetition=repetition,
                    )
                )
                trial_index += 1
    return Schedule(grid=grid, n_subjects=n_subjects, seed=seed, entries=tuple(entries))


SCHEDULE_COLUMNS = (
    "subject",
    "trial_index",
    "roll_deg",
    "pitch_deg",
    "yaw_deg",
    "correction",
    "repetition",
)


def format_schedule_tsv(schedule: Schedule) -> str:
    lines = ["\t".join(SCHEDULE_COLUMNS)]
    for e in schedule.entries:
        lines.append(
            "\t".join(
                (
                    str(e.subject),
                    str(e.trial_index),
                    f"{e.roll_deg:g}",
                    f"{e.pitch_deg:g}",
                    f"{e.yaw_deg:g}",
                    "WC" if e.correction else "WOC",
                    str(e.repetition),
                )
            )
        )
    return "\n".join(lines) + "\n"


def write_schedule_tsv(schedule: Schedule, path) -> None:
    Path(path).write_text(format_schedule_tsv(schedule), encoding="utf-8")


def parse_schedule_tsv(text: str) -> tuple[ScheduleEntry, ...]:
    """Rows of a schedule file, without reconstructing the generating grid."""
    lines = [line for line in text.splitlines() if line.strip()]
    if not lines or tuple(lines[0].split("\t")) != SCHEDULE_COLUMNS:
        raise ValueError("schedule file must start with the standard column header")
    entries = []
    for lineno, line in enumerate(lines[1:], start=2):
        fields = line.split("\t")
        if len(fields) != len(SCHEDULE_COLUMNS):
            raise ValueError(f"line {lineno}: expected {len(SCHEDULE_COLUMNS)} columns")
        if fields[5] not in ("WC", "WOC"):
            raise ValueError(f"line {lineno}: correction must be WC or WOC")
        entries.append(
            ScheduleEntry(
                subject=int(fields[0]),
                trial_index=int(fields[1]),
                roll_deg=float(fields[2]),
                pitch_deg=float(fields[3]),
                yaw_deg=float(fields[4]),
                correction=fields[5] == "WC",
                repetition=int(fields[6]),
            )
        )
    return tuple(entries)
