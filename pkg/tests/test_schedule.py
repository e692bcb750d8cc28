"""Counterbalanced schedule generation: Williams squares, per-subject
cell balance, and the TSV export."""

from collections import Counter

import numpy as np
import pytest

from eyehand import (
    ConditionGrid,
    build_schedule,
    format_schedule_tsv,
    parse_schedule_tsv,
    williams_square,
)
from eyehand.schedule import SCHEDULE_COLUMNS, write_schedule_tsv


def carryover_counts(square):
    counts = Counter()
    for row in square:
        for a, b in zip(row[:-1], row[1:]):
            counts[(int(a), int(b))] += 1
    return counts


def test_williams_square_is_latin():
    for size in (2, 4, 8, 16):
        square = williams_square(size)
        assert square.shape == (size, size)
        want = set(range(size))
        for row in square:
            assert set(int(v) for v in row) == want
        for col in square.T:
            assert set(int(v) for v in col) == want


def test_williams_square_balances_first_order_carryover():
    for size in (2, 4, 8, 16):
        counts = carryover_counts(williams_square(size))
        assert len(counts) == size * (size - 1)
        assert set(counts.values()) == {1}


def test_williams_square_rejects_odd_and_tiny_sizes():
    with pytest.raises(ValueError):
        williams_square(5)
    with pytest.raises(ValueError):
        williams_square(1)


def test_default_grid_matches_the_experiment_design():
    grid = ConditionGrid()
    assert len(grid.cells) == 16
    assert grid.trials_per_subject == 48


def test_every_subject_gets_every_cell_three_times():
    schedule = build_schedule(ConditionGrid(), 8, seed=0)
    assert len(schedule.entries) == 8 * 48
    for subject in range(8):
        entries = [e for e in schedule.entries if e.subject == subject]
        assert len(entries) == 48
        assert [e.trial_index for e in entries] == list(range(48))
        counts = Counter((e.roll_deg, e.correction) for e in entries)
        assert len(counts) == 16
        assert set(counts.values()) == {3}
        assert len(set((e.pitch_deg, e.yaw_deg) for e in entries)) == 1
        reps = Counter(e.repetition for e in entries)
        assert reps == {1: 16, 2: 16, 3: 16}


def test_pitch_yaw_rotates_across_subjects():
    schedule = build_schedule(ConditionGrid(), 8, seed=0)
    pairs = [
        next((e.pitch_deg, e.yaw_deg) for e in schedule.entries if e.subject == s)
        for s in range(8)
    ]
    assert pairs[:4] == [(0.0, 0.0), (0.0, 45.0), (45.0, 0.0), (45.0, 45.0)]
    assert pairs[4:] == pairs[:4]


def test_schedule_is_seed_deterministic():
    a = build_schedule(ConditionGrid(), 4, seed=7)
    b = build_schedule(ConditionGrid(), 4, seed=7)
    c = build_schedule(ConditionGrid(), 4, seed=8)
    assert a.entries == b.entries
    assert a.entries != c.entries


def test_schedule_orderings_differ_between_subjects():
    schedule = build_schedule(ConditionGrid(), 2, seed=0)
    first = [e for e in schedule.entries if e.subject == 0][:16]
    second = [e for e in schedule.entries if e.subject == 1][:16]
    assert [(e.roll_deg, e.correction) for e in first] != [
        (e.roll_deg, e.correction) for e in second
    ]


def test_tsv_round_trip(tmp_path):
    schedule = build_schedule(ConditionGrid(), 3, seed=2)
    text = format_schedule_tsv(schedule)
    lines = text.splitlines()
    assert lines[0] == "\t".join(SCHEDULE_COLUMNS)
    assert len(lines) == 1 + len(schedule.entries)
    assert parse_schedule_tsv(text) == schedule.entries
    path = tmp_path / "schedule.tsv"
    write_schedule_tsv(schedule, path)
    assert parse_schedule_tsv(path.read_text(encoding="utf-8")) == schedule.entries


def test_parse_rejects_malformed_tsv():
    schedule = build_schedule(ConditionGrid(), 1, seed=0)
    text = format_schedule_tsv(schedule)
    with pytest.raises(ValueError):
        parse_schedule_tsv(text.replace("subject", "subjekt", 1))
    lines = text.splitlines()
    with pytest.raises(ValueError):
        parse_schedule_tsv("\n".join([lines[0], "1\t2\t3"]) + "\n")
    with pytest.raises(ValueError):
        parse_schedule_tsv(text.replace("\tWC", "\tmaybe", 1))


def test_grid_validation():
    with pytest.raises(ValueError):
        ConditionGrid(roll_levels_deg=())
    with pytest.raises(ValueError):
        ConditionGrid(roll_levels_deg=(0.0, 0.0))
    with pytest.raises(ValueError):
        ConditionGrid(repetitions=0)
    with pytest.raises(ValueError):
        build_schedule(ConditionGrid(), 0)
