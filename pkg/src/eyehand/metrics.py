"""Trial outcome metrics and the small-sample statistics used to compare them.

Completion time and trajectory length describe a single trial; Hausdorff
distances compare trajectory shapes between trials; the paired t test and
the summary table aggregate either across conditions.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.special import betainc
from scipy.stats import t as t_distribution

from . import _kernels
from .triallog import TrialLog


class NoCompletionError(ValueError):
    """Completion time requested for a trial that did not succeed."""


class DegenerateTestError(ValueError):
    """Paired test requested for differences with zero variance."""


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Camera positions at the log rate, as parallel (times, points) arrays.

    Timestamps are reconstructed from the integer sample ticks, strictly
    increase, and are spaced by the logging period to within 1e-9 s.
    """

    times: np.ndarray
    points: np.ndarray

    def __post_init__(self):
        times = np.asarray(self.times, dtype=np.float64)
        points = np.ascontiguousarray(self.points, dtype=np.float64)
        if times.ndim != 1 or points.shape != (times.shape[0], 3):
            raise ValueError("times must be (n,) and points (n, 3)")
        if times.shape[0] == 0:
            raise ValueError("trajectory must contain at least one sample")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "points", points)
        if times.shape[0] > 1:
            spacing = np.diff(times)
            if np.any(spacing <= 0.0):
                raise ValueError("trajectory timestamps must strictly increase")
            if np.any(np.abs(spacing - spacing[0]) > 1e-9):
                raise ValueError("trajectory sampling must be uniform within 1e-9 s")

    @classmethod
    def from_trial_log(cls, log: TrialLog) -> "Trajectory":
        dt = float(log.config["dt_s"])
        period = 1.0 / float(log.config["log_rate_hz"])
        ticks = np.array([s.tick for s in log.samples], dtype=np.int64)
        times = ticks * dt
        if times.shape[0] > 1 and np.any(np.abs(np.diff(times) - period) > 1e-9):
            raise ValueError("log samples are not spaced at the logging period")
        points = np.array([s.rel_pos for s in log.samples], dtype=np.float64)
        return cls(times, points)

    def __len__(self) -> int:
        return int(self.times.shape[0])


def completion_time(log: TrialLog) -> float:
    """Seconds from the first nonzero command to success.

    The runner computes this from exact tick indices and stores it in the
    log footer; this accessor validates the outcome and returns it.
    """
    if log.outcome != "success":
        raise NoCompletionError(f"trial outcome was {log.outcome!r}, not success")
    if log.completion_time_s is None:
        raise NoCompletionError("trial succeeded without any command; no start time")
    return float(log.completion_time_s)


def trajectory_length(trajectory) -> float:
    """Sum of Euclidean distances between consecutive samples, mm.

    Accepts a Trajectory or a TrialLog (converted at the sample rate).
    """
    if isinstance(trajectory, TrialLog):
        trajectory = Trajectory.from_trial_log(trajectory)
    if len(trajectory) < 2:
        raise ValueError("trajectory length needs at least 2 samples")
    deltas = np.diff(trajectory.points, axis=0)
    return float(np.sum(np.sqrt(np.sum(deltas * deltas, axis=1))))


def _as_points(trajectory) -> np.ndarray:
    if isinstance(trajectory, Trajectory):
        return trajectory.points
    points = np.ascontiguousarray(trajectory, dtype=np.float64)
    if points.ndim != 2 or points.shape[1] != 3 or points.shape[0] == 0:
        raise ValueError("point set must be a nonempty (n, 3) array")
    return points


def hausdorff_distance(a, b) -> float:
    """Symmetric discrete Hausdorff distance between two point sets, mm."""
    pa = _as_points(a)
    pb = _as_points(b)
    forward = _kernels.hausdorff_directed_sq(pa, pb)
    backward = _kernels.hausdorff_directed_sq(pb, pa)
    return math.sqrt(max(forward, backward))


def pairwise_hausdorff(trajectories: Sequence) -> list[float]:
    """Hausdorff distances for all index pairs i < j, in lexicographic order."""
    if len(trajectories) < 2:
        raise ValueError("pairwise distances need at least 2 trajectories")
    points = [_as_points(t) for t in trajectories]
    return [
        hausdorff_distance(points[i], points[j])
        for i in range(len(points))
        for j in range(i + 1, len(points))
    ]


@dataclass(frozen=True)
class PairedTestResult:
    n: int
    df: int
    mean_diff: float
    sd_diff: float
    t_statistic: float
    p_two_tailed: float


def paired_t_test(a, b) -> PairedTestResult:
    """Two-tailed paired t test of a against b.

    t = mean(d) / (sd(d) / sqrt(n)) with d = a - b and the n-1 sample
    standard deviation; the p value evaluates the t CDF through the
    regularized incomplete beta function.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError("paired samples must be 1-D and the same length")
    n = a.shape[0]
    if n < 2:
        raise ValueError("paired test needs at least 2 pairs")
    d = a - b
    mean = float(np.mean(d))
    sd = float(np.std(d, ddof=1))
    if sd == 0.0:
        raise DegenerateTestError("differences have zero variance")
    t = mean / (sd / math.sqrt(n))
    df = n - 1
    p = float(betainc(df / 2.0, 0.5, df / (df + t * t)))
    return PairedTestResult(
        n=n, df=df, mean_diff=mean, sd_diff=sd, t_statistic=t, p_two_tailed=p
    )


@dataclass(frozen=True)
class SummaryStats:
    n: int
    mean: float
    sd: float
    median: float
    ci95: tuple[float, float]


def summarize(values) -> SummaryStats:
    """Mean, sample sd, median, and a t-based 95% confidence interval.

    A single value has sd 0 and a degenerate interval [v, v].
    """
    values = np.asarray(values, dtype=np.float64)
    if values.ndim != 1 or values.shape[0] == 0:
        raise ValueError("summarize needs a nonempty 1-D sample")
    n = values.shape[0]
    mean = float(np.mean(values))
    if n == 1:
        return SummaryStats(n=1, mean=mean, sd=0.0, median=mean, ci95=(mean, mean))
    sd = float(np.std(values, ddof=1))
    median = float(np.median(values))
    if sd == 0.0:
        return SummaryStats(n=n, mean=mean, sd=0.0, median=median, ci95=(mean, mean))
    half_width = float(t_distribution.ppf(0.975, n - 1)) * sd / math.sqrt(n)
    return SummaryStats(
        n=n, mean=mean, sd=sd, median=median, ci95=(mean - half_width, mean + half_width)
    )
