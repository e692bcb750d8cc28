"""Numpy implementations of the hot kernels.

These are the reference semantics; the compiled module in ``_core.pyx``
mirrors the exact operation order so both backends produce bit-identical
float64 results (the extension is built with -ffp-contract=off for this
reason).
"""
from __future__ import annotations

import numpy as np


def grid_argmax(a: float, b: float, sin_tab: np.ndarray, cos_tab: np.ndarray) -> int:
    """Index of the first maximum of a*sin_tab[k] + b*cos_tab[k].

    With the tables sorted by angle, "first" means the smallest angle wins
    ties.
    """
    return int(np.argmax(a * sin_tab + b * cos_tab))


def hausdorff_directed_sq(points_a: np.ndarray, points_b: np.ndarray) -> float:
    """max over A of min over B of squared Euclidean distance.

    Both inputs are (n, 3) float64 arrays with n >= 1.
    """
    diff = points_a[:, None, :] - points_b[None, :, :]
    sq = diff[:, :, 0] * diff[:, :, 0]
    sq += diff[:, :, 1] * diff[:, :, 1]
    sq += diff[:, :, 2] * diff[:, :, 2]
    return float(np.max(np.min(sq, axis=1)))
