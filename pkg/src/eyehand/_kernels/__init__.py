"""Hot numeric kernels with a compiled fast path.

The compiled extension (Cython) is used when it was built; otherwise the
numpy fallback takes over. Set EYEHAND_PURE_PYTHON=1 to force the
fallback. Both backends are bit-identical; BACKEND records which one is
active.
"""
from __future__ import annotations

import math
import os
from functools import lru_cache

import numpy as np

from . import _fallback

if os.environ.get("EYEHAND_PURE_PYTHON") == "1":
    _impl = _fallback
    BACKEND = "python"
else:
    try:
        from . import _core as _impl  # type: ignore[attr-defined]

        BACKEND = "compiled"
    except ImportError:
        _impl = _fallback
        BACKEND = "python"

grid_argmax = _impl.grid_argmax
hausdorff_directed_sq = _impl.hausdorff_directed_sq


@lru_cache(maxsize=8)
def theta_grid(size: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Uniform angle grid over (-pi, pi] with its sin/cos tables.

    The tables are shared by both backends so that the objective values,
    and therefore the argmax, are identical.
    """
    k = np.arange(1, size + 1, dtype=np.float64)
    angles = -math.pi + k * (2.0 * math.pi / size)
    tables = (angles, np.sin(angles), np.cos(angles))
    for t in tables:
        t.setflags(write=False)
    return tables
