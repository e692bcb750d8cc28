"""Timing comparison of the compiled kernels against the numpy fallback.

Run from a checkout:

    python3 benchmarks/bench_kernels.py [--repeats N]

Both backends are bit-identical (asserted here before any timing), so
the only difference worth reporting is speed. When the extension was
not built, the script still runs and says so.
"""
import argparse
import time

import numpy as np

from eyehand._kernels import BACKEND, _fallback, theta_grid

try:
    from eyehand._kernels import _core
except ImportError:
    _core = None


def best_of(repeats, fn, *args):
    """Best wall time of `repeats` single calls, in seconds."""
    best = None
    for _ in range(repeats):
        start = time.perf_counter()
        fn(*args)
        elapsed = time.perf_counter() - start
        if best is None or elapsed < best:
            best = elapsed
    return best


def bench_grid_argmax(repeats, grid_size, n_pairs):
    _, sin_tab, cos_tab = theta_grid(grid_size)
    rng = np.random.default_rng(1)
    pairs = rng.normal(size=(n_pairs, 2))

    def run(impl):
        for a, b in pairs:
            impl.grid_argmax(a, b, sin_tab, cos_tab)

    for a, b in pairs[:32]:
        assert _core.grid_argmax(a, b, sin_tab, cos_tab) == _fallback.grid_argmax(
            a, b, sin_tab, cos_tab
        )
    compiled = best_of(repeats, run, _core) / n_pairs
    fallback = best_of(repeats, run, _fallback) / n_pairs
    return compiled, fallback


def bench_hausdorff(repeats, n_points):
    rng = np.random.default_rng(2)
    a = np.ascontiguousarray(rng.normal(size=(n_points, 3)) * 50.0)
    b = np.ascontiguousarray(rng.normal(size=(n_points, 3)) * 50.0)
    assert _core.hausdorff_directed_sq(a, b) == _fallback.hausdorff_directed_sq(a, b)
    compiled = best_of(repeats, _core.hausdorff_directed_sq, a, b)
    fallback = best_of(repeats, _fallback.hausdorff_directed_sq, a, b)
    return compiled, fallback


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    print(f"active backend: {BACKEND}")
    if _core is None:
        print("compiled extension not built; nothing to compare")
        return

    rows = []
    compiled, fallback = bench_grid_argmax(args.repeats, 4096, 2000)
    rows.append(("grid_argmax (4096 angles)", compiled, fallback))
    for n in (50, 500, 2000):
        compiled, fallback = bench_hausdorff(args.repeats, n)
        rows.append((f"hausdorff_directed_sq ({n}x{n})", compiled, fallback))

    width = max(len(r[0]) for r in rows)
    print(f"{'kernel':<{width}}  {'compiled':>12}  {'fallback':>12}  {'speedup':>8}")
    for name, compiled, fallback in rows:
        print(
            f"{name:<{width}}  {compiled * 1e6:>10.2f}us  {fallback * 1e6:>10.2f}us"
            f"  {fallback / compiled:>7.1f}x"
        )


if __name__ == "__main__":
    main()
