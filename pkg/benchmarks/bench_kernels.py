#!/usr/bin/env python3
"""Benchmark the compiled kernel core against the numpy/scipy fallback.

Times the three hot kernels plus the end-to-end extraction path on a
CAMUS-sized (700 x 1000) phantom. Run from a checkout with the package
installed:

    python benchmarks/bench_kernels.py [--repeats N]
"""

import argparse
import time

import numpy as np

from mvhinge import _kernels_py
from mvhinge.hinge import extract_contact_line, extract_hinge_points
from mvhinge.labelmap import LA, LV, LabelMap
from mvhinge.phantom import DEFAULT_SPEC, generate_phantom

try:
    from mvhinge import _kernels
except ImportError:
    _kernels = None


def best_of(fn, repeats):
    times = []
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return min(times)


def bench_backend(backend, grid, other, repeats):
    return {
        "contact_mask": best_of(lambda: backend.contact_mask(grid, LV, LA), repeats),
        "dice_counts": best_of(lambda: backend.dice_counts(grid, other, LV), repeats),
        "label_components(4)": best_of(
            lambda: backend.label_components(grid, LA, 4), repeats
        ),
        "label_components(8)": best_of(
            lambda: backend.label_components(grid, LA, 8), repeats
        ),
    }


def bench_pipeline(m: LabelMap, repeats):
    def run():
        cl = extract_contact_line(m)
        extract_hinge_points(cl, m.spacing)

    return best_of(run, repeats)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=9)
    args = parser.parse_args()

    m, _, _ = generate_phantom(DEFAULT_SPEC)
    grid = m.labels
    rng = np.random.default_rng(0)
    other = np.asarray(grid.copy())
    flips = rng.integers(0, grid.size, grid.size // 50)
    other.flat[flips] = rng.integers(0, 3, flips.size)

    backends = {"python": _kernels_py}
    if _kernels is not None:
        backends["cython"] = _kernels

    results = {
        name: bench_backend(be, grid, other, args.repeats)
        for name, be in backends.items()
    }

    kernels = list(next(iter(results.values())))
    width = max(len(k) for k in kernels) + 2
    header = f"{'kernel'.ljust(width)}" + "".join(
        f"{name:>12}" for name in results
    )
    if len(results) == 2:
        header += f"{'speedup':>10}"
    print(f"grid: {grid.shape[1]} x {grid.shape[0]} px")
    print(header)
    print("-" * len(header))
    for kernel in kernels:
        row = kernel.ljust(width)
        for name in results:
            row += f"{results[name][kernel] * 1e3:>10.2f}ms"
        if len(results) == 2:
            ratio = results["python"][kernel] / results["cython"][kernel]
            row += f"{ratio:>9.1f}x"
        print(row)

    pipeline = bench_pipeline(m, args.repeats)
    print(f"\nextract pipeline (selected backend): {pipeline * 1e3:.2f} ms/case")
    if _kernels is None:
        print("compiled kernels not built; python backend only")


if __name__ == "__main__":
    main()
