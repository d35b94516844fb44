#!/usr/bin/env python3
"""numba vs pure-numpy kernels, side by side.

Runs each hot kernel through both backends on the Fig. 3 wave
(alpha0=-20, lambda=4.39, eps=0.05), checks the outputs agree bit for bit,
and reports timings. With --end-to-end it also times a full portrait run in
a subprocess per backend (the env flag is read at import time).

    python benchmarks/bench_kernels.py [--repeat 5] [--end-to-end]
"""

import argparse
import os
import subprocess
import sys
import tempfile
import time

import numpy as np

from wavescope import kernels
from wavescope.portrait import HamiltonianField
from wavescope.wave_model import WaveParameters


def best_of(fn, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def same(a, b):
    if isinstance(a, tuple):
        return all(same(x, y) for x, y in zip(a, b))
    if isinstance(a, np.ndarray):
        return a.shape == b.shape and np.array_equal(a, b)
    return a == b


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--end-to-end", action="store_true")
    args = ap.parse_args()

    if kernels.hamiltonian_grid_numba is None:
        sys.exit("numba is not importable; nothing to compare")

    f = HamiltonianField(WaveParameters.create(-20.0, 4.39, 0.05))
    a = f.args
    xs = np.linspace(-np.pi, np.pi, 800)
    ys = np.linspace(0.0, f.y_top, 400)
    grid = kernels.hamiltonian_grid_numpy(*a, xs, ys)
    level = float(np.median(grid))
    stream = (np.pi, 0.75, 50.0, 1e-10, f.h_range, 1e-2, 0.25, 200_000, 1e-6, True)

    cases = [
        ("hamiltonian grid 800x400",
         lambda: kernels.hamiltonian_grid_numpy(*a, xs, ys),
         lambda: kernels.hamiltonian_grid_numba(*a, xs, ys)),
        ("speed grid 800x400",
         lambda: kernels.speed_grid_numpy(*a, xs, ys),
         lambda: kernels.speed_grid_numba(*a, xs, ys)),
        ("contour segments, one level",
         lambda: kernels.contour_segments_numpy(grid, level),
         lambda: kernels.contour_segments_numba(grid, level)),
        ("streamline, closed orbit",
         lambda: kernels.streamline_python(*a, *stream),
         lambda: kernels.streamline_numba(*a, *stream)),
    ]

    print("warming up the JIT ...")
    t0 = time.perf_counter()
    for _, _np_fn, nb_fn in cases:
        nb_fn()
    print(f"JIT warmup (or cache load): {time.perf_counter() - t0:.2f}s\n")

    print(f"{'kernel':<30}  {'numpy (s)':>10}  {'numba (s)':>10}  {'speedup':>8}  {'equal':>6}")
    print("-" * 72)
    for name, np_fn, nb_fn in cases:
        t_np, out_np = best_of(np_fn, args.repeat)
        t_nb, out_nb = best_of(nb_fn, args.repeat)
        eq = same(out_np, out_nb)
        print(f"{name:<30}  {t_np:>10.4f}  {t_nb:>10.4f}  {t_np / t_nb:>7.1f}x  {'yes' if eq else 'NO':>6}")

    if args.end_to_end:
        print("\nfull portrait (subprocess, includes import and JIT cache load)")
        for flag in ("0", "1"):
            env = dict(os.environ, WAVESCOPE_DISABLE_NUMBA=flag)
            tmp = tempfile.mkdtemp(prefix="wavescope_bench_")
            cmd = [sys.executable, "-m", "wavescope.cli", "portrait", "--alpha0", "-20", "--lambda", "4.39",
                   "--epsilon", "0.05", "--out", tmp, "--formats", "json"]
            t0 = time.perf_counter()
            subprocess.run(cmd, env=env, check=True, stdout=subprocess.DEVNULL)
            label = "numpy" if flag == "1" else "numba"
            print(f"  {label:<6} {time.perf_counter() - t0:.2f}s")


if __name__ == "__main__":
    main()
