"""Benchmark the numba kernels against the pure-numpy fallbacks.

Run from the repo root:

    python benchmarks/bench_kernels.py

Both backends consume identical pre-drawn variates, so besides timing them
this script asserts that their outputs agree to near machine precision.
"""

from __future__ import annotations

import time

import numpy as np

from collapse_lab import _kernels
from collapse_lab.ensemble import draw_traj_variates


def timeit(fn, *args, repeat=3):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def bench_traj():
    rng = np.random.default_rng(0)
    n_lev, n_traj, n_steps = 16, 2000, 50
    energies = np.sort(rng.uniform(0, 5, n_lev))
    log_w0 = np.log(rng.dirichlet(np.ones(n_lev))) / 2.0
    dts = np.full(n_steps, 0.1)
    uniforms, normals = draw_traj_variates(123, n_traj, n_steps)
    args = (energies, log_w0, 1.0, dts, uniforms, normals)

    t_np, (w_np, b_np) = timeit(_kernels.traj_collapse_paths_numpy, *args)
    if _kernels.NUMBA_ENABLED:
        _kernels.traj_collapse_paths(*args)  # compile before timing
        t_nb, (w_nb, b_nb) = timeit(_kernels.traj_collapse_paths, *args)
        assert np.allclose(w_np, w_nb, atol=1e-12)
        assert np.allclose(b_np, b_nb, atol=1e-9)
    else:
        t_nb = float("nan")
    print(f"traj_collapse_paths  ({n_traj} traj x {n_steps} steps x {n_lev} levels)")
    print(f"  numpy: {t_np * 1e3:8.1f} ms    numba: {t_nb * 1e3:8.1f} ms")


def bench_kgrid():
    n_k, n_steps = 4096, 2000
    k = np.linspace(-39.0, 41.0, n_k)
    wk = np.full(n_k, k[1] - k[0])
    wk[0] = wk[-1] = 0.5 * (k[1] - k[0])
    alpha0 = np.zeros(n_k, complex)
    args = (k, wk, (1.0 / (2 * np.pi)) ** 0.5, 1.0, 0.0, 1.0 + 0.0j,
            alpha0, 5e-4, n_steps, 100)

    t_np, res_np = timeit(_kernels.kgrid_rk4_numpy, *args)
    if _kernels.NUMBA_ENABLED:
        _kernels.kgrid_rk4(*args)  # compile before timing
        t_nb, res_nb = timeit(_kernels.kgrid_rk4, *args)
        assert np.allclose(res_np[1], res_nb[1], atol=1e-12)
        assert np.allclose(res_np[3], res_nb[3], atol=1e-12)
    else:
        t_nb = float("nan")
    print(f"kgrid_rk4            ({n_k} modes x {n_steps} steps)")
    print(f"  numpy: {t_np * 1e3:8.1f} ms    numba: {t_nb * 1e3:8.1f} ms")


if __name__ == "__main__":
    print(f"numba enabled: {_kernels.NUMBA_ENABLED}")
    bench_traj()
    bench_kgrid()
