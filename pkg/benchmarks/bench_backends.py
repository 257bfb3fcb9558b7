"""Benchmark the compiled pointwise kernels against the numpy fallback.

Times the eight hot kernels (Euler/MHD flux, wave speed, Lax-Friedrichs,
pressure scan) on batches of random admissible states, then times an
end-to-end right-hand-side evaluation and a short driver run with each
backend swapped in.  Also reports the maximum cross-backend deviation as
a parity check.

Usage:
    python benchmarks/bench_backends.py [--rows 65536] [--repeat 5]
"""

from __future__ import annotations

import argparse
import sys
import time

import numpy as np

from dgsiac import backends
from dgsiac.backends import py_kernels

try:
    from dgsiac.backends import _core
except ImportError:
    _core = None

_KERNEL_NAMES = ("euler_pressure", "euler_flux", "euler_speed", "euler_lf",
                 "mhd_pressure", "mhd_flux", "mhd_speed", "mhd_lf")


def random_states(rows: int, n_vars: int, rng: np.random.Generator):
    """Random admissible conserved states (positive density/pressure)."""
    u = np.empty((rows, n_vars))
    rho = rng.uniform(0.5, 3.0, rows)
    v1 = rng.uniform(-2.0, 2.0, rows)
    v2 = rng.uniform(-2.0, 2.0, rows)
    p = rng.uniform(0.5, 3.0, rows)
    gamma = 1.4
    u[:, 0] = rho
    u[:, 1] = rho * v1
    u[:, 2] = rho * v2
    if n_vars == 4:
        u[:, 3] = p / (gamma - 1.0) + 0.5 * rho * (v1**2 + v2**2)
    else:
        v3 = rng.uniform(-1.0, 1.0, rows)
        b = rng.uniform(-1.0, 1.0, (rows, 3))
        psi = rng.uniform(-0.5, 0.5, rows)
        u[:, 3] = rho * v3
        u[:, 4] = (p / (gamma - 1.0)
                   + 0.5 * rho * (v1**2 + v2**2 + v3**2)
                   + 0.5 * (b * b).sum(axis=1) + 0.5 * psi**2)
        u[:, 5:8] = b
        u[:, 8] = psi
    return u


def best_of(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_kernels(rows: int, repeat: int, inner: int):
    """Yield (name, python_s, cython_s, max_abs_diff) per kernel."""
    rng = np.random.default_rng(2024)
    u4 = random_states(rows, 4, rng)
    u4b = random_states(rows, 4, rng)
    u9 = random_states(rows, 9, rng)
    u9b = random_states(rows, 9, rng)
    gamma, ch = 1.4, 2.0
    calls = {
        "euler_pressure": lambda mod, out: mod.euler_pressure(u4, gamma, out),
        "euler_flux": lambda mod, out: mod.euler_flux(u4, gamma, 0, out),
        "euler_speed": lambda mod, out: mod.euler_speed(u4, gamma, 1, out),
        "euler_lf": lambda mod, out: mod.euler_lf(u4, u4b, gamma, 0, 0.0,
                                                  out),
        "mhd_pressure": lambda mod, out: mod.mhd_pressure(u9, gamma, out),
        "mhd_flux": lambda mod, out: mod.mhd_flux(u9, gamma, ch, 0, out),
        "mhd_speed": lambda mod, out: mod.mhd_speed(u9, gamma, ch, 1, out),
        "mhd_lf": lambda mod, out: mod.mhd_lf(u9, u9b, gamma, ch, 0, 0.0,
                                              out),
    }
    shapes = {
        "euler_pressure": (rows,), "euler_flux": (rows, 4),
        "euler_speed": (rows,), "euler_lf": (rows, 4),
        "mhd_pressure": (rows,), "mhd_flux": (rows, 9),
        "mhd_speed": (rows,), "mhd_lf": (rows, 9),
    }
    for name in _KERNEL_NAMES:
        out_py = np.empty(shapes[name])
        out_cy = np.empty(shapes[name])
        call = calls[name]

        def loop(mod, out):
            for _ in range(inner):
                call(mod, out)

        t_py = best_of(lambda: loop(py_kernels, out_py), repeat) / inner
        if _core is None:
            yield name, t_py, None, None
            continue
        t_cy = best_of(lambda: loop(_core, out_cy), repeat) / inner
        diff = float(np.max(np.abs(out_py - out_cy)))
        yield name, t_py, t_cy, diff


def swap_backend(module) -> dict:
    """Point the active backend at `module`; returns the previous mapping."""
    previous = {}
    for name in _KERNEL_NAMES:
        previous[name] = getattr(backends, name)
        setattr(backends, name, getattr(module, name))
    return previous


def restore_backend(previous: dict) -> None:
    for name, fn in previous.items():
        setattr(backends, name, fn)


def bench_end_to_end(repeat: int):
    """Time RHS evaluations and a short driver run with each backend."""
    from dgsiac.config import config_from_dict
    from dgsiac.driver import build_run_objects, run

    config = config_from_dict({
        "case": "convergence", "n": 7, "n_elem_x": 8, "n_elem_y": 8,
        "cfl": 0.1, "filter": {"enabled": False},
    })
    case, physics, mesh, ref, operator, _, _ = build_run_objects(config)
    x, y = mesh.node_coords(ref.nodes)
    u0 = case.initial_conserved(physics, x, y)

    def rhs_loop():
        for _ in range(20):
            operator.rhs(u0, 0.0)

    results = {}
    modules = [("python", py_kernels)]
    if _core is not None:
        modules.append(("cython", _core))
    for label, module in modules:
        previous = swap_backend(module)
        try:
            t_rhs = best_of(rhs_loop, repeat) / 20
            t0 = time.perf_counter()
            run(config)
            t_run = time.perf_counter() - t0
        finally:
            restore_backend(previous)
        results[label] = (t_rhs, t_run)
    return results


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--rows", type=int, default=65536,
                        help="states per kernel call (default 65536)")
    parser.add_argument("--repeat", type=int, default=5,
                        help="best-of repetitions (default 5)")
    parser.add_argument("--inner", type=int, default=4,
                        help="kernel calls per timing sample (default 4)")
    args = parser.parse_args(argv)

    print(f"active backend: {backends.BACKEND_NAME}")
    if _core is None:
        print("compiled extension not available; timing the numpy "
              "fallback only", file=sys.stderr)

    print(f"\npointwise kernels, {args.rows} states per call "
          f"(best of {args.repeat}):")
    header = (f"{'kernel':<16} {'numpy [us]':>12} {'cython [us]':>12} "
              f"{'speedup':>8} {'max |diff|':>11}")
    print(header)
    print("-" * len(header))
    for name, t_py, t_cy, diff in bench_kernels(args.rows, args.repeat,
                                                args.inner):
        if t_cy is None:
            print(f"{name:<16} {t_py * 1e6:>12.1f} {'-':>12} {'-':>8} "
                  f"{'-':>11}")
        else:
            print(f"{name:<16} {t_py * 1e6:>12.1f} {t_cy * 1e6:>12.1f} "
                  f"{t_py / t_cy:>7.2f}x {diff:>11.2e}")

    print("\nend-to-end (degree-7 smooth-wave case, 8x8 elements):")
    results = bench_end_to_end(args.repeat)
    for label, (t_rhs, t_run) in results.items():
        print(f"  {label:<7} rhs evaluation {t_rhs * 1e3:8.2f} ms   "
              f"full run {t_run:7.2f} s")
    if "python" in results and "cython" in results:
        spd_rhs = results["python"][0] / results["cython"][0]
        spd_run = results["python"][1] / results["cython"][1]
        print(f"  speedup rhs {spd_rhs:.2f}x, full run {spd_run:.2f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
