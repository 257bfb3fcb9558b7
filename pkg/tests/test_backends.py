"""Compiled-extension vs pure-Python kernel parity and backend selection."""

from __future__ import annotations

import os
import subprocess
import sys

import numpy as np
import numpy.testing as npt
import pytest

from dgsiac import backends
from dgsiac.backends import py_kernels

cython_core = pytest.importorskip(
    "dgsiac.backends._core",
    reason="compiled extension not built; parity has nothing to compare")

RTOL = 1e-13


def random_euler(rng, m=200):
    rho = rng.uniform(0.1, 5.0, m)
    v1 = rng.uniform(-3.0, 3.0, m)
    v2 = rng.uniform(-3.0, 3.0, m)
    p = rng.uniform(0.01, 10.0, m)
    gamma = 1.4
    u = np.empty((m, 4))
    u[:, 0] = rho
    u[:, 1] = rho * v1
    u[:, 2] = rho * v2
    u[:, 3] = p / (gamma - 1.0) + 0.5 * rho * (v1 ** 2 + v2 ** 2)
    return np.ascontiguousarray(u), gamma


def random_mhd(rng, m=200):
    gamma = 5.0 / 3.0
    rho = rng.uniform(0.1, 5.0, m)
    v = rng.uniform(-2.0, 2.0, (m, 3))
    p = rng.uniform(0.01, 5.0, m)
    B = rng.uniform(-1.5, 1.5, (m, 3))
    psi = rng.uniform(-0.5, 0.5, m)
    u = np.empty((m, 9))
    u[:, 0] = rho
    u[:, 1:4] = rho[:, None] * v
    u[:, 4] = (p / (gamma - 1.0) + 0.5 * rho * (v ** 2).sum(axis=1)
               + 0.5 * (B ** 2).sum(axis=1))
    u[:, 5:8] = B
    u[:, 8] = psi
    return np.ascontiguousarray(u), gamma


def check_pair(py_fn, cy_fn, arrays, scalars, n_vars, speed=False):
    """Run both backends on identical inputs, compare output and minima."""
    m = arrays[0].shape[0]
    shape = (m,) if speed else (m, n_vars)
    out_py = np.empty(shape)
    out_cy = np.empty(shape)
    mins_py = py_fn(*arrays, *scalars, out_py)
    mins_cy = cy_fn(*arrays, *scalars, out_cy)
    npt.assert_allclose(out_cy, out_py, rtol=RTOL, atol=1e-15)
    npt.assert_allclose(mins_cy, mins_py, rtol=RTOL)


@pytest.mark.parametrize("axis", [0, 1])
def test_euler_kernel_parity(axis):
    rng = np.random.default_rng(100 + axis)
    u, gamma = random_euler(rng)
    uR, _ = random_euler(rng)
    check_pair(py_kernels.euler_flux, cython_core.euler_flux,
               (u,), (gamma, axis), 4)
    check_pair(py_kernels.euler_speed, cython_core.euler_speed,
               (u,), (gamma, axis), 4, speed=True)
    check_pair(py_kernels.euler_lf, cython_core.euler_lf,
               (u, uR), (gamma, axis, -1.0), 4)
    check_pair(py_kernels.euler_lf, cython_core.euler_lf,
               (u, uR), (gamma, axis, 2.75), 4)


def test_euler_pressure_parity():
    rng = np.random.default_rng(102)
    u, gamma = random_euler(rng)
    check_pair(py_kernels.euler_pressure, cython_core.euler_pressure,
               (u,), (gamma,), 4, speed=True)


@pytest.mark.parametrize("axis", [0, 1])
@pytest.mark.parametrize("ch", [0.0, 1.7])
def test_mhd_kernel_parity(axis, ch):
    rng = np.random.default_rng(200 + axis)
    u, gamma = random_mhd(rng)
    uR, _ = random_mhd(rng)
    check_pair(py_kernels.mhd_flux, cython_core.mhd_flux,
               (u,), (gamma, ch, axis), 9)
    check_pair(py_kernels.mhd_speed, cython_core.mhd_speed,
               (u,), (gamma, ch, axis), 9, speed=True)
    check_pair(py_kernels.mhd_lf, cython_core.mhd_lf,
               (u, uR), (gamma, ch, axis, -1.0), 9)


def test_mhd_pressure_parity():
    rng = np.random.default_rng(202)
    u, gamma = random_mhd(rng)
    check_pair(py_kernels.mhd_pressure, cython_core.mhd_pressure,
               (u,), (gamma,), 9, speed=True)


def test_parity_through_pressure_dip():
    """Both backends use the |p| speed estimate on transiently negative
    pressures, so they must agree there too."""
    u, gamma = random_euler(np.random.default_rng(3), m=8)
    u[3, 3] = 0.0  # forces p < 0 at one state
    out_py = np.empty(8)
    out_cy = np.empty(8)
    mins_py = py_kernels.euler_speed(u, gamma, 0, out_py)
    mins_cy = cython_core.euler_speed(u, gamma, 0, out_cy)
    assert mins_py[1] < 0.0
    npt.assert_allclose(out_cy, out_py, rtol=RTOL)
    npt.assert_allclose(mins_cy, mins_py, rtol=RTOL)
    assert np.isfinite(out_py).all()


def test_rhs_parity_between_backends(monkeypatch):
    """The full DG spatial operator agrees between backends on a shocked
    state (swap the kernel bindings the physics module dispatches to)."""
    from dgsiac.cases import get_case
    from dgsiac.mesh import CartesianMesh
    from dgsiac.physics import make_system
    from dgsiac.refelem import ReferenceElement
    from dgsiac.solver import DGOperator

    case = get_case("riemann17")
    sys = make_system(case.system, case.gamma)
    mesh = CartesianMesh(case.x_bounds, case.y_bounds, 6, 6)
    ref = ReferenceElement(4)
    X, Y = mesh.node_coords(ref.nodes)
    u = case.initial_conserved(sys, X, Y)
    op = DGOperator(mesh, ref, sys, case.make_bcs(sys))
    rhs_cy = op.rhs(u, 0.0)

    for name in ("euler_flux", "euler_speed", "euler_lf", "euler_pressure"):
        monkeypatch.setattr(backends, name, getattr(py_kernels, name))
    rhs_py = op.rhs(u, 0.0)
    scale = np.abs(rhs_cy).max()
    npt.assert_allclose(rhs_py, rhs_cy, rtol=1e-13, atol=1e-12 * scale)


def run_subprocess(env_value):
    env = dict(os.environ)
    if env_value is None:
        env.pop("DGSIAC_BACKEND", None)
    else:
        env["DGSIAC_BACKEND"] = env_value
    return subprocess.run(
        [sys.executable, "-c",
         "from dgsiac.backends import BACKEND_NAME; print(BACKEND_NAME)"],
        capture_output=True, text=True, env=env)


def test_env_var_selects_python():
    proc = run_subprocess("python")
    assert proc.returncode == 0, proc.stderr
    assert proc.stdout.strip() == "python"


def test_env_var_selects_cython():
    proc = run_subprocess("cython")
    assert proc.returncode == 0, proc.stderr
    assert proc.stdout.strip() == "cython"


def test_default_prefers_cython():
    proc = run_subprocess(None)
    assert proc.returncode == 0, proc.stderr
    assert proc.stdout.strip() == "cython"


def test_env_var_rejects_unknown():
    proc = run_subprocess("fortran")
    assert proc.returncode != 0
    assert "ImportError" in proc.stderr or "unknown DGSIAC_BACKEND" \
        in proc.stderr


def test_active_backend_exports():
    for name in ("euler_flux", "euler_speed", "euler_lf", "euler_pressure",
                 "mhd_flux", "mhd_speed", "mhd_lf", "mhd_pressure"):
        assert callable(getattr(backends, name))
    assert backends.BACKEND_NAME in ("cython", "python")
