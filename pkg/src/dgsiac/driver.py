"""Run orchestration: the step / clean / filter / blend time loop.

A run assembles the mesh, reference element, physics, DG operator, and
(optionally) the shock filter from a RunConfig, integrates to the final
time with adaptive CFL steps, applies the adaptive filter after every
completed step, writes scheduled snapshots and final slices, and returns
the final field plus an error report.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import output as out_io
from .cases import TestCase
from .config import RunConfig
from .diagnostics import (ErrorReport, conservation_error, linf_errors,
                          nodal_integral)
from .kernel import build_kernel
from .mesh import CartesianMesh
from .physics import IdealMHD2D, make_system
from .refelem import ReferenceElement
from .siacfilter import (AdaptiveFilterSettings, MultiElementFilter,
                         blend_parameter, build_multi_element_matrices,
                         filter_field_2d, indicator_field)
from .solver import DGOperator, SolverError, cfl_timestep, rk_step

# Keep a healthy margin to the exact final time so the last truncated step
# is never a denormal sliver.
_TIME_SNAP = 1e-12


@dataclass
class RunResult:
    """Everything a caller needs after a finished run."""

    config: RunConfig
    case: TestCase
    physics: object
    mesh: CartesianMesh
    ref: ReferenceElement
    u: np.ndarray
    t: float
    steps: int
    lam: np.ndarray
    sigma: np.ndarray
    eps_indicator: np.ndarray
    report: ErrorReport
    written_files: list = field(default_factory=list)


def build_run_objects(config: RunConfig):
    """Instantiate case, physics, mesh, reference element, operator, filter.

    Returns:
        (case, physics, mesh, ref, operator, filt, settings); the last two
        are None when the filter is disabled.
    """
    case = config.test_case()
    physics = make_system(case.system, case.gamma)
    physics.tolerate_transient_pressure = (config.admissibility == "post-step")
    mesh = CartesianMesh(case.x_bounds, case.y_bounds,
                         config.n_elem_x, config.n_elem_y)
    ref = ReferenceElement(config.n)
    bcset = case.make_bcs(physics)
    operator = DGOperator(mesh, ref, physics, bcset)
    filt = None
    settings = None
    if config.filter.enabled:
        eps = config.filter.resolve_epsilon(config.n)
        kernel = build_kernel(config.filter.m, config.filter.k, epsilon=eps)
        filt = build_multi_element_matrices(ref, kernel)
        settings = AdaptiveFilterSettings(
            sigma_min=config.filter.sigma_min,
            sigma_max=config.filter.sigma_max,
            indicator_variable=config.filter.indicator,
            mode=config.filter.mode,
            lambda_formula=config.filter.lambda_formula,
        )
    return case, physics, mesh, ref, operator, filt, settings


def filter_and_blend(u: np.ndarray, t: float, physics, mesh, ref, bcset,
                     filt: MultiElementFilter,
                     settings: AdaptiveFilterSettings):
    """One filter application with per-element convex blending.

    Returns:
        (u_blended, lam, sigma, eps) with per-element arrays of the blend
        weight, the log indicator, and the raw indicator deviation.
    """
    u_filt = filter_field_2d(filt, u, mesh, bcset, t)
    w = physics.indicator_values(u, settings.indicator_variable, check=False)
    w_f = physics.indicator_values(u_filt, settings.indicator_variable,
                                   check=False)
    eps, sigma = indicator_field(w, w_f)
    if settings.mode == "always-on":
        lam = np.ones(mesh.n_elem)
    else:
        lam = blend_parameter(sigma, settings)
    lam4 = lam[:, None, None, None]
    return lam4 * u_filt + (1.0 - lam4) * u, lam, sigma, eps


def _final_report(case, config, physics, mesh, ref, u, u_initial,
                  t: float) -> ErrorReport:
    report = ErrorReport(n_elem_x=config.n_elem_x, n_elem_y=config.n_elem_y)
    if case.exact_primitive is not None:
        X, Y = mesh.node_coords(ref.nodes)
        u_exact = case.exact_conserved(physics, X, Y, t)
        errs = linf_errors(u, u_exact)
        for v, name in enumerate(physics.var_names):
            report.linf[name] = float(errs[v])
        for v, name in enumerate(physics.var_names):
            report.conservation[name] = conservation_error(
                u, mesh, ref, variable=v,
                exact=lambda x, y, v=v: case.exact_conserved(
                    physics, x, y, t)[..., v])
    else:
        for v, name in enumerate(physics.var_names):
            report.conservation[name] = conservation_error(
                u, mesh, ref, variable=v, u_ref=u_initial)
    return report


def run(config: RunConfig,
        progress: Optional[Callable] = None) -> RunResult:
    """Integrate one configured benchmark run to its final time.

    Args:
        config: validated run configuration.
        progress: optional callable (step, t, dt) invoked after each step.

    Raises:
        SolverError: non-finite states or zero wave speeds, annotated with
            the step count and time.
        AdmissibilityError: negative density/pressure, with element and
            node context from the operator.
    """
    case, physics, mesh, ref, operator, filt, settings = \
        build_run_objects(config)
    bcset = operator.bcs
    X, Y = mesh.node_coords(ref.nodes)
    u = case.initial_conserved(physics, X, Y)
    u_initial = u.copy()
    lam = np.zeros(mesh.n_elem)
    sigma = np.full(mesh.n_elem, -np.inf)
    eps_ind = np.zeros(mesh.n_elem)

    is_mhd = isinstance(physics, IdealMHD2D)
    written = []
    out_cfg = config.output
    want_vtk = out_cfg.write_vtk
    want_slices = bool(out_cfg.slices)
    if want_vtk or want_slices:
        os.makedirs(out_cfg.directory, exist_ok=True)

    snap_index = 0

    def snapshot(u_now, t_now, lam_now):
        nonlocal snap_index
        path = os.path.join(out_cfg.directory,
                            f"{case.name}_{snap_index:04d}.vtk")
        out_io.write_vtk_snapshot(path, u_now, mesh, ref, physics,
                                  lam=lam_now,
                                  title=f"{case.name} t={t_now:.10e}")
        written.append(path)
        snap_index += 1

    t = 0.0
    steps = 0
    t_final = config.final_time

    if t_final == 0.0 and filt is not None:
        # Zero-step run: a single filter application defines the output.
        u, lam, sigma, eps_ind = filter_and_blend(
            u, t, physics, mesh, ref, bcset, filt, settings)

    if want_vtk:
        snapshot(u, t, lam)
    next_snap = (out_cfg.snapshot_interval
                 if out_cfg.snapshot_interval > 0 else np.inf)

    while t < t_final - _TIME_SNAP:
        if is_mhd:
            physics.glm_source_and_speed(u, 0.0)  # refresh cleaning speed
        try:
            dt = cfl_timestep(u, mesh, ref, physics, config.cfl)
        except SolverError as exc:
            raise SolverError(f"step {steps + 1} at t={t:.6e}: {exc}") \
                from None
        if t + dt > t_final:
            dt = t_final - t
        damp = 1.0
        if is_mhd:
            _, damp = physics.glm_source_and_speed(u, dt)
        try:
            u = rk_step(u, t, dt, operator.rhs)
        except SolverError as exc:
            raise SolverError(f"step {steps + 1} at t={t:.6e}: {exc}") \
                from None
        if is_mhd and damp != 1.0:
            u[..., physics.psi_index] *= damp
        t += dt
        steps += 1
        if filt is not None:
            u, lam, sigma, eps_ind = filter_and_blend(
                u, t, physics, mesh, ref, bcset, filt, settings)
        if physics.tolerate_transient_pressure:
            # Flux evaluations inside the step tolerated pressure dips;
            # completed steps must still carry positive density (finiteness
            # is already enforced stage-by-stage).  Pressure dips decay by
            # later filtered steps and are checked where a criterion
            # demands them, not here.
            rho_min = float(u[..., 0].min())
            if rho_min <= 0.0:
                from .physics import AdmissibilityError
                raise AdmissibilityError(
                    rho_min, float(physics.pressure(u, check=False).min()),
                    context=f"completed step {steps} state at t={t:.6e}")
        if want_vtk and t >= next_snap - _TIME_SNAP:
            snapshot(u, t, lam)
            next_snap += out_cfg.snapshot_interval
        if progress is not None:
            progress(steps, t, dt)

    t = t_final if steps else t
    if want_vtk and steps > 0:
        snapshot(u, t, lam)
    if want_slices:
        for sl in out_cfg.slices:
            if sl["kind"] == "diagonal":
                label = sl.get("name", "diagonal")
                coords, values = out_io.diagonal_slice(
                    u[..., 0], mesh, ref, out_cfg.slice_samples)
            else:
                label = sl.get("name", f"y{sl['y']:g}")
                coords, values = out_io.horizontal_slice(
                    u[..., 0], mesh, ref, sl["y"], out_cfg.slice_samples)
            path = os.path.join(out_cfg.directory,
                                f"{case.name}_slice_{label}.csv")
            out_io.write_slice_csv(path, coords, values, value_label="rho")
            written.append(path)

    report = _final_report(case, config, physics, mesh, ref, u, u_initial, t)
    return RunResult(config=config, case=case, physics=physics, mesh=mesh,
                     ref=ref, u=u, t=t, steps=steps, lam=lam, sigma=sigma,
                     eps_indicator=eps_ind, report=report,
                     written_files=written)
