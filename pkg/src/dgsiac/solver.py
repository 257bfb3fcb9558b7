"""Strong-form DGSEM semi-discrete operator and low-storage RK integration.

The semi-discrete update of each element combines a collocation
divergence (differentiation matrix applied to nodal fluxes) with boundary
lifting of the difference between the single-valued interface flux and
the interior flux trace, weighted by the endpoint quadrature weights:

    J du/dt = -[ lift_x(f* - f~) + D f~ + lift_y(g* - g~) + g~ D^T ]

with f~ = (dy/2) f, g~ = (dx/2) g and J = dx dy / 4.  Every interface
flux is computed exactly once per face, so the two adjacent elements see
bit-identical values and the scheme telescopes to discrete conservation.
"""

from __future__ import annotations

import numpy as np

from . import bcs as bcmod
from .physics import AdmissibilityError


class SolverError(Exception):
    """Raised for non-finite states, empty wave speeds, or bad setups."""


#: Low-storage five-stage fourth-order Runge-Kutta coefficients
#: (Carpenter-Kennedy set; exact rationals).
RK_A = np.array([
    0.0,
    -567301805773.0 / 1357537059087.0,
    -2404267990393.0 / 2016746695238.0,
    -3550918686646.0 / 2091501179385.0,
    -1275806237668.0 / 842570457699.0,
])
RK_B = np.array([
    1432997174477.0 / 9575080441755.0,
    5161836677717.0 / 13612068292357.0,
    1720146321549.0 / 2090206949498.0,
    3134564353537.0 / 4481467310338.0,
    2277821191437.0 / 14882151754819.0,
])
RK_C = np.array([
    0.0,
    1432997174477.0 / 9575080441755.0,
    2526269341429.0 / 6820363962896.0,
    2006345519317.0 / 3224310063776.0,
    2802321613138.0 / 2924317926251.0,
])


class SolutionField:
    """Nodal conserved-variable storage over the mesh.

    Attributes:
        u: array of shape (n_elem, N+1, N+1, n_vars); index order is
            (element, x node, y node, variable).
    """

    def __init__(self, mesh, ref, physics, u: np.ndarray | None = None):
        self.mesh = mesh
        self.ref = ref
        self.physics = physics
        shape = (mesh.n_elem, ref.n_nodes, ref.n_nodes, physics.n_vars)
        if u is None:
            u = np.zeros(shape)
        u = np.asarray(u, dtype=float)
        if u.shape != shape:
            raise SolverError(f"field shape {u.shape} does not match {shape}")
        self.u = u

    def copy(self) -> "SolutionField":
        return SolutionField(self.mesh, self.ref, self.physics, self.u.copy())

    def node_coords(self):
        return self.mesh.node_coords(self.ref.nodes)


def apply_boundary_trace(bc, interior: np.ndarray, coords, t: float,
                         physics, axis: int) -> np.ndarray:
    """Exterior trace seen across a physical boundary face.

    Args:
        bc: the face's condition (not Periodic).
        interior: interior trace values, shape (..., n_vars).
        coords: (x, y) arrays broadcastable to the trace's node shape.
        axis: 0 for a vertical face (x normal), 1 for horizontal.

    Returns:
        exterior trace of the same shape: the prescribed state for
        Dirichlet, a copy for outflow, the mirrored state for a
        reflecting wall, or the pointwise dispatch for a switched
        condition.
    """
    x, y = coords
    if isinstance(bc, bcmod.Dirichlet):
        return np.asarray(bc.state(x, y, t), dtype=float)
    if isinstance(bc, bcmod.Outflow):
        return np.array(interior, copy=True)
    if isinstance(bc, bcmod.Reflecting):
        return physics.mirror(interior, axis)
    if isinstance(bc, bcmod.SwitchedBC):
        mask = np.asarray(bc.predicate(x, y, t), dtype=bool)
        val_true = apply_boundary_trace(bc.bc_true, interior, coords, t,
                                        physics, axis)
        val_false = apply_boundary_trace(bc.bc_false, interior, coords, t,
                                         physics, axis)
        return np.where(mask[..., None], val_true, val_false)
    raise SolverError(f"no exterior trace rule for {bc!r}")


class DGOperator:
    """Precomputed face topology and scalings for dg_rhs on one setup."""

    def __init__(self, mesh, ref, physics, bcset, lf_mode: str = "local"):
        if lf_mode not in ("local", "global"):
            raise SolverError(f"unknown Lax-Friedrichs mode {lf_mode!r}")
        self.mesh = mesh
        self.ref = ref
        self.physics = physics
        self.bcs = bcset
        self.lf_mode = lf_mode
        p = ref.n_nodes
        self._build_faces_x()
        self._build_faces_y()
        # Face-node physical coordinates for boundary traces.
        iy = np.arange(mesh.n_elem_y)
        ix = np.arange(mesh.n_elem_x)
        self._y_along = mesh.map_y(iy[:, None], ref.nodes[None, :])  # (ny, p)
        self._x_along = mesh.map_x(ix[:, None], ref.nodes[None, :])  # (nx, p)
        self._w0 = ref.weights[0]
        self._wN = ref.weights[-1]
        self._p = p

    def _build_faces_x(self):
        """Vertical faces (x-direction normals), row by row."""
        mesh = self.mesh
        nx, ny = mesh.n_elem_x, mesh.n_elem_y
        periodic = self.bcs.periodic_x
        elem = np.arange(mesh.n_elem).reshape(ny, nx)
        if periodic:
            # Face f of row iy sits on the left edge of element (iy, f).
            el_right = elem
            el_left = np.roll(elem, 1, axis=1)
            self.fx_left = el_left.ravel()
            self.fx_right = el_right.ravel()
            self.fx_bound_left = np.array([], dtype=int)
            self.fx_bound_right = np.array([], dtype=int)
        else:
            el_left = np.concatenate(
                [np.full((ny, 1), -1, dtype=int), elem], axis=1)
            el_right = np.concatenate(
                [elem, np.full((ny, 1), -1, dtype=int)], axis=1)
            self.fx_left = el_left.ravel()
            self.fx_right = el_right.ravel()
            self.fx_bound_left = np.nonzero(self.fx_left < 0)[0]
            self.fx_bound_right = np.nonzero(self.fx_right < 0)[0]
        self.fx_row = np.repeat(np.arange(ny), len(self.fx_left) // ny)
        self.fx_has_left = np.nonzero(self.fx_left >= 0)[0]
        self.fx_has_right = np.nonzero(self.fx_right >= 0)[0]

    def _build_faces_y(self):
        """Horizontal faces (y-direction normals), column by column."""
        mesh = self.mesh
        nx, ny = mesh.n_elem_x, mesh.n_elem_y
        periodic = self.bcs.periodic_y
        elem = np.arange(mesh.n_elem).reshape(ny, nx)
        if periodic:
            el_down = np.roll(elem, 1, axis=0)
            el_up = elem
            self.fy_down = el_down.ravel()
            self.fy_up = el_up.ravel()
            self.fy_bound_down = np.array([], dtype=int)
            self.fy_bound_up = np.array([], dtype=int)
        else:
            el_down = np.concatenate(
                [np.full((1, nx), -1, dtype=int), elem], axis=0)
            el_up = np.concatenate(
                [elem, np.full((1, nx), -1, dtype=int)], axis=0)
            self.fy_down = el_down.ravel()
            self.fy_up = el_up.ravel()
            self.fy_bound_down = np.nonzero(self.fy_down < 0)[0]
            self.fy_bound_up = np.nonzero(self.fy_up < 0)[0]
        self.fy_col = np.tile(np.arange(nx), len(self.fy_down) // nx)
        self.fy_has_down = np.nonzero(self.fy_down >= 0)[0]
        self.fy_has_up = np.nonzero(self.fy_up >= 0)[0]

    # ------------------------------------------------------------------
    def _locate(self, flat_index: int) -> str:
        p = self._p
        e = flat_index // (p * p)
        rest = flat_index % (p * p)
        return (f"element {e} (column {int(self.mesh.element_column(e))}, "
                f"row {int(self.mesh.element_row(e))}), "
                f"node ({rest // p}, {rest % p})")

    def rhs(self, u: np.ndarray, t: float) -> np.ndarray:
        """Semi-discrete time derivative of the nodal field."""
        mesh, ref, physics = self.mesh, self.ref, self.physics
        p = self._p
        n_elem, _, _, nv = u.shape
        fixed_lam = 0.0
        if self.lf_mode == "global":
            sx = physics.max_wave_speed(u, 0, context="global dissipation scan")
            sy = physics.max_wave_speed(u, 1, context="global dissipation scan")
            fixed_lam = float(max(sx.max(), sy.max()))

        try:
            f_vol = physics.flux(u, 0, context="volume flux x")
            g_vol = physics.flux(u, 1, context="volume flux y")
        except AdmissibilityError as err:
            raise AdmissibilityError(
                err.rho_min, err.p_min, err.flat_index,
                f"{err.context} at {self._locate(err.flat_index)}") from None

        # Volume contraction: D along the x node index, then the y index.
        rhs = np.matmul(ref.diff, f_vol.reshape(n_elem, p, p * nv))
        rhs = rhs.reshape(u.shape) * (-2.0 / mesh.dx)
        rhs -= (2.0 / mesh.dy) * np.matmul(
            ref.diff, g_vol.reshape(n_elem * p, p, nv)).reshape(u.shape)

        # --- x faces ---------------------------------------------------
        uL = u[np.maximum(self.fx_left, 0), p - 1, :, :]
        uR = u[np.maximum(self.fx_right, 0), 0, :, :]
        if self.fx_bound_left.size:
            rows = self.fx_row[self.fx_bound_left]
            coords = (np.full((rows.size, p), mesh.x_min), self._y_along[rows])
            uL[self.fx_bound_left] = apply_boundary_trace(
                self.bcs.left, uR[self.fx_bound_left], coords, t, physics, 0)
        if self.fx_bound_right.size:
            rows = self.fx_row[self.fx_bound_right]
            coords = (np.full((rows.size, p), mesh.x_max), self._y_along[rows])
            uR[self.fx_bound_right] = apply_boundary_trace(
                self.bcs.right, uL[self.fx_bound_right], coords, t, physics, 0)
        try:
            fstar = physics.lax_friedrichs(uL, uR, 0, fixed_lam,
                                           context="x-face flux")
        except AdmissibilityError as err:
            face = err.flat_index // p
            raise AdmissibilityError(
                err.rho_min, err.p_min, err.flat_index,
                f"{err.context} at x-face {face}, node {err.flat_index % p}"
            ) from None
        take = self.fx_has_left
        el = self.fx_left[take]
        rhs[el, p - 1, :, :] -= (2.0 / (mesh.dx * self._wN)) * (
            fstar[take] - f_vol[el, p - 1, :, :])
        take = self.fx_has_right
        el = self.fx_right[take]
        rhs[el, 0, :, :] += (2.0 / (mesh.dx * self._w0)) * (
            fstar[take] - f_vol[el, 0, :, :])

        # --- y faces ---------------------------------------------------
        uD = u[np.maximum(self.fy_down, 0), :, p - 1, :]
        uU = u[np.maximum(self.fy_up, 0), :, 0, :]
        if self.fy_bound_down.size:
            cols = self.fy_col[self.fy_bound_down]
            coords = (self._x_along[cols], np.full((cols.size, p), mesh.y_min))
            uD[self.fy_bound_down] = apply_boundary_trace(
                self.bcs.bottom, uU[self.fy_bound_down], coords, t, physics, 1)
        if self.fy_bound_up.size:
            cols = self.fy_col[self.fy_bound_up]
            coords = (self._x_along[cols], np.full((cols.size, p), mesh.y_max))
            uU[self.fy_bound_up] = apply_boundary_trace(
                self.bcs.top, uD[self.fy_bound_up], coords, t, physics, 1)
        try:
            gstar = physics.lax_friedrichs(uD, uU, 1, fixed_lam,
                                           context="y-face flux")
        except AdmissibilityError as err:
            face = err.flat_index // p
            raise AdmissibilityError(
                err.rho_min, err.p_min, err.flat_index,
                f"{err.context} at y-face {face}, node {err.flat_index % p}"
            ) from None
        take = self.fy_has_down
        el = self.fy_down[take]
        rhs[el, :, p - 1, :] -= (2.0 / (mesh.dy * self._wN)) * (
            gstar[take] - g_vol[el, :, p - 1, :])
        take = self.fy_has_up
        el = self.fy_up[take]
        rhs[el, :, 0, :] += (2.0 / (mesh.dy * self._w0)) * (
            gstar[take] - g_vol[el, :, 0, :])
        return rhs


def cfl_timestep(u: np.ndarray, mesh, ref, physics, cfl: float) -> float:
    """Explicit step size cfl * min(dx, dy) / (lambda_max (2N + 1)).

    lambda_max is the grid-maximal directional wave speed.

    Raises:
        SolverError: lambda_max = 0 (static field has no time scale).
    """
    if cfl <= 0.0:
        raise SolverError(f"CFL number must be positive, got {cfl!r}")
    sx = physics.max_wave_speed(u, 0, context="time-step scan")
    sy = physics.max_wave_speed(u, 1, context="time-step scan")
    lam = float(max(sx.max(), sy.max()))
    if lam <= 0.0:
        raise SolverError("maximal wave speed is zero; no admissible "
                          "explicit time step exists for a static field")
    return cfl * min(mesh.dx, mesh.dy) / (lam * (2 * ref.N + 1))


def rk_step(u: np.ndarray, t: float, dt: float, rhs) -> np.ndarray:
    """One five-stage fourth-order low-storage Runge-Kutta step.

    Args:
        u: current state (not modified).
        rhs: callable (state, stage_time) -> time derivative.

    Raises:
        SolverError: non-finite values after any stage (reports the stage).
    """
    if dt <= 0.0:
        raise SolverError(f"time step must be positive, got {dt!r}")
    unew = u.copy()
    k = np.zeros_like(u)
    for stage in range(5):
        k *= RK_A[stage]
        k += dt * rhs(unew, t + RK_C[stage] * dt)
        unew += RK_B[stage] * k
        if not np.isfinite(unew).all():
            raise SolverError(
                f"non-finite state after Runge-Kutta stage {stage + 1}/5 "
                f"at t={t:.6e}, dt={dt:.3e}")
    return unew
