"""Smoothing filter built on the polynomial delta kernel.

Assembles the per-element filter matrices (a center block plus one block
per side neighbor), applies the 2D tensor-product filter dimension by
dimension with ghost-element closure at physical boundaries, and provides
the shock indicator and the convex blending between filtered and
unfiltered element solutions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import bcs as bcmod
from .kernel import DeltaKernel, delta_eval
from .refelem import ReferenceElement, lagrange_basis_matrix, lgl_nodes_weights


class FilterError(Exception):
    """Raised for invalid filter configuration or failed assembly checks."""


#: Build-time bound on the multi-element row-sum defect (constant
#: reproduction: unit-mass kernel times a partition of unity).
ROW_SUM_TOL = 1e-10


def quad_point_count(kernel: DeltaKernel, N: int) -> int:
    """Number of LGL points used per integration subinterval.

    The base count n_star + 1 comes from the kernel's quadrature parameter
    n_star = 2(ceil(m/2) + k + 1).  The integrand of a filter-matrix entry
    is a degree N + m + 2k + 2 polynomial on each subinterval; a q-point
    LGL rule is exact through degree 2q - 3, so the count is raised when
    the base rule would fall short (only possible for even m at extreme N).
    """
    required_degree = N + kernel.degree
    by_exactness = -(-(required_degree + 3) // 2)
    return max(kernel.n_star + 1, by_exactness)


def build_single_element_matrix(ref: ReferenceElement,
                                kernel: DeltaKernel) -> np.ndarray:
    """Filter matrix of a lone element, stencils unclipped.

    Entry (i, j) = eps * sum_nu w_nu psi_j(eps x_nu + xi_i) delta(eps x_nu)
    over the full stencil [xi_i - eps, xi_i + eps]; the basis is evaluated
    through its product form wherever the stencil pokes outside [-1, 1]
    (the caller is responsible for that extension making sense).  Used for
    single-domain tests and as the interior-row cross-check of the
    multi-element blocks.
    """
    if kernel.epsilon is None:
        raise FilterError("kernel has no support half-width set")
    n_q = quad_point_count(kernel, ref.N)
    qx, qw = lgl_nodes_weights(n_q - 1)
    p_vals = kernel.eval_p(qx)           # eps * delta(eps x_nu) = P(x_nu)
    n = ref.n_nodes
    phi = np.empty((n, n))
    for i in range(n):
        V = lagrange_basis_matrix(ref.nodes, kernel.epsilon * qx + ref.nodes[i])
        phi[i, :] = (qw * p_vals) @ V
    return phi


@dataclass(frozen=True)
class MultiElementFilter:
    """Filter blocks pairing an element with its two side neighbors.

    phi_left multiplies the LEFT (or bottom, in the y pass) neighbor's
    nodal values, phi_center the element's own, phi_right the RIGHT (top)
    neighbor's.  Row i of the three blocks integrates the kernel stencil
    of node i over the neighbor's, the element's, and the other neighbor's
    coordinate ranges respectively.
    """

    phi_left: np.ndarray
    phi_center: np.ndarray
    phi_right: np.ndarray
    kernel: DeltaKernel
    ref: ReferenceElement

    def row_sums(self) -> np.ndarray:
        return (self.phi_left.sum(axis=1) + self.phi_center.sum(axis=1)
                + self.phi_right.sum(axis=1))


def build_multi_element_matrices(ref: ReferenceElement,
                                 kernel: DeltaKernel) -> MultiElementFilter:
    """Assemble the three neighbor-aware filter blocks.

    For node i the stencil [xi_i - eps, xi_i + eps] is intersected with
    the left neighbor's range [-3, -1], the element's own [-1, 1], and the
    right neighbor's [1, 3] (neighbor coordinates offset by -+2, so their
    basis arguments are shifted by +-2).  Each nonempty piece is mapped
    affinely onto [-1, 1] and integrated with the full LGL rule, which is
    exact because the integrand is a single polynomial on each piece.

    Raises:
        FilterError: eps not set, eps > 2 (stencil would overflow the
            3-element neighborhood), or row sums off unity by more than
            ROW_SUM_TOL.
    """
    eps = kernel.epsilon
    if eps is None:
        raise FilterError("kernel has no support half-width set")
    if eps > 2.0:
        raise FilterError(
            f"support half-width eps={eps} exceeds 2: stencil overflows "
            "the element plus its immediate neighbors")
    n_q = quad_point_count(kernel, ref.N)
    qx, qw = lgl_nodes_weights(n_q - 1)
    n = ref.n_nodes
    blocks = [np.zeros((n, n)) for _ in range(3)]
    pieces = ((-3.0, -1.0, +2.0), (-1.0, 1.0, 0.0), (1.0, 3.0, -2.0))
    for i in range(n):
        lo_stencil = ref.nodes[i] - eps
        hi_stencil = ref.nodes[i] + eps
        for block, (lo, hi, shift) in zip(blocks, pieces):
            a = max(lo_stencil, lo)
            b = min(hi_stencil, hi)
            if b - a <= 1e-14:
                continue
            tau = 0.5 * (a + b) + 0.5 * (b - a) * qx
            w = 0.5 * (b - a) * qw
            dvals = delta_eval(kernel, ref.nodes[i] - tau)
            V = lagrange_basis_matrix(ref.nodes, tau + shift)
            block[i, :] = (w * dvals) @ V
    filt = MultiElementFilter(phi_left=blocks[0], phi_center=blocks[1],
                              phi_right=blocks[2], kernel=kernel, ref=ref)
    defect = np.max(np.abs(filt.row_sums() - 1.0))
    if defect > ROW_SUM_TOL:
        raise FilterError(
            f"filter row sums deviate from 1 by {defect:.3e} "
            f"(N={ref.N}, m={kernel.m}, k={kernel.k}, eps={eps})")
    for arr in blocks:
        arr.setflags(write=False)
    return filt


def filter_element_1d(filt: MultiElementFilter, u_left, u_center, u_right):
    """Filter one element's nodal data given its two neighbors' data.

    Inputs may be vectors of length N+1 or arrays whose first axis is the
    node index.
    """
    return (filt.phi_left @ np.asarray(u_left)
            + filt.phi_center @ np.asarray(u_center)
            + filt.phi_right @ np.asarray(u_right))


# ---------------------------------------------------------------------------
# Ghost-element construction
# ---------------------------------------------------------------------------

def _ghost_coords(mesh, ref, side: str):
    """Nodal coordinates (X, Y) of the ghost elements beyond one side.

    Returns arrays of shape (n_boundary_elements, p, p) ordered along the
    boundary (bottom-to-top for left/right sides, left-to-right for
    bottom/top).
    """
    p = ref.n_nodes
    if side in ("left", "right"):
        iy = np.arange(mesh.n_elem_y)
        y = mesh.map_y(iy[:, None], ref.nodes[None, :])      # (ny, p)
        if side == "left":
            xg = mesh.x_min - mesh.dx + (ref.nodes + 1.0) * 0.5 * mesh.dx
        else:
            xg = mesh.x_max + (ref.nodes + 1.0) * 0.5 * mesh.dx
        X = np.broadcast_to(xg[None, :, None], (mesh.n_elem_y, p, p))
        Y = np.broadcast_to(y[:, None, :], (mesh.n_elem_y, p, p))
    else:
        ix = np.arange(mesh.n_elem_x)
        x = mesh.map_x(ix[:, None], ref.nodes[None, :])      # (nx, p)
        if side == "bottom":
            yg = mesh.y_min - mesh.dy + (ref.nodes + 1.0) * 0.5 * mesh.dy
        else:
            yg = mesh.y_max + (ref.nodes + 1.0) * 0.5 * mesh.dy
        X = np.broadcast_to(x[:, :, None], (mesh.n_elem_x, p, p))
        Y = np.broadcast_to(yg[None, None, :], (mesh.n_elem_x, p, p))
    return np.ascontiguousarray(X), np.ascontiguousarray(Y)


def _copy_ghost(u_boundary: np.ndarray, side: str) -> np.ndarray:
    """Ghost data for copy-type conditions (outflow, reflecting).

    The interior boundary-face values are held constant across the ghost
    element, matching the ghost rule of setting outflow/reflection ghosts
    to the last interior value.
    """
    if side == "left":
        face = u_boundary[:, 0, :, :]                  # (nb, p, nv)
        return np.repeat(face[:, None, :, :], u_boundary.shape[1], axis=1)
    if side == "right":
        face = u_boundary[:, -1, :, :]
        return np.repeat(face[:, None, :, :], u_boundary.shape[1], axis=1)
    if side == "bottom":
        face = u_boundary[:, :, 0, :]                  # (nb, p, nv)
        return np.repeat(face[:, :, None, :], u_boundary.shape[2], axis=2)
    face = u_boundary[:, :, -1, :]
    return np.repeat(face[:, :, None, :], u_boundary.shape[2], axis=2)


def ghost_elements(bc, u_boundary: np.ndarray, mesh, ref, side: str,
                   t: float) -> np.ndarray:
    """Nodal data of the ghost elements beyond one physical boundary.

    Args:
        bc: the side's boundary condition (not Periodic).
        u_boundary: interior data of the boundary-adjacent elements,
            shape (n_boundary_elements, p, p, nv), ordered along the
            boundary.
        side: "left" | "right" | "bottom" | "top".
        t: time at which Dirichlet states are evaluated.
    """
    if isinstance(bc, bcmod.Periodic):
        raise FilterError("periodic sides wrap; they have no ghost elements")
    if isinstance(bc, (bcmod.Outflow, bcmod.Reflecting)):
        return _copy_ghost(u_boundary, side)
    if isinstance(bc, bcmod.Dirichlet):
        X, Y = _ghost_coords(mesh, ref, side)
        return np.asarray(bc.state(X, Y, t), dtype=float)
    if isinstance(bc, bcmod.SwitchedBC):
        X, Y = _ghost_coords(mesh, ref, side)
        mask = np.asarray(bc.predicate(X, Y, t), dtype=bool)

        def arm_values(arm):
            if isinstance(arm, bcmod.Dirichlet):
                return np.asarray(arm.state(X, Y, t), dtype=float)
            return _copy_ghost(u_boundary, side)

        vals_true = arm_values(bc.bc_true)
        vals_false = arm_values(bc.bc_false)
        return np.where(mask[..., None], vals_true, vals_false)
    raise FilterError(f"unsupported boundary condition {bc!r}")


# ---------------------------------------------------------------------------
# 2D application
# ---------------------------------------------------------------------------

def _neighbor_env_x(u, mesh, ref, bcset, t):
    """Left/right neighbor data arrays for the x pass (ghosts filled in)."""
    left_idx, right_idx = mesh.neighbors_x(bcset.periodic_x)
    u_left = u[np.where(left_idx >= 0, left_idx, 0)]
    u_right = u[np.where(right_idx >= 0, right_idx, 0)]
    if not bcset.periodic_x:
        col = mesh.element_column(np.arange(mesh.n_elem))
        lb = np.nonzero(col == 0)[0]
        rb = np.nonzero(col == mesh.n_elem_x - 1)[0]
        u_left[lb] = ghost_elements(bcset.left, u[lb], mesh, ref, "left", t)
        u_right[rb] = ghost_elements(bcset.right, u[rb], mesh, ref, "right", t)
    return u_left, u_right


def _neighbor_env_y(u, mesh, ref, bcset, t):
    """Bottom/top neighbor data arrays for the y pass."""
    down_idx, up_idx = mesh.neighbors_y(bcset.periodic_y)
    u_down = u[np.where(down_idx >= 0, down_idx, 0)]
    u_up = u[np.where(up_idx >= 0, up_idx, 0)]
    if not bcset.periodic_y:
        row = mesh.element_row(np.arange(mesh.n_elem))
        bb = np.nonzero(row == 0)[0]
        tb = np.nonzero(row == mesh.n_elem_y - 1)[0]
        u_down[bb] = ghost_elements(bcset.bottom, u[bb], mesh, ref, "bottom", t)
        u_up[tb] = ghost_elements(bcset.top, u[tb], mesh, ref, "top", t)
    return u_down, u_up


def _apply_x(filt, u, u_left, u_right):
    """Contract the filter blocks against the x node index."""
    n_elem, p, _, nv = u.shape
    flat = (n_elem, p, p * nv)
    out = np.matmul(filt.phi_center, u.reshape(flat))
    out += np.matmul(filt.phi_left, u_left.reshape(flat))
    out += np.matmul(filt.phi_right, u_right.reshape(flat))
    return out.reshape(u.shape)

def _apply_y(filt, u, u_down, u_up):
    """Contract the filter blocks against the y node index."""
    n_elem, p, _, nv = u.shape
    flat = (n_elem * p, p, nv)
    out = np.matmul(filt.phi_center, u.reshape(flat))
    out += np.matmul(filt.phi_left, u_down.reshape(flat))
    out += np.matmul(filt.phi_right, u_up.reshape(flat))
    return out.reshape(u.shape)


def filter_field_2d(filt: MultiElementFilter, u: np.ndarray, mesh, bcset,
                    t: float = 0.0) -> np.ndarray:
    """Tensor-product filter over the whole field, x pass then y pass.

    Both passes read frozen snapshots (the pre-filter field for the x pass,
    the completed x-pass output for the y pass), so results are independent
    of element visiting order, and corner neighbors never enter.  Ghost
    elements close the stencils at non-periodic boundaries: prescribed
    states for Dirichlet sides (evaluated at ghost-node coordinates at time
    t), last-interior-value copies for outflow/reflecting sides.

    Args:
        u: conserved nodal field, shape (n_elem, p, p, n_vars).

    Returns:
        the filtered field, same shape (input untouched).
    """
    ref = filt.ref
    if u.shape[1] != ref.n_nodes or u.shape[2] != ref.n_nodes:
        raise FilterError(f"field shape {u.shape} does not match N={ref.N}")
    u_left, u_right = _neighbor_env_x(u, mesh, ref, bcset, t)
    ux = _apply_x(filt, u, u_left, u_right)
    u_down, u_up = _neighbor_env_y(ux, mesh, ref, bcset, t)
    return _apply_y(filt, ux, u_down, u_up)


# ---------------------------------------------------------------------------
# Shock indicator and convex blending
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AdaptiveFilterSettings:
    """Indicator thresholds and blending behavior.

    Attributes:
        sigma_min: log10 threshold below which an element stays unfiltered.
        sigma_max: log10 threshold above which an element is fully filtered.
        indicator_variable: "density" or "pressure" (what drives sigma_n).
        mode: "off", "always-on", or "adaptive".
        lambda_formula: "ramp" (default) or "printed" (alternative
            transition-argument grouping, kept behind this switch).
    """

    sigma_min: float
    sigma_max: float
    indicator_variable: str = "density"
    mode: str = "adaptive"
    lambda_formula: str = "ramp"

    def __post_init__(self):
        if self.sigma_min > self.sigma_max:
            raise FilterError(
                f"sigma_min={self.sigma_min} exceeds sigma_max={self.sigma_max}")
        if self.mode not in ("off", "always-on", "adaptive"):
            raise FilterError(f"unknown filter mode {self.mode!r}")
        if self.indicator_variable not in ("density", "pressure"):
            raise FilterError(
                f"unknown indicator variable {self.indicator_variable!r}")
        if self.lambda_formula not in ("ramp", "printed"):
            raise FilterError(f"unknown lambda formula {self.lambda_formula!r}")


def shock_indicator(w_elem: np.ndarray, w_filtered_elem: np.ndarray):
    """Per-element indicator from one variable's nodal values.

    Args:
        w_elem / w_filtered_elem: the indicator variable (already
            extracted) on the element's nodes, any matching shapes.

    Returns:
        (eps_n, sigma_n): the max nodal deviation and its log10;
        eps_n = 0 maps to sigma_n = -inf.
    """
    eps_n = float(np.max(np.abs(np.asarray(w_elem) - np.asarray(w_filtered_elem))))
    sigma_n = np.log10(eps_n) if eps_n > 0.0 else -np.inf
    return eps_n, sigma_n


def indicator_field(w: np.ndarray, w_filtered: np.ndarray):
    """Vectorized shock_indicator over all elements.

    Args:
        w, w_filtered: indicator-variable fields, shape (n_elem, p, p).

    Returns:
        (eps, sigma) arrays of shape (n_elem,), with -inf where eps = 0.
    """
    eps = np.max(np.abs(w - w_filtered), axis=(1, 2))
    with np.errstate(divide="ignore"):
        sigma = np.where(eps > 0.0, np.log10(np.maximum(eps, 1e-300)), -np.inf)
    return eps, sigma


def blend_parameter(sigma_n, settings: AdaptiveFilterSettings):
    """Convex weight lambda of the filtered solution for indicator sigma_n.

    Ramp formula: 0 below sigma_min, 1 above sigma_max, and
    (1 + sin(pi (sigma_n - sigma_mid) / (sigma_max - sigma_min))) / 2 in
    between (sigma_mid the midpoint), clamped to [0, 1].  The "printed"
    variant divides only the threshold midpoint by the threshold width
    inside the sine argument.  Degenerate sigma_min = sigma_max: hard
    switch, lambda in {0, 1} exactly.

    Accepts scalars or arrays; -inf sigma values give lambda = 0.
    """
    sigma = np.asarray(sigma_n, dtype=float)
    lo, hi = settings.sigma_min, settings.sigma_max
    if lo == hi:
        lam = np.where(sigma <= lo, 0.0, 1.0)
    else:
        if settings.lambda_formula == "ramp":
            arg = np.pi * (sigma - 0.5 * (lo + hi)) / (hi - lo)
        else:
            arg = np.pi * (sigma - 0.5 * (lo + hi) / (hi - lo))
        with np.errstate(invalid="ignore"):
            ramp = 0.5 * (1.0 + np.sin(np.where(np.isfinite(sigma), arg, 0.0)))
        lam = np.clip(ramp, 0.0, 1.0)
        lam = np.where(sigma < lo, 0.0, lam)
        lam = np.where(sigma > hi, 1.0, lam)
    lam = np.where(np.isneginf(sigma), 0.0, lam)
    if np.ndim(sigma_n) == 0:
        return float(lam)
    return lam


def blend(u_elem: np.ndarray, u_filtered_elem: np.ndarray, sigma_n: float,
          settings: AdaptiveFilterSettings) -> np.ndarray:
    """Convex combination lambda * filtered + (1 - lambda) * unfiltered."""
    lam = blend_parameter(sigma_n, settings)
    if lam == 0.0:
        return np.array(u_elem, copy=True)
    if lam == 1.0:
        return np.array(u_filtered_elem, copy=True)
    return lam * np.asarray(u_filtered_elem) + (1.0 - lam) * np.asarray(u_elem)


def normalized_threshold_check(eps_n: float, N: int, n_elem: int,
                               tol: float) -> bool:
    """Binary adaptive trigger: eps_n / ((N+1) * n_elem) > tol, strictly."""
    if tol <= 0:
        raise FilterError(f"tolerance must be positive, got {tol!r}")
    return eps_n / ((N + 1) * n_elem) > tol
