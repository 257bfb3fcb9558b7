"""Error norms, conservation measures, and convergence-rate tables.

Provides the nodal max-norm error, the quadrature-based conservation error
(against a nodal reference field or an analytic function integrated with
over-resolved Gauss quadrature), experimental-order-of-convergence columns,
and plain-text / CSV table formatting.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np


class DiagnosticsError(Exception):
    """Raised for invalid diagnostic inputs (e.g. non-refining sequences)."""


# ---------------------------------------------------------------------------
# Norms and integrals
# ---------------------------------------------------------------------------

def linf_error(u: np.ndarray, u_ref: np.ndarray, variable: int = 0) -> float:
    """Max nodal difference of one variable between two fields.

    Args:
        u / u_ref: nodal arrays of shape (n_elem, p, p, n_vars).
        variable: trailing-axis index of the compared variable.
    """
    if u.shape != u_ref.shape:
        raise DiagnosticsError(
            f"field shapes differ: {u.shape} vs {u_ref.shape}")
    return float(np.max(np.abs(u[..., variable] - u_ref[..., variable])))


def linf_errors(u: np.ndarray, u_ref: np.ndarray) -> np.ndarray:
    """Per-variable max nodal differences; shape (n_vars,)."""
    if u.shape != u_ref.shape:
        raise DiagnosticsError(
            f"field shapes differ: {u.shape} vs {u_ref.shape}")
    diff = np.abs(u - u_ref)
    return diff.reshape(-1, u.shape[-1]).max(axis=0)


def nodal_integral(values: np.ndarray, mesh, ref) -> float:
    """Integral of a nodal scalar field by the collocated LGL quadrature.

    Args:
        values: shape (n_elem, p, p).
        mesh: CartesianMesh supplying the element Jacobian.
        ref: ReferenceElement supplying the quadrature weights.
    """
    w2 = np.outer(ref.weights, ref.weights)
    return mesh.jacobian * float(np.einsum("eij,ij->", values, w2))


def function_integral(f: Callable, mesh, n_quad: int = 32) -> float:
    """Integral of f(x, y) over the mesh by per-element Gauss quadrature.

    Uses an n_quad x n_quad Gauss-Legendre rule in every element, which
    over-resolves any field the solver can represent.
    """
    xg, wg = np.polynomial.legendre.leggauss(n_quad)
    ix = np.arange(mesh.n_elem_x)
    iy = np.arange(mesh.n_elem_y)
    # Physical quadrature coordinates per column/row of elements.
    xq = (mesh.x_left(ix)[:, None]
          + 0.5 * mesh.dx * (xg[None, :] + 1.0)).reshape(-1)
    yq = (mesh.y_bottom(iy)[:, None]
          + 0.5 * mesh.dy * (xg[None, :] + 1.0)).reshape(-1)
    vals = np.asarray(f(xq[None, :], yq[:, None]), dtype=float)
    vals = np.broadcast_to(vals, (yq.size, xq.size))
    wx = np.tile(wg, mesh.n_elem_x)
    wy = np.tile(wg, mesh.n_elem_y)
    return mesh.jacobian * float(wy @ vals @ wx)


def conservation_error(u: np.ndarray, mesh, ref, variable: int = 0,
                       u_ref: Optional[np.ndarray] = None,
                       exact: Optional[Callable] = None,
                       n_quad: int = 32) -> float:
    """Absolute difference of total amount between a field and a reference.

    The field integral uses the collocated LGL quadrature.  The reference
    is either another nodal field (same quadrature) or an analytic
    function of (x, y) integrated with over-resolved Gauss quadrature.

    Args:
        u: nodal conserved field (n_elem, p, p, n_vars).
        variable: which conserved variable to measure.
        u_ref: nodal reference field of the same shape (mutually exclusive
            with exact).
        exact: callable (x, y) -> variable value, broadcast over arrays.
    """
    if (u_ref is None) == (exact is None):
        raise DiagnosticsError(
            "provide exactly one of u_ref (nodal) or exact (analytic)")
    total = nodal_integral(u[..., variable], mesh, ref)
    if u_ref is not None:
        total_ref = nodal_integral(u_ref[..., variable], mesh, ref)
    else:
        total_ref = function_integral(exact, mesh, n_quad=n_quad)
    return abs(total_ref - total)


# ---------------------------------------------------------------------------
# Convergence rates
# ---------------------------------------------------------------------------

def eoc_values(n_elems: Sequence[int], errors: Sequence[float]) -> list:
    """Experimental orders of convergence between consecutive mesh levels.

    Args:
        n_elems: elements per direction, strictly increasing.
        errors: matching error values.

    Returns:
        List of length len(errors) - 1; entry i is
        log(e_i / e_{i+1}) / log(n_{i+1} / n_i), which reduces to
        log2(e_i / e_{i+1}) under mesh doubling.
    """
    if len(n_elems) != len(errors):
        raise DiagnosticsError("n_elems and errors must have equal length")
    if len(n_elems) < 2:
        raise DiagnosticsError("need at least two levels for an EOC")
    for a, b in zip(n_elems, n_elems[1:]):
        if not b > a:
            raise DiagnosticsError(
                f"mesh sequence must be strictly refining, got {list(n_elems)}")
    out = []
    for (na, ea), (nb, eb) in zip(zip(n_elems, errors),
                                  zip(n_elems[1:], errors[1:])):
        if ea <= 0.0 or eb <= 0.0:
            out.append(math.inf)
        else:
            out.append(math.log(ea / eb) / math.log(nb / na))
    return out


@dataclass
class ErrorReport:
    """Per-run error summary.

    Attributes:
        n_elem_x / n_elem_y: mesh size of the run.
        linf: per-variable max nodal error vs the exact solution (empty
            when no exact solution exists).
        conservation: per-variable conservation error.
    """

    n_elem_x: int
    n_elem_y: int
    linf: dict = field(default_factory=dict)
    conservation: dict = field(default_factory=dict)

    def lines(self) -> list:
        """Deterministic text rendering (17 significant digits)."""
        out = [f"mesh {self.n_elem_x}x{self.n_elem_y}"]
        for name, val in self.linf.items():
            out.append(f"linf[{name}] = {val:.17e}")
        for name, val in self.conservation.items():
            out.append(f"cons[{name}] = {val:.17e}")
        return out

    def __str__(self):
        return "\n".join(self.lines())


# ---------------------------------------------------------------------------
# Table formatting
# ---------------------------------------------------------------------------

def _cell(value) -> str:
    if value is None:
        return "-"
    if isinstance(value, float):
        return f"{value:.6e}" if (value != 0 and (abs(value) < 1e-2 or
                                                  abs(value) >= 1e4)) \
            else f"{value:.4f}"
    return str(value)


def format_table(headers: Sequence[str], rows: Sequence[Sequence]) -> str:
    """Align rows under headers with two-space separation."""
    cells = [[_cell(v) for v in row] for row in rows]
    widths = [max(len(h), *(len(r[i]) for r in cells)) if cells else len(h)
              for i, h in enumerate(headers)]
    def fmt(row):
        return "  ".join(s.rjust(w) for s, w in zip(row, widths))
    lines = [fmt(headers), fmt(["-" * w for w in widths])]
    lines.extend(fmt(r) for r in cells)
    return "\n".join(lines)


def table_csv(headers: Sequence[str], rows: Sequence[Sequence]) -> str:
    """CSV rendering of the same table content."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(headers)
    for row in rows:
        writer.writerow(["" if v is None else
                         (repr(v) if isinstance(v, float) else v)
                         for v in row])
    return buf.getvalue()


def eoc_table(n_elems: Sequence[int], errors: Sequence[float],
              cons_errors: Optional[Sequence[float]] = None):
    """Assemble a convergence table with an EOC column.

    Returns:
        (headers, rows) where rows[i] = [n_elems[i] formatted as KxK,
        error, eoc (None on the first row), cons (optional)].
    """
    rates = eoc_values(n_elems, errors)
    headers = ["mesh", "linf_error", "eoc"]
    if cons_errors is not None:
        if len(cons_errors) != len(errors):
            raise DiagnosticsError("cons_errors length mismatch")
        headers.append("cons_error")
    rows = []
    for i, (nq, err) in enumerate(zip(n_elems, errors)):
        row = [f"{nq}x{nq}", float(err), None if i == 0 else rates[i - 1]]
        if cons_errors is not None:
            row.append(float(cons_errors[i]))
        rows.append(row)
    return headers, rows
