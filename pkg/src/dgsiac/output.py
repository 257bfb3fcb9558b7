"""Snapshot and slice output: rectilinear VTK files and CSV profiles.

Snapshots are legacy ASCII rectilinear-grid VTK files holding the nodal
conserved variables, the non-redundant primitive variables, and the
per-element blend parameter replicated to the nodes.  Interface nodes are
duplicated in the coordinate arrays (each element contributes all of its
nodes), which preserves the discontinuous representation.

Slices sample the element polynomials (tensor-product Lagrange evaluation,
not nearest-node lookup) along the main diagonal or a horizontal line and
are written as two-column CSV files.
"""

from __future__ import annotations

import csv
from typing import Optional, Sequence

import numpy as np

from .refelem import lagrange_basis_matrix


class OutputError(Exception):
    """Raised for unwritable or unparsable output files."""


# ---------------------------------------------------------------------------
# Global duplicated-node grids
# ---------------------------------------------------------------------------

def global_axis_coords(mesh, ref, axis: int) -> np.ndarray:
    """1D physical coordinates of all element nodes along one axis.

    Element interface nodes appear twice (once per adjacent element).
    """
    if axis == 0:
        n_elem, width, origin = mesh.n_elem_x, mesh.dx, mesh.x_min
    else:
        n_elem, width, origin = mesh.n_elem_y, mesh.dy, mesh.y_min
    offsets = origin + width * np.arange(n_elem)
    local = 0.5 * width * (ref.nodes + 1.0)
    return (offsets[:, None] + local[None, :]).reshape(-1)


def _point_values(values: np.ndarray, mesh, ref) -> np.ndarray:
    """Nodal element values (n_elem, p, p) -> flat VTK point order.

    VTK rectilinear point data runs x fastest, then y.  Global x index is
    column * p + i, global y index is row * p + j.
    """
    p = ref.n_nodes
    nx = mesh.n_elem_x * p
    ny = mesh.n_elem_y * p
    grid = np.empty((ny, nx))
    vals = values.reshape(mesh.n_elem_y, mesh.n_elem_x, p, p)
    # (row, col, i, j) -> (row, j, col, i) = (y-block, y-node, x-block, x-node)
    grid[...] = vals.transpose(0, 3, 1, 2).reshape(ny, nx)
    return grid.reshape(-1)


# ---------------------------------------------------------------------------
# Legacy ASCII VTK writer / reader
# ---------------------------------------------------------------------------

def _write_floats(handle, values, per_line: int = 6):
    values = np.asarray(values, dtype=float).reshape(-1)
    for start in range(0, values.size, per_line):
        chunk = values[start:start + per_line]
        handle.write(" ".join(f"{v:.17g}" for v in chunk) + "\n")


def write_vtk_snapshot(path, u: np.ndarray, mesh, ref, physics,
                       lam: Optional[np.ndarray] = None,
                       title: str = "solution snapshot") -> None:
    """Write one rectilinear-grid snapshot.

    Args:
        u: conserved nodal field (n_elem, p, p, n_vars).
        lam: per-element blend parameter (n_elem,), written replicated to
            the nodes (zeros if omitted).
    """
    xs = global_axis_coords(mesh, ref, 0)
    ys = global_axis_coords(mesh, ref, 1)
    fields = []
    seen = set()
    for v, name in enumerate(physics.var_names):
        fields.append((name, _point_values(u[..., v], mesh, ref)))
        seen.add(name)
    # Snapshots record the field as it is, including transient dips.
    prim = physics.conservative_to_primitive(u, check=False)
    for v, name in enumerate(physics.prim_names):
        if name in seen:
            continue
        fields.append((name, _point_values(prim[..., v], mesh, ref)))
        seen.add(name)
    if lam is None:
        lam = np.zeros(mesh.n_elem)
    lam_nodes = np.broadcast_to(
        np.asarray(lam, dtype=float)[:, None, None],
        (mesh.n_elem, ref.n_nodes, ref.n_nodes))
    fields.append(("blend_lambda", _point_values(lam_nodes, mesh, ref)))

    try:
        with open(path, "w", encoding="ascii") as handle:
            handle.write("# vtk DataFile Version 3.0\n")
            handle.write(title + "\n")
            handle.write("ASCII\n")
            handle.write("DATASET RECTILINEAR_GRID\n")
            handle.write(f"DIMENSIONS {xs.size} {ys.size} 1\n")
            handle.write(f"X_COORDINATES {xs.size} double\n")
            _write_floats(handle, xs)
            handle.write(f"Y_COORDINATES {ys.size} double\n")
            _write_floats(handle, ys)
            handle.write("Z_COORDINATES 1 double\n")
            handle.write("0\n")
            handle.write(f"POINT_DATA {xs.size * ys.size}\n")
            for name, values in fields:
                handle.write(f"SCALARS {name} double 1\n")
                handle.write("LOOKUP_TABLE default\n")
                _write_floats(handle, values)
    except OSError as exc:
        raise OutputError(f"cannot write snapshot {path}: {exc}") from None


def read_vtk_snapshot(path):
    """Parse a snapshot written by write_vtk_snapshot.

    Returns:
        (xs, ys, fields) with fields a dict name -> array of shape
        (ny, nx) in [y, x] order.
    """
    try:
        with open(path, "r", encoding="ascii") as handle:
            tokens = handle.read().split("\n")
    except OSError as exc:
        raise OutputError(f"cannot read snapshot {path}: {exc}") from None

    pos = 0

    def next_line():
        nonlocal pos
        while pos < len(tokens):
            line = tokens[pos].strip()
            pos += 1
            if line:
                return line
        raise OutputError(f"truncated VTK file {path}")

    def read_values(count):
        vals = []
        while len(vals) < count:
            vals.extend(float(v) for v in next_line().split())
        if len(vals) != count:
            raise OutputError(f"malformed value block in {path}")
        return np.array(vals)

    header = next_line()
    if not header.startswith("# vtk"):
        raise OutputError(f"{path} is not a VTK file")
    next_line()  # title
    if next_line() != "ASCII":
        raise OutputError(f"{path} is not ASCII VTK")
    if next_line() != "DATASET RECTILINEAR_GRID":
        raise OutputError(f"{path} is not a rectilinear-grid file")
    dims = next_line().split()
    nx, ny = int(dims[1]), int(dims[2])
    line = next_line()
    if not line.startswith("X_COORDINATES"):
        raise OutputError(f"unexpected line {line!r} in {path}")
    xs = read_values(nx)
    line = next_line()
    if not line.startswith("Y_COORDINATES"):
        raise OutputError(f"unexpected line {line!r} in {path}")
    ys = read_values(ny)
    line = next_line()
    if not line.startswith("Z_COORDINATES"):
        raise OutputError(f"unexpected line {line!r} in {path}")
    read_values(int(line.split()[1]))
    line = next_line()
    if not line.startswith("POINT_DATA"):
        raise OutputError(f"unexpected line {line!r} in {path}")
    n_points = int(line.split()[1])
    fields = {}
    while True:
        try:
            line = next_line()
        except OutputError:
            break
        if not line.startswith("SCALARS"):
            raise OutputError(f"unexpected line {line!r} in {path}")
        name = line.split()[1]
        next_line()  # LOOKUP_TABLE
        fields[name] = read_values(n_points).reshape(ny, nx)
    return xs, ys, fields


# ---------------------------------------------------------------------------
# Polynomial-evaluated slices
# ---------------------------------------------------------------------------

def _locate(coord: np.ndarray, origin: float, width: float,
            n_elem: int) -> np.ndarray:
    idx = np.floor((coord - origin) / width).astype(int)
    return np.clip(idx, 0, n_elem - 1)


def sample_points(values: np.ndarray, mesh, ref, x: np.ndarray,
                  y: np.ndarray) -> np.ndarray:
    """Evaluate a nodal scalar field at arbitrary physical points.

    Each point is assigned to its containing element (right/top edges to
    the last element) and the element's tensor-product Lagrange
    interpolant is evaluated there.

    Args:
        values: shape (n_elem, p, p) in (element, x-node, y-node) order.
    """
    x = np.asarray(x, dtype=float).reshape(-1)
    y = np.asarray(y, dtype=float).reshape(-1)
    ix = _locate(x, mesh.x_min, mesh.dx, mesh.n_elem_x)
    iy = _locate(y, mesh.y_min, mesh.dy, mesh.n_elem_y)
    xi = 2.0 * (x - mesh.x_left(ix)) / mesh.dx - 1.0
    eta = 2.0 * (y - mesh.y_bottom(iy)) / mesh.dy - 1.0
    vx = lagrange_basis_matrix(ref.nodes, xi)     # (n_pts, p)
    vy = lagrange_basis_matrix(ref.nodes, eta)    # (n_pts, p)
    elems = values[mesh.element_index(ix, iy)]    # (n_pts, p, p)
    return np.einsum("si,sij,sj->s", vx, elems, vy)


def diagonal_slice(values: np.ndarray, mesh, ref, n_samples: int = 512):
    """Profile along the main diagonal of the domain.

    Returns:
        (x, values) where x runs from x_min to x_max and y tracks the
        same relative position along the y extent (x = y on square
        domains).
    """
    s = np.linspace(0.0, 1.0, n_samples)
    x = mesh.x_min + s * (mesh.x_max - mesh.x_min)
    y = mesh.y_min + s * (mesh.y_max - mesh.y_min)
    return x, sample_points(values, mesh, ref, x, y)


def horizontal_slice(values: np.ndarray, mesh, ref, y: float,
                     n_samples: int = 512):
    """Profile along the line y = const.

    Returns:
        (x, values).
    """
    if not mesh.y_min <= y <= mesh.y_max:
        raise OutputError(f"slice line y={y!r} outside the domain")
    x = np.linspace(mesh.x_min, mesh.x_max, n_samples)
    return x, sample_points(values, mesh, ref, x,
                            np.full(n_samples, float(y)))


def write_slice_csv(path, coords: np.ndarray, values: np.ndarray,
                    value_label: str = "value") -> None:
    """Two-column CSV: coordinate, value."""
    try:
        with open(path, "w", newline="", encoding="ascii") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(["coordinate", value_label])
            for c, v in zip(coords, values):
                writer.writerow([f"{c:.17g}", f"{v:.17g}"])
    except OSError as exc:
        raise OutputError(f"cannot write slice {path}: {exc}") from None


def load_reference_slice(path):
    """Read a two-column CSV profile (header optional).

    Returns:
        (coords, values) float arrays.
    """
    coords, values = [], []
    try:
        with open(path, "r", newline="", encoding="utf-8") as handle:
            for row in csv.reader(handle):
                if not row or row[0].strip().startswith("#"):
                    continue
                try:
                    c, v = float(row[0]), float(row[1])
                except (ValueError, IndexError):
                    continue  # header or stray line
                coords.append(c)
                values.append(v)
    except OSError as exc:
        raise OutputError(f"cannot read slice {path}: {exc}") from None
    if not coords:
        raise OutputError(f"no data rows in slice file {path}")
    return np.array(coords), np.array(values)
