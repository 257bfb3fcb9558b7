"""Uniform Cartesian mesh of tensor-product elements.

Elements are numbered row-major from the bottom-left corner to the
top-right: element n = iy * n_elem_x + ix.  Each element maps the
reference square [-1, 1]^2 affinely onto its physical cell; the mapping
Jacobian is J = dx dy / 4 and the directional flux scalings are dy/2
and dx/2.
"""

from __future__ import annotations

import numpy as np


class MeshError(Exception):
    """Raised for invalid mesh parameters."""


class CartesianMesh:
    """Uniform rectangular mesh.

    Attributes:
        x_min, x_max, y_min, y_max: domain bounds.
        n_elem_x, n_elem_y: element counts per direction.
        dx, dy: element sizes.
        jacobian: mapping Jacobian dx*dy/4.
    """

    def __init__(self, x_bounds, y_bounds, n_elem_x: int, n_elem_y: int):
        self.x_min, self.x_max = float(x_bounds[0]), float(x_bounds[1])
        self.y_min, self.y_max = float(y_bounds[0]), float(y_bounds[1])
        if not (self.x_max > self.x_min and self.y_max > self.y_min):
            raise MeshError(f"empty domain [{self.x_min},{self.x_max}]x"
                            f"[{self.y_min},{self.y_max}]")
        if n_elem_x < 1 or n_elem_y < 1:
            raise MeshError(f"element counts must be >= 1, "
                            f"got {n_elem_x} x {n_elem_y}")
        self.n_elem_x = int(n_elem_x)
        self.n_elem_y = int(n_elem_y)
        self.dx = (self.x_max - self.x_min) / self.n_elem_x
        self.dy = (self.y_max - self.y_min) / self.n_elem_y
        self.jacobian = self.dx * self.dy / 4.0

    @property
    def n_elem(self) -> int:
        return self.n_elem_x * self.n_elem_y

    def element_index(self, ix: int, iy: int) -> int:
        return iy * self.n_elem_x + ix

    def element_column(self, e) -> np.ndarray:
        """ix of element(s) e."""
        return np.asarray(e) % self.n_elem_x

    def element_row(self, e) -> np.ndarray:
        """iy of element(s) e."""
        return np.asarray(e) // self.n_elem_x

    def x_left(self, ix) -> np.ndarray:
        return self.x_min + np.asarray(ix) * self.dx

    def y_bottom(self, iy) -> np.ndarray:
        return self.y_min + np.asarray(iy) * self.dy

    def map_x(self, ix, xi) -> np.ndarray:
        """Physical x of reference coordinate xi in element column ix."""
        return self.x_left(ix) + (np.asarray(xi) + 1.0) * 0.5 * self.dx

    def map_y(self, iy, eta) -> np.ndarray:
        return self.y_bottom(iy) + (np.asarray(eta) + 1.0) * 0.5 * self.dy

    def node_coords(self, nodes: np.ndarray):
        """Full nodal coordinate arrays X, Y of shape (n_elem, p, p).

        X[e, i, j] and Y[e, i, j] are the physical coordinates of node
        (i, j) of element e, where i indexes the x direction.
        """
        p = len(nodes)
        ix = np.arange(self.n_elem_x)
        iy = np.arange(self.n_elem_y)
        x_col = self.map_x(ix[:, None], nodes[None, :])   # (n_elem_x, p)
        y_row = self.map_y(iy[:, None], nodes[None, :])   # (n_elem_y, p)
        X = np.empty((self.n_elem, p, p))
        Y = np.empty((self.n_elem, p, p))
        cols = self.element_column(np.arange(self.n_elem))
        rows = self.element_row(np.arange(self.n_elem))
        X[:] = x_col[cols][:, :, None]
        Y[:] = y_row[rows][:, None, :]
        return X, Y

    def check_cover(self, tol: float = 1e-13):
        """Verify element corners tile the domain without gaps/overlaps."""
        edges_x = self.x_left(np.arange(self.n_elem_x + 1))
        edges_y = self.y_bottom(np.arange(self.n_elem_y + 1))
        ok_x = (abs(edges_x[0] - self.x_min) <= tol
                and abs(edges_x[-1] - self.x_max) <= tol
                and np.all(np.abs(np.diff(edges_x) - self.dx) <= tol))
        ok_y = (abs(edges_y[0] - self.y_min) <= tol
                and abs(edges_y[-1] - self.y_max) <= tol
                and np.all(np.abs(np.diff(edges_y) - self.dy) <= tol))
        if not (ok_x and ok_y):
            raise MeshError("element edges do not tile the domain")

    def neighbors_x(self, periodic: bool):
        """Left/right neighbor element index arrays (-1 where none)."""
        e = np.arange(self.n_elem)
        ix = self.element_column(e)
        left = np.where(ix > 0, e - 1, -1)
        right = np.where(ix < self.n_elem_x - 1, e + 1, -1)
        if periodic:
            left = np.where(ix > 0, e - 1, e + self.n_elem_x - 1)
            right = np.where(ix < self.n_elem_x - 1, e + 1, e - self.n_elem_x + 1)
        return left, right

    def neighbors_y(self, periodic: bool):
        """Bottom/top neighbor element index arrays (-1 where none)."""
        e = np.arange(self.n_elem)
        iy = self.element_row(e)
        down = np.where(iy > 0, e - self.n_elem_x, -1)
        up = np.where(iy < self.n_elem_y - 1, e + self.n_elem_x, -1)
        if periodic:
            down = np.where(iy > 0, e - self.n_elem_x,
                            e + (self.n_elem_y - 1) * self.n_elem_x)
            up = np.where(iy < self.n_elem_y - 1, e + self.n_elem_x,
                          e - (self.n_elem_y - 1) * self.n_elem_x)
        return down, up

    def __repr__(self):
        return (f"CartesianMesh([{self.x_min},{self.x_max}]x"
                f"[{self.y_min},{self.y_max}], "
                f"{self.n_elem_x}x{self.n_elem_y})")
