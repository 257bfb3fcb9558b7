"""Single-element polynomial machinery on Legendre-Gauss-Lobatto nodes.

Provides LGL nodes and quadrature weights, Lagrange basis evaluation (valid
at arbitrary real points, including outside [-1, 1]), and the spectral
differentiation matrix for nodal collocation of degree N.
"""

from __future__ import annotations

import numpy as np


class ReferenceElementError(Exception):
    """Raised when reference-element construction fails."""


def _legendre_pair(x: np.ndarray, N: int) -> tuple[np.ndarray, np.ndarray]:
    """Evaluate (P_N, P_{N-1}) at the points ``x`` by three-term recurrence."""
    p_prev = np.ones_like(x)
    p = x.copy()
    for k in range(2, N + 1):
        p_prev, p = p, ((2 * k - 1) * x * p - (k - 1) * p_prev) / k
    return p, p_prev


def lgl_nodes_weights(N: int, tol: float = 1e-15, max_iter: int = 100):
    """Nodes and weights of the (N+1)-point Legendre-Gauss-Lobatto rule.

    The nodes are the roots of (1 - x^2) P_N'(x), computed by Newton
    iteration from Chebyshev-Gauss-Lobatto initial guesses.  The update
    dx = (x P_N - P_{N-1}) / ((N+1) P_N) is the Newton step for that root
    problem expressed through the Legendre recurrence.

    Args:
        N: polynomial degree (>= 1); the rule has N+1 points.
        tol: convergence tolerance on the max Newton update.
        max_iter: iteration cap before reporting non-convergence.

    Returns:
        (nodes, weights): ascending nodes in [-1, 1] with -1 and +1
        included, and positive weights summing to 2.

    Raises:
        ReferenceElementError: if N < 1 or the iteration does not converge.
    """
    if N < 1:
        raise ReferenceElementError(f"LGL rule needs degree N >= 1, got N={N}")
    x = -np.cos(np.pi * np.arange(N + 1) / N)
    for _ in range(max_iter):
        p, p_prev = _legendre_pair(x, N)
        dx = (x * p - p_prev) / ((N + 1) * p)
        x -= dx
        if np.max(np.abs(dx)) < tol:
            break
    else:
        raise ReferenceElementError(
            f"LGL Newton iteration did not converge for N={N} "
            f"within {max_iter} iterations")
    # Symmetrize: the node set is symmetric about 0 analytically; enforcing
    # it exactly keeps downstream quadrature of odd monomials at hard zero.
    x = 0.5 * (x - x[::-1])
    p, _ = _legendre_pair(x, N)
    w = 2.0 / (N * (N + 1) * p * p)
    w = 0.5 * (w + w[::-1])
    return x, w


def barycentric_weights(nodes: np.ndarray) -> np.ndarray:
    """Barycentric weights w_j = 1 / prod_{m != j} (x_j - x_m)."""
    nodes = np.asarray(nodes, dtype=float)
    diff = nodes[:, None] - nodes[None, :]
    np.fill_diagonal(diff, 1.0)
    return 1.0 / np.prod(diff, axis=1)


def lagrange_eval(nodes: np.ndarray, j: int, x) -> np.ndarray:
    """Evaluate the j-th Lagrange basis polynomial at arbitrary points.

    Uses the product form prod_{m != j} (x - x_m)/(x_j - x_m), which is a
    total function of x (no poles), so evaluation outside [-1, 1] is valid.
    This matters for the filter, whose neighbor blocks shift arguments
    by +-2.
    """
    nodes = np.asarray(nodes, dtype=float)
    x = np.asarray(x, dtype=float)
    out = np.ones_like(x)
    for m in range(len(nodes)):
        if m == j:
            continue
        out = out * (x - nodes[m]) / (nodes[j] - nodes[m])
    return out


def lagrange_eval_barycentric(nodes: np.ndarray, j: int, x) -> np.ndarray:
    """Second-form barycentric evaluation of the j-th basis polynomial.

    Cross-check implementation for lagrange_eval; points coinciding with a
    node are resolved by the Kronecker property.
    """
    nodes = np.asarray(nodes, dtype=float)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    w = barycentric_weights(nodes)
    out = np.empty_like(x)
    for idx, xp in enumerate(x):
        d = xp - nodes
        hit = np.nonzero(d == 0.0)[0]
        if hit.size:
            out[idx] = 1.0 if hit[0] == j else 0.0
        else:
            terms = w / d
            out[idx] = (w[j] / d[j]) / np.sum(terms)
    return out


def lagrange_basis_matrix(nodes: np.ndarray, x) -> np.ndarray:
    """Matrix V with V[p, j] = psi_j(x_p) for sample points x.

    Interpolation from nodal values u is then V @ u.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    V = np.empty((x.size, len(nodes)))
    for j in range(len(nodes)):
        V[:, j] = lagrange_eval(nodes, j, x)
    return V


def diff_matrix(nodes: np.ndarray) -> np.ndarray:
    """Spectral differentiation matrix D with D[i, j] = psi_j'(x_i).

    Off-diagonal entries from barycentric weights; diagonal set to the
    negated off-diagonal row sum so each row sums to zero (a constant
    differentiates to zero by construction).
    """
    nodes = np.asarray(nodes, dtype=float)
    n = len(nodes)
    w = barycentric_weights(nodes)
    D = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            if i != j:
                D[i, j] = (w[j] / w[i]) / (nodes[i] - nodes[j])
        D[i, i] = -np.sum(D[i, :])
    return D


class ReferenceElement:
    """Degree-N LGL collocation data: nodes, weights, differentiation matrix."""

    def __init__(self, N: int):
        self.N = int(N)
        self.nodes, self.weights = lgl_nodes_weights(self.N)
        self.diff = diff_matrix(self.nodes)
        self.bary_weights = barycentric_weights(self.nodes)
        if not (self.nodes[0] == -1.0 and self.nodes[-1] == 1.0):
            raise ReferenceElementError(
                f"LGL endpoints missing for N={N}: "
                f"[{self.nodes[0]}, {self.nodes[-1]}]")
        if abs(np.sum(self.weights) - 2.0) > 1e-13:
            raise ReferenceElementError(
                f"LGL weights for N={N} sum to {np.sum(self.weights)!r}, not 2")

    @property
    def n_nodes(self) -> int:
        return self.N + 1

    def basis_matrix(self, x) -> np.ndarray:
        """Sample-point evaluation matrix; see lagrange_basis_matrix."""
        return lagrange_basis_matrix(self.nodes, x)

    def __repr__(self) -> str:
        return f"ReferenceElement(N={self.N})"
