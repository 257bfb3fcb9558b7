"""Polynomial Dirac-delta kernels and their compactly supported scaling.

A kernel P of parameters (m, k) is the unique degree-(m+2k+2) polynomial
with unit mass, m vanishing moments, and derivatives through order k
vanishing at both endpoints of [-1, 1].  The scaled family
delta_eps(x) = (1/eps) P(x/eps) on |x| <= eps (zero outside) approximates
a Dirac delta and drives the smoothing filter.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from math import comb, cos, factorial, pi

import numpy as np
import scipy.linalg
from numpy.polynomial import legendre

#: Condition-estimate ceiling for the equilibrated defining system.
CONDITION_LIMIT = 1e14

#: Post-solve residual bound for every defining condition (mass and moment
#: residuals absolute; endpoint-derivative residuals relative to the
#: derivative's own coefficient scale, see _condition_residuals).
RESIDUAL_LIMIT = 1e-10


class DeltaKernelError(Exception):
    """Raised for invalid kernel parameters or a failed kernel solve."""


def _legendre_moments(i_max: int, n_max: int) -> np.ndarray:
    """Table mu[i, n] = integral of x^i L_n(x) over [-1, 1].

    Built from mu[0, n] = 2*delta_{n0} with the recurrence induced by
    x L_n = ((n+1) L_{n+1} + n L_{n-1}) / (2n+1).
    """
    mu = np.zeros((i_max + 1, n_max + 2))
    mu[0, 0] = 2.0
    for i in range(1, i_max + 1):
        for n in range(n_max + 1):
            up = (n + 1) / (2 * n + 1) * mu[i - 1, n + 1]
            down = n / (2 * n + 1) * mu[i - 1, n - 1] if n >= 1 else 0.0
            mu[i, n] = up + down
    return mu[:, : n_max + 1]


def _legendre_endpoint_derivative(n: int, i: int) -> float:
    """L_n^(i)(+1) = (n+i)! / (2^i i! (n-i)!), zero when n < i."""
    if n < i:
        return 0.0
    return factorial(n + i) / (2.0 ** i * factorial(i) * factorial(n - i))


def _build_system(m: int, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Assemble the (m+2k+3)-condition system in Legendre coefficients.

    Row order: unit mass, vanishing moments 1..m, then for each derivative
    order i = 0..k the endpoint pair (+1, -1).
    """
    n_coeff = m + 2 * k + 3
    A = np.zeros((n_coeff, n_coeff))
    b = np.zeros(n_coeff)
    mu = _legendre_moments(m, n_coeff - 1)
    A[: m + 1, :] = mu
    b[0] = 1.0
    row = m + 1
    for i in range(k + 1):
        for sign in (1.0, -1.0):
            for n in range(n_coeff):
                d = _legendre_endpoint_derivative(n, i)
                # L_n^(i)(-1) = (-1)^(n+i) L_n^(i)(+1).
                A[row, n] = d if sign > 0 else d * (-1.0) ** (n + i)
            row += 1
    return A, b


def _solve_refined(A: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, float]:
    """Row-equilibrated partially pivoted LU with extended-precision refinement.

    The raw system mixes O(1) moment rows with endpoint-derivative rows of
    magnitude up to ~1e19, so each row is scaled by its max-abs entry before
    factorization.  Three refinement passes with longdouble residuals then
    recover the float64-representable solution.

    Returns:
        (solution, condition estimate of the equilibrated matrix).
    """
    scale = np.max(np.abs(A), axis=1)
    As = A / scale[:, None]
    bs = b / scale
    cond = np.linalg.cond(As, 1)
    if not np.isfinite(cond) or cond > CONDITION_LIMIT:
        raise DeltaKernelError(
            f"kernel defining system is too ill-conditioned: "
            f"condition estimate {cond:.3e} exceeds {CONDITION_LIMIT:.1e}")
    lu, piv = scipy.linalg.lu_factor(As)
    x = scipy.linalg.lu_solve((lu, piv), bs)
    A_l = As.astype(np.longdouble)
    b_l = bs.astype(np.longdouble)
    for _ in range(3):
        residual = b_l - A_l @ x.astype(np.longdouble)
        x = (x.astype(np.longdouble)
             + scipy.linalg.lu_solve((lu, piv), residual.astype(np.float64))
             ).astype(np.float64)
    return x, cond


def _condition_residuals(coeffs: np.ndarray, m: int, k: int) -> dict:
    """Post-hoc residuals of every defining condition.

    Mass and moment residuals are absolute, measured with a Gauss rule of
    order >= 2(m+2k+2) (independent of the LGL machinery used elsewhere).
    Endpoint-derivative residuals are scaled by the i-th derivative's own
    coefficient magnitude: rounding the exact solution to float64 already
    perturbs high-order endpoint derivatives by amounts proportional to
    that scale, so only the relative residual is meaningful.
    """
    degree = m + 2 * k + 2
    n_gauss = max(degree + 2, 64)
    xg, wg = legendre.leggauss(n_gauss)
    values = legendre.legval(xg, coeffs)
    out = {"mass": abs(np.sum(wg * values) - 1.0)}
    moments = [abs(np.sum(wg * xg ** i * values)) for i in range(1, m + 1)]
    out["moments"] = max(moments) if moments else 0.0
    endpoint = 0.0
    d_coeffs = np.array(coeffs, dtype=float)
    for _ in range(k + 1):
        scale = max(1.0, np.max(np.abs(d_coeffs)))
        res = max(abs(legendre.legval(1.0, d_coeffs)),
                  abs(legendre.legval(-1.0, d_coeffs)))
        endpoint = max(endpoint, res / scale)
        d_coeffs = legendre.legder(d_coeffs)
    out["endpoint"] = endpoint
    return out


@dataclass(frozen=True)
class DeltaKernel:
    """Solved delta-approximation kernel.

    Attributes:
        m: number of vanishing moments (>= 1).
        k: order through which endpoint derivatives vanish (>= 0).
        coeffs: Legendre coefficients of P, length m+2k+3.
        epsilon: support half-width in reference coordinates, or None if
            not yet chosen.
        n_star: filter quadrature parameter 2*(ceil(m/2) + k + 1).
    """

    m: int
    k: int
    coeffs: np.ndarray
    epsilon: float | None = None
    condition_estimate: float = 0.0

    @property
    def degree(self) -> int:
        return self.m + 2 * self.k + 2

    @property
    def n_star(self) -> int:
        return 2 * ((self.m + 1) // 2 + self.k + 1)

    def with_epsilon(self, epsilon: float) -> "DeltaKernel":
        """Copy of this kernel with the support half-width set."""
        epsilon = float(epsilon)
        if not 0.0 < epsilon <= 2.0:
            raise DeltaKernelError(
                f"support half-width must lie in (0, 2], got {epsilon!r}")
        return replace(self, epsilon=epsilon)

    def eval_p(self, x) -> np.ndarray:
        """Evaluate the unscaled polynomial P at arbitrary points."""
        return legendre.legval(np.asarray(x, dtype=float), self.coeffs)


def build_kernel(m: int, k: int, epsilon: float | None = None) -> DeltaKernel:
    """Solve the defining conditions for the (m, k) kernel.

    Args:
        m: vanishing-moment count, >= 1.
        k: endpoint smoothness order, >= 0.
        epsilon: optional support half-width to attach immediately.

    Raises:
        DeltaKernelError: invalid parameters, an ill-conditioned system,
            or post-solve condition residuals above RESIDUAL_LIMIT.
    """
    if m < 1 or int(m) != m:
        raise DeltaKernelError(f"moment count m must be an integer >= 1, got {m!r}")
    if k < 0 or int(k) != k:
        raise DeltaKernelError(f"smoothness order k must be an integer >= 0, got {k!r}")
    A, b = _build_system(int(m), int(k))
    coeffs, cond = _solve_refined(A, b)
    residuals = _condition_residuals(coeffs, int(m), int(k))
    worst = max(residuals.values())
    if worst > RESIDUAL_LIMIT:
        raise DeltaKernelError(
            f"kernel ({m},{k}) solve failed verification: residuals {residuals}, "
            f"condition estimate {cond:.3e}")
    coeffs.setflags(write=False)
    kern = DeltaKernel(m=int(m), k=int(k), coeffs=coeffs,
                       condition_estimate=cond)
    if epsilon is not None:
        kern = kern.with_epsilon(epsilon)
    return kern


def support_width(N: int, N_d: float) -> float:
    """Support half-width eps = cos(pi ((N - N_d)/2) / N).

    N_d is the empirical width parameter; the result must land in (0, 2].

    Raises:
        DeltaKernelError: if the formula produces a width outside (0, 2].
    """
    if N < 1:
        raise DeltaKernelError(f"degree N must be >= 1, got {N!r}")
    eps = cos(pi * ((N - N_d) / 2.0) / N)
    if not 0.0 < eps <= 2.0:
        raise DeltaKernelError(
            f"support width eps={eps!r} from N={N}, N_d={N_d!r} "
            "is outside (0, 2]")
    return eps


def delta_eval(kernel: DeltaKernel, x) -> np.ndarray:
    """Evaluate the scaled delta approximation (1/eps) P(x/eps).

    Compactly supported: zero for |x| > eps.  Accepts scalars or arrays.
    """
    if kernel.epsilon is None:
        raise DeltaKernelError("kernel has no support half-width set")
    x_arr = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.zeros_like(x_arr)
    inside = np.abs(x_arr) <= kernel.epsilon
    if np.any(inside):
        out[inside] = kernel.eval_p(x_arr[inside] / kernel.epsilon) / kernel.epsilon
    if np.isscalar(x) or np.ndim(x) == 0:
        return float(out[0])
    return out


def kernel_from_factored_form(m: int, k: int) -> np.ndarray:
    """Independent construction oracle: P = (1 - x^2)^(k+1) Q(x), deg Q = m.

    The endpoint conditions hold identically in this form, leaving only the
    m+1 moment conditions for Q; the weight moments are Beta-function
    values.  Intended for tests (cross-checks build_kernel); returns
    Legendre coefficients of the expanded product.
    """
    from math import gamma

    def weight_moment(p: int) -> float:
        # integral of x^p (1-x^2)^(k+1) over [-1, 1]
        if p % 2 == 1:
            return 0.0
        return gamma((p + 1) / 2.0) * gamma(k + 2.0) / gamma((p + 1) / 2.0 + k + 2.0)

    M = np.array([[weight_moment(i + j) for j in range(m + 1)]
                  for i in range(m + 1)])
    rhs = np.zeros(m + 1)
    rhs[0] = 1.0
    q_mono = np.linalg.solve(M, rhs)
    # (1 - x^2)^(k+1) in monomials, exact small-integer coefficients.
    w_mono = np.zeros(2 * (k + 1) + 1)
    for j in range(k + 2):
        w_mono[2 * j] = comb(k + 1, j) * (-1.0) ** j
    p_mono = np.polynomial.polynomial.polymul(w_mono, q_mono)
    return legendre.poly2leg(p_mono)
