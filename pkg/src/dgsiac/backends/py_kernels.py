"""Pure-numpy implementations of the pointwise physics kernels.

These are the hot inner loops of the solver: flux evaluation, directional
wave speeds, and the Lax-Friedrichs numerical flux, for the Euler system
(4 variables) and ideal MHD with a divergence-cleaning scalar
(9 variables).  A compiled extension with identical signatures may replace
this module at import time; parity tests pin the two to the same results.

All kernels take C-contiguous (M, n_vars) float64 arrays, write results
into a preallocated output, and return (rho_min, p_min) so the caller can
detect inadmissible states without a second pass.
"""

from __future__ import annotations

import numpy as np


def _euler_pv(u: np.ndarray, gamma: float):
    rho = u[:, 0]
    inv_rho = 1.0 / rho
    v1 = u[:, 1] * inv_rho
    v2 = u[:, 2] * inv_rho
    kinetic = 0.5 * (u[:, 1] * v1 + u[:, 2] * v2)
    p = (gamma - 1.0) * (u[:, 3] - kinetic)
    return rho, v1, v2, p


def euler_pressure(u: np.ndarray, gamma: float, out: np.ndarray):
    rho, _, _, p = _euler_pv(u, gamma)
    out[:] = p
    return float(rho.min()), float(p.min())


def euler_flux(u: np.ndarray, gamma: float, axis: int, out: np.ndarray):
    """Directional flux of the Euler system; axis 0 = x, 1 = y."""
    rho, v1, v2, p = _euler_pv(u, gamma)
    vn = v1 if axis == 0 else v2
    out[:, 0] = rho * vn
    out[:, 1] = u[:, 1] * vn
    out[:, 2] = u[:, 2] * vn
    if axis == 0:
        out[:, 1] += p
    else:
        out[:, 2] += p
    out[:, 3] = vn * (u[:, 3] + p)
    return float(rho.min()), float(p.min())


def euler_speed(u: np.ndarray, gamma: float, axis: int, out: np.ndarray):
    """|v_n| + sound speed."""
    rho, v1, v2, p = _euler_pv(u, gamma)
    vn = v1 if axis == 0 else v2
    with np.errstate(invalid="ignore"):
        out[:] = np.abs(vn) + np.sqrt(np.abs(gamma * p / rho))
    return float(rho.min()), float(p.min())


def euler_lf(uL: np.ndarray, uR: np.ndarray, gamma: float, axis: int,
             fixed_lam: float, out: np.ndarray):
    """Lax-Friedrichs flux (fL + fR)/2 - lam (uR - uL)/2.

    fixed_lam > 0 pins the dissipation speed (global variant); otherwise
    lam is the larger of the two states' directional speeds (local).
    """
    fL = np.empty_like(uL)
    fR = np.empty_like(uR)
    rL, pL = euler_flux(uL, gamma, axis, fL)
    rR, pR = euler_flux(uR, gamma, axis, fR)
    if fixed_lam > 0.0:
        lam = fixed_lam
    else:
        sL = np.empty(uL.shape[0])
        sR = np.empty(uR.shape[0])
        euler_speed(uL, gamma, axis, sL)
        euler_speed(uR, gamma, axis, sR)
        lam = np.maximum(sL, sR)[:, None]
    out[:] = 0.5 * (fL + fR) - 0.5 * lam * (uR - uL)
    return min(rL, rR), min(pL, pR)


def _mhd_pv(u: np.ndarray, gamma: float):
    rho = u[:, 0]
    inv_rho = 1.0 / rho
    v1 = u[:, 1] * inv_rho
    v2 = u[:, 2] * inv_rho
    v3 = u[:, 3] * inv_rho
    kinetic = 0.5 * (u[:, 1] * v1 + u[:, 2] * v2 + u[:, 3] * v3)
    b_sq = u[:, 5] ** 2 + u[:, 6] ** 2 + u[:, 7] ** 2
    p = (gamma - 1.0) * (u[:, 4] - kinetic - 0.5 * b_sq)
    return rho, v1, v2, v3, p, b_sq


def mhd_pressure(u: np.ndarray, gamma: float, out: np.ndarray):
    rho, _, _, _, p, _ = _mhd_pv(u, gamma)
    out[:] = p
    return float(rho.min()), float(p.min())


def mhd_flux(u: np.ndarray, gamma: float, ch: float, axis: int,
             out: np.ndarray):
    """Directional ideal-MHD flux with divergence-cleaning coupling.

    The normal magnetic-field slot carries the cleaning scalar psi and the
    psi slot carries ch^2 * B_normal; with ch = 0 and psi = 0 these reduce
    to the plain ideal-MHD flux (zero in the normal-B slot).
    """
    rho, v1, v2, v3, p, b_sq = _mhd_pv(u, gamma)
    B1, B2, B3, psi = u[:, 5], u[:, 6], u[:, 7], u[:, 8]
    ptot = p + 0.5 * b_sq
    vdotB = v1 * B1 + v2 * B2 + v3 * B3
    if axis == 0:
        vn, Bn = v1, B1
    else:
        vn, Bn = v2, B2
    out[:, 0] = rho * vn
    out[:, 1] = u[:, 1] * vn - Bn * B1
    out[:, 2] = u[:, 2] * vn - Bn * B2
    out[:, 3] = u[:, 3] * vn - Bn * B3
    if axis == 0:
        out[:, 1] += ptot
    else:
        out[:, 2] += ptot
    out[:, 4] = vn * (u[:, 4] + ptot) - Bn * vdotB
    out[:, 5] = vn * B1 - v1 * Bn
    out[:, 6] = vn * B2 - v2 * Bn
    out[:, 7] = vn * B3 - v3 * Bn
    if axis == 0:
        out[:, 5] = psi
    else:
        out[:, 6] = psi
    out[:, 8] = ch * ch * Bn
    return float(rho.min()), float(p.min())


def mhd_speed(u: np.ndarray, gamma: float, ch: float, axis: int,
              out: np.ndarray):
    """|v_n| + fast magnetosonic speed, floored by the cleaning speed ch.

    c_f^2 = ((a^2 + b^2) + sqrt((a^2 + b^2)^2 - 4 a^2 b_n^2)) / 2 with
    a the sound speed, b^2 = |B|^2 / rho and b_n the normal component.
    """
    rho, v1, v2, v3, p, b_sq = _mhd_pv(u, gamma)
    inv_rho = 1.0 / rho
    a_sq = gamma * p * inv_rho
    b_all = b_sq * inv_rho
    Bn = u[:, 5] if axis == 0 else u[:, 6]
    bn_sq = Bn * Bn * inv_rho
    s = a_sq + b_all
    with np.errstate(invalid="ignore"):
        disc = np.sqrt(np.abs(s * s - 4.0 * a_sq * bn_sq))
        cf = np.sqrt(np.abs(0.5 * (s + disc)))
    vn = v1 if axis == 0 else v2
    out[:] = np.abs(vn) + cf
    if ch > 0.0:
        np.maximum(out, ch, out=out)
    return float(rho.min()), float(p.min())


def mhd_lf(uL: np.ndarray, uR: np.ndarray, gamma: float, ch: float,
           axis: int, fixed_lam: float, out: np.ndarray):
    """Lax-Friedrichs flux for MHD; see euler_lf."""
    fL = np.empty_like(uL)
    fR = np.empty_like(uR)
    rL, pL = mhd_flux(uL, gamma, ch, axis, fL)
    rR, pR = mhd_flux(uR, gamma, ch, axis, fR)
    if fixed_lam > 0.0:
        lam = fixed_lam
    else:
        sL = np.empty(uL.shape[0])
        sR = np.empty(uR.shape[0])
        mhd_speed(uL, gamma, ch, axis, sL)
        mhd_speed(uR, gamma, ch, axis, sR)
        lam = np.maximum(sL, sR)[:, None]
    out[:] = 0.5 * (fL + fR) - 0.5 * lam * (uR - uL)
    return min(rL, rR), min(pL, pR)
