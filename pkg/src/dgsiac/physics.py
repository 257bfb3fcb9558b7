"""Conservation-law systems: 2D compressible Euler and ideal MHD.

Each system exposes directional fluxes, directional max wave speeds, the
Lax-Friedrichs numerical flux, and conversions between conservative and
primitive variables.  The MHD system carries a hyperbolic
divergence-cleaning scalar psi as a ninth variable: the normal-B flux slot
transports psi and the psi flux is c_h^2 B_normal, with the cleaning speed
c_h refreshed from the grid-maximal fluid wave speed every step.

Pointwise kernels are delegated to the selected backend (compiled
extension or numpy fallback).
"""

from __future__ import annotations

import math

import numpy as np

from . import backends


class AdmissibilityError(Exception):
    """A state with non-positive density or pressure was encountered.

    Attributes:
        rho_min / p_min: the offending minima.
        flat_index: index of the worst node in the flattened batch, or -1.
        context: description of where the batch came from.
    """

    def __init__(self, rho_min: float, p_min: float, flat_index: int = -1,
                 context: str = ""):
        self.rho_min = rho_min
        self.p_min = p_min
        self.flat_index = flat_index
        self.context = context
        super().__init__(
            f"inadmissible state{': ' + context if context else ''} "
            f"(min density {rho_min:.6e}, min pressure {p_min:.6e})")


def _flat(u: np.ndarray, n_vars: int) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    if u.shape[-1] != n_vars:
        raise ValueError(f"expected trailing variable axis of size {n_vars}, "
                         f"got shape {u.shape}")
    return np.ascontiguousarray(u.reshape(-1, n_vars))


class _System:
    """Shared shape handling and admissibility reporting."""

    n_vars: int = 0
    name: str = ""

    def __init__(self, gamma: float):
        if gamma <= 1.0:
            raise ValueError(f"adiabatic coefficient must exceed 1, got {gamma}")
        self.gamma = float(gamma)
        # With this flag set, flux and wave-speed evaluations tolerate
        # transient non-positive pressures mid-step: the analytic flux is
        # algebraic in p, and the speed kernels estimate the sound or
        # magnetosonic speed from |p|.  Density must stay positive
        # everywhere, pressure(check=True) remains strict, and the run
        # driver re-verifies full admissibility after each completed step.
        self.tolerate_transient_pressure = False

    # Subclasses bind these to backend kernels.
    def _kernel_flux(self, u2, axis, out):
        raise NotImplementedError

    def _kernel_speed(self, u2, axis, out):
        raise NotImplementedError

    def _kernel_lf(self, uL2, uR2, axis, fixed_lam, out):
        raise NotImplementedError

    def _kernel_pressure(self, u2, out):
        raise NotImplementedError

    def _check(self, rho_min: float, p_min: float, u2: np.ndarray,
               context: str):
        if rho_min > 0.0 and p_min > 0.0:
            return
        p = np.empty(u2.shape[0])
        self._kernel_pressure(u2, p)
        worst = int(np.argmin(np.minimum(u2[:, 0], p)))
        raise AdmissibilityError(rho_min, p_min, worst, context)

    def pressure(self, u: np.ndarray, context: str = "",
                 check: bool = True) -> np.ndarray:
        u2 = _flat(u, self.n_vars)
        out = np.empty(u2.shape[0])
        rho_min, p_min = self._kernel_pressure(u2, out)
        if check:
            self._check(rho_min, p_min, u2, context)
        return out.reshape(np.asarray(u).shape[:-1])

    def flux(self, u: np.ndarray, axis: int, context: str = "") -> np.ndarray:
        """Directional analytic flux; axis 0 = x, 1 = y.

        Raises:
            AdmissibilityError: non-positive density, or non-positive
                pressure unless tolerate_transient_pressure is set.
        """
        u2 = _flat(u, self.n_vars)
        out = np.empty_like(u2)
        rho_min, p_min = self._kernel_flux(u2, axis, out)
        if self.tolerate_transient_pressure and rho_min > 0.0:
            return out.reshape(np.asarray(u).shape)
        self._check(rho_min, p_min, u2, context)
        return out.reshape(np.asarray(u).shape)

    def max_wave_speed(self, u: np.ndarray, axis: int,
                       context: str = "") -> np.ndarray:
        """Directional bound on the flux Jacobian's spectral radius.

        In transient-tolerant mode a non-positive pressure yields the
        |p|-based speed estimate instead of raising.
        """
        u2 = _flat(u, self.n_vars)
        out = np.empty(u2.shape[0])
        rho_min, p_min = self._kernel_speed(u2, axis, out)
        if self.tolerate_transient_pressure and rho_min > 0.0:
            return out.reshape(np.asarray(u).shape[:-1])
        self._check(rho_min, p_min, u2, context)
        return out.reshape(np.asarray(u).shape[:-1])

    def lax_friedrichs(self, uL: np.ndarray, uR: np.ndarray, axis: int,
                       fixed_lam: float = 0.0, context: str = "") -> np.ndarray:
        """Numerical interface flux (fL + fR)/2 - lam (uR - uL)/2.

        lam is the larger of the two traces' directional wave speeds
        unless fixed_lam > 0 pins it (global-dissipation variant).  In
        transient-tolerant mode a pressure dip in either trace is carried
        through with the |p|-based speed estimate.
        """
        uL2 = _flat(uL, self.n_vars)
        uR2 = _flat(uR, self.n_vars)
        out = np.empty_like(uL2)
        rho_min, p_min = self._kernel_lf(uL2, uR2, axis, fixed_lam, out)
        if self.tolerate_transient_pressure and rho_min > 0.0:
            return out.reshape(np.asarray(uL).shape)
        if rho_min <= 0.0 or p_min <= 0.0:
            # Attribute the failure to whichever trace is worse.
            for side, u2 in (("left/bottom trace", uL2), ("right/top trace", uR2)):
                p = np.empty(u2.shape[0])
                r_min, pp_min = self._kernel_pressure(u2, p)
                if r_min <= 0.0 or pp_min <= 0.0:
                    self._check(r_min, pp_min, u2, f"{context} [{side}]".strip())
            self._check(rho_min, p_min, uL2, context)
        return out.reshape(np.asarray(uL).shape)

    def indicator_values(self, u: np.ndarray, variable: str,
                         check: bool = True) -> np.ndarray:
        """Extract the shock-indicator variable from conserved data.

        With check=False an inadmissible state yields indicator values
        without raising (used on filter candidates that may never be
        blended in).
        """
        if variable == "density":
            return np.asarray(u)[..., 0]
        if variable == "pressure":
            return self.pressure(u, context="indicator", check=check)
        raise ValueError(f"unknown indicator variable {variable!r}")


class Euler2D(_System):
    """Compressible Euler equations, conserved (rho, rho v1, rho v2, rho e)."""

    n_vars = 4
    name = "euler"
    var_names = ("rho", "rho_v1", "rho_v2", "rho_e")
    prim_names = ("rho", "v1", "v2", "p")

    def _kernel_flux(self, u2, axis, out):
        return backends.euler_flux(u2, self.gamma, axis, out)

    def _kernel_speed(self, u2, axis, out):
        return backends.euler_speed(u2, self.gamma, axis, out)

    def _kernel_lf(self, uL2, uR2, axis, fixed_lam, out):
        return backends.euler_lf(uL2, uR2, self.gamma, axis, fixed_lam, out)

    def _kernel_pressure(self, u2, out):
        return backends.euler_pressure(u2, self.gamma, out)

    def primitive_to_conservative(self, prim: np.ndarray) -> np.ndarray:
        """(rho, v1, v2, p) -> conserved, with rho e = p/(gamma-1) + rho|v|^2/2."""
        prim = np.asarray(prim, dtype=float)
        rho, v1, v2, p = (prim[..., i] for i in range(4))
        if np.any(rho <= 0.0) or np.any(p <= 0.0):
            raise AdmissibilityError(float(rho.min()), float(p.min()),
                                     context="primitive input")
        u = np.empty_like(prim)
        u[..., 0] = rho
        u[..., 1] = rho * v1
        u[..., 2] = rho * v2
        u[..., 3] = p / (self.gamma - 1.0) + 0.5 * rho * (v1 ** 2 + v2 ** 2)
        return u

    def conservative_to_primitive(self, u: np.ndarray,
                                  check: bool = True) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        p = self.pressure(u, context="conservative input", check=check)
        prim = np.empty_like(u)
        prim[..., 0] = u[..., 0]
        prim[..., 1] = u[..., 1] / u[..., 0]
        prim[..., 2] = u[..., 2] / u[..., 0]
        prim[..., 3] = p
        return prim

    def mirror(self, trace: np.ndarray, axis: int) -> np.ndarray:
        """Reflecting-wall exterior trace: normal momentum negated."""
        out = np.array(trace, copy=True)
        out[..., 1 + axis] *= -1.0
        return out


class IdealMHD2D(_System):
    """Ideal MHD with a cleaning scalar.

    Conserved order: (rho, rho v1, rho v2, rho v3, rho e, B1, B2, B3, psi).
    The cleaning speed c_h is state on the system object; it defaults to 0
    (plain MHD flux) and is refreshed per step via glm_source_and_speed.
    """

    n_vars = 9
    name = "mhd"
    var_names = ("rho", "rho_v1", "rho_v2", "rho_v3", "rho_e",
                 "B1", "B2", "B3", "psi")
    prim_names = ("rho", "v1", "v2", "v3", "p", "B1", "B2", "B3", "psi")
    psi_index = 8

    def __init__(self, gamma: float, damping_ratio: float = 0.18,
                 damping_enabled: bool = True):
        super().__init__(gamma)
        self.c_h = 0.0
        self.damping_ratio = float(damping_ratio)
        self.damping_enabled = bool(damping_enabled)

    def _kernel_flux(self, u2, axis, out):
        return backends.mhd_flux(u2, self.gamma, self.c_h, axis, out)

    def _kernel_speed(self, u2, axis, out):
        return backends.mhd_speed(u2, self.gamma, self.c_h, axis, out)

    def _kernel_lf(self, uL2, uR2, axis, fixed_lam, out):
        return backends.mhd_lf(uL2, uR2, self.gamma, self.c_h, axis,
                               fixed_lam, out)

    def _kernel_pressure(self, u2, out):
        return backends.mhd_pressure(u2, self.gamma, out)

    def primitive_to_conservative(self, prim: np.ndarray) -> np.ndarray:
        """(rho, v1, v2, v3, p, B1, B2, B3, psi) -> conserved."""
        prim = np.asarray(prim, dtype=float)
        rho = prim[..., 0]
        p = prim[..., 4]
        if np.any(rho <= 0.0) or np.any(p <= 0.0):
            raise AdmissibilityError(float(rho.min()), float(p.min()),
                                     context="primitive input")
        u = np.empty_like(prim)
        u[..., 0] = rho
        for c in range(3):
            u[..., 1 + c] = rho * prim[..., 1 + c]
        v_sq = prim[..., 1] ** 2 + prim[..., 2] ** 2 + prim[..., 3] ** 2
        b_sq = prim[..., 5] ** 2 + prim[..., 6] ** 2 + prim[..., 7] ** 2
        u[..., 4] = p / (self.gamma - 1.0) + 0.5 * rho * v_sq + 0.5 * b_sq
        u[..., 5:9] = prim[..., 5:9]
        return u

    def conservative_to_primitive(self, u: np.ndarray,
                                  check: bool = True) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        p = self.pressure(u, context="conservative input", check=check)
        prim = np.empty_like(u)
        prim[..., 0] = u[..., 0]
        for c in range(3):
            prim[..., 1 + c] = u[..., 1 + c] / u[..., 0]
        prim[..., 4] = p
        prim[..., 5:9] = u[..., 5:9]
        return prim

    def mirror(self, trace: np.ndarray, axis: int) -> np.ndarray:
        """Conducting-wall trace: normal momentum and normal B negated."""
        out = np.array(trace, copy=True)
        out[..., 1 + axis] *= -1.0
        out[..., 5 + axis] *= -1.0
        return out

    def fluid_max_speed(self, u: np.ndarray) -> float:
        """Grid-maximal directional fluid speed, cleaning speed excluded."""
        saved = self.c_h
        self.c_h = 0.0
        try:
            sx = self.max_wave_speed(u, 0, context="cleaning-speed scan")
            sy = self.max_wave_speed(u, 1, context="cleaning-speed scan")
        finally:
            self.c_h = saved
        return float(max(sx.max(), sy.max()))

    def glm_source_and_speed(self, u: np.ndarray, dt: float):
        """Refresh c_h from the field and return the psi damping factor.

        c_h is set to the grid-maximal fluid wave speed so the cleaning
        waves respect the existing CFL limit.  The damping factor
        exp(-dt c_h / c_r) implements the mixed parabolic correction with
        ratio c_r = c_p^2 / c_h; factor 1.0 when damping is disabled.
        """
        self.c_h = self.fluid_max_speed(u)
        if not self.damping_enabled or self.c_h == 0.0 or dt <= 0.0:
            return self.c_h, 1.0
        return self.c_h, math.exp(-dt * self.c_h / self.damping_ratio)


def make_system(name: str, gamma: float, **kwargs):
    """Factory: 'euler' or 'mhd'."""
    if name == "euler":
        return Euler2D(gamma)
    if name == "mhd":
        return IdealMHD2D(gamma, **kwargs)
    raise ValueError(f"unknown physics system {name!r}")
