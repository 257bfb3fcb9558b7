# cython: boundscheck=False, wraparound=False, cdivision=True
# cython: language_level=3
"""Compiled pointwise physics kernels.

Signature-for-signature mirror of the pure-numpy module in this package:
flux evaluation, directional wave speeds, and the Lax-Friedrichs numerical
flux for the Euler system (4 variables) and ideal MHD with a
divergence-cleaning scalar (9 variables).  Arithmetic is ordered exactly
as in the numpy version so both backends agree to rounding.

All kernels take C-contiguous (M, n_vars) float64 arrays, write results
into a preallocated output, and return (rho_min, p_min).
"""

from libc.math cimport INFINITY, fabs, sqrt


# ---------------------------------------------------------------------------
# Euler (4 conserved variables)
# ---------------------------------------------------------------------------

cdef inline double _euler_prim(const double* u, double gamma,
                               double* v1, double* v2) noexcept nogil:
    """Velocity components via out-params; returns the pressure."""
    cdef double inv_rho = 1.0 / u[0]
    v1[0] = u[1] * inv_rho
    v2[0] = u[2] * inv_rho
    cdef double kinetic = 0.5 * (u[1] * v1[0] + u[2] * v2[0])
    return (gamma - 1.0) * (u[3] - kinetic)


def euler_pressure(double[:, ::1] u, double gamma, double[::1] out):
    cdef Py_ssize_t i, m = u.shape[0]
    cdef double v1, v2, p
    cdef double rmin = INFINITY, pmin = INFINITY
    for i in range(m):
        p = _euler_prim(&u[i, 0], gamma, &v1, &v2)
        out[i] = p
        if u[i, 0] < rmin:
            rmin = u[i, 0]
        if p < pmin:
            pmin = p
    return rmin, pmin


cdef inline double _euler_flux_row(const double* u, double gamma, int axis,
                                   double* f) noexcept nogil:
    """Writes the directional flux row; returns the pressure."""
    cdef double v1, v2, vn
    cdef double p = _euler_prim(u, gamma, &v1, &v2)
    vn = v1 if axis == 0 else v2
    f[0] = u[0] * vn
    f[1] = u[1] * vn
    f[2] = u[2] * vn
    if axis == 0:
        f[1] += p
    else:
        f[2] += p
    f[3] = vn * (u[3] + p)
    return p


def euler_flux(double[:, ::1] u, double gamma, int axis,
               double[:, ::1] out):
    cdef Py_ssize_t i, m = u.shape[0]
    cdef double p
    cdef double rmin = INFINITY, pmin = INFINITY
    for i in range(m):
        p = _euler_flux_row(&u[i, 0], gamma, axis, &out[i, 0])
        if u[i, 0] < rmin:
            rmin = u[i, 0]
        if p < pmin:
            pmin = p
    return rmin, pmin


cdef inline double _euler_speed_row(const double* u, double gamma, int axis,
                                    double* p_out) noexcept nogil:
    cdef double v1, v2, vn
    cdef double p = _euler_prim(u, gamma, &v1, &v2)
    vn = v1 if axis == 0 else v2
    p_out[0] = p
    return fabs(vn) + sqrt(fabs(gamma * p / u[0]))


def euler_speed(double[:, ::1] u, double gamma, int axis, double[::1] out):
    cdef Py_ssize_t i, m = u.shape[0]
    cdef double p
    cdef double rmin = INFINITY, pmin = INFINITY
    for i in range(m):
        out[i] = _euler_speed_row(&u[i, 0], gamma, axis, &p)
        if u[i, 0] < rmin:
            rmin = u[i, 0]
        if p < pmin:
            pmin = p
    return rmin, pmin


def euler_lf(double[:, ::1] uL, double[:, ::1] uR, double gamma, int axis,
             double fixed_lam, double[:, ::1] out):
    cdef Py_ssize_t i, v, m = uL.shape[0]
    cdef double fL[4]
    cdef double fR[4]
    cdef double pL, pR, sL, sR, lam, vdum
    cdef double rmin = INFINITY, pmin = INFINITY
    for i in range(m):
        pL = _euler_flux_row(&uL[i, 0], gamma, axis, fL)
        pR = _euler_flux_row(&uR[i, 0], gamma, axis, fR)
        if fixed_lam > 0.0:
            lam = fixed_lam
        else:
            sL = _euler_speed_row(&uL[i, 0], gamma, axis, &vdum)
            sR = _euler_speed_row(&uR[i, 0], gamma, axis, &vdum)
            lam = sL if sL > sR else sR
        for v in range(4):
            out[i, v] = 0.5 * (fL[v] + fR[v]) \
                - 0.5 * lam * (uR[i, v] - uL[i, v])
        if uL[i, 0] < rmin:
            rmin = uL[i, 0]
        if uR[i, 0] < rmin:
            rmin = uR[i, 0]
        if pL < pmin:
            pmin = pL
        if pR < pmin:
            pmin = pR
    return rmin, pmin


# ---------------------------------------------------------------------------
# Ideal MHD with divergence-cleaning scalar (9 conserved variables)
# ---------------------------------------------------------------------------

cdef inline double _mhd_prim(const double* u, double gamma, double* v1,
                             double* v2, double* v3,
                             double* b_sq) noexcept nogil:
    """Velocities and |B|^2 via out-params; returns the pressure."""
    cdef double inv_rho = 1.0 / u[0]
    v1[0] = u[1] * inv_rho
    v2[0] = u[2] * inv_rho
    v3[0] = u[3] * inv_rho
    cdef double kinetic = 0.5 * (u[1] * v1[0] + u[2] * v2[0] + u[3] * v3[0])
    b_sq[0] = u[5] * u[5] + u[6] * u[6] + u[7] * u[7]
    return (gamma - 1.0) * (u[4] - kinetic - 0.5 * b_sq[0])


def mhd_pressure(double[:, ::1] u, double gamma, double[::1] out):
    cdef Py_ssize_t i, m = u.shape[0]
    cdef double v1, v2, v3, b_sq, p
    cdef double rmin = INFINITY, pmin = INFINITY
    for i in range(m):
        p = _mhd_prim(&u[i, 0], gamma, &v1, &v2, &v3, &b_sq)
        out[i] = p
        if u[i, 0] < rmin:
            rmin = u[i, 0]
        if p < pmin:
            pmin = p
    return rmin, pmin


cdef inline double _mhd_flux_row(const double* u, double gamma, double ch,
                                 int axis, double* f) noexcept nogil:
    cdef double v1, v2, v3, b_sq
    cdef double p = _mhd_prim(u, gamma, &v1, &v2, &v3, &b_sq)
    cdef double ptot = p + 0.5 * b_sq
    cdef double vdotB = v1 * u[5] + v2 * u[6] + v3 * u[7]
    cdef double vn, Bn
    if axis == 0:
        vn = v1
        Bn = u[5]
    else:
        vn = v2
        Bn = u[6]
    f[0] = u[0] * vn
    f[1] = u[1] * vn - Bn * u[5]
    f[2] = u[2] * vn - Bn * u[6]
    f[3] = u[3] * vn - Bn * u[7]
    if axis == 0:
        f[1] += ptot
    else:
        f[2] += ptot
    f[4] = vn * (u[4] + ptot) - Bn * vdotB
    if axis == 0:
        f[5] = u[8]
        f[6] = vn * u[6] - v2 * Bn
    else:
        f[5] = vn * u[5] - v1 * Bn
        f[6] = u[8]
    f[7] = vn * u[7] - v3 * Bn
    f[8] = ch * ch * Bn
    return p


def mhd_flux(double[:, ::1] u, double gamma, double ch, int axis,
             double[:, ::1] out):
    cdef Py_ssize_t i, m = u.shape[0]
    cdef double p
    cdef double rmin = INFINITY, pmin = INFINITY
    for i in range(m):
        p = _mhd_flux_row(&u[i, 0], gamma, ch, axis, &out[i, 0])
        if u[i, 0] < rmin:
            rmin = u[i, 0]
        if p < pmin:
            pmin = p
    return rmin, pmin


cdef inline double _mhd_speed_row(const double* u, double gamma, double ch,
                                  int axis, double* p_out) noexcept nogil:
    cdef double v1, v2, v3, b_sq
    cdef double p = _mhd_prim(u, gamma, &v1, &v2, &v3, &b_sq)
    cdef double inv_rho = 1.0 / u[0]
    cdef double a_sq = gamma * p * inv_rho
    cdef double b_all = b_sq * inv_rho
    cdef double Bn = u[5] if axis == 0 else u[6]
    cdef double bn_sq = Bn * Bn * inv_rho
    cdef double s = a_sq + b_all
    cdef double disc = sqrt(fabs(s * s - 4.0 * a_sq * bn_sq))
    cdef double cf = sqrt(fabs(0.5 * (s + disc)))
    cdef double vn = v1 if axis == 0 else v2
    cdef double speed = fabs(vn) + cf
    p_out[0] = p
    if ch > 0.0 and speed < ch:
        speed = ch
    return speed


def mhd_speed(double[:, ::1] u, double gamma, double ch, int axis,
              double[::1] out):
    cdef Py_ssize_t i, m = u.shape[0]
    cdef double p
    cdef double rmin = INFINITY, pmin = INFINITY
    for i in range(m):
        out[i] = _mhd_speed_row(&u[i, 0], gamma, ch, axis, &p)
        if u[i, 0] < rmin:
            rmin = u[i, 0]
        if p < pmin:
            pmin = p
    return rmin, pmin


def mhd_lf(double[:, ::1] uL, double[:, ::1] uR, double gamma, double ch,
           int axis, double fixed_lam, double[:, ::1] out):
    cdef Py_ssize_t i, v, m = uL.shape[0]
    cdef double fL[9]
    cdef double fR[9]
    cdef double pL, pR, sL, sR, lam, vdum
    cdef double rmin = INFINITY, pmin = INFINITY
    for i in range(m):
        pL = _mhd_flux_row(&uL[i, 0], gamma, ch, axis, fL)
        pR = _mhd_flux_row(&uR[i, 0], gamma, ch, axis, fR)
        if fixed_lam > 0.0:
            lam = fixed_lam
        else:
            sL = _mhd_speed_row(&uL[i, 0], gamma, ch, axis, &vdum)
            sR = _mhd_speed_row(&uR[i, 0], gamma, ch, axis, &vdum)
            lam = sL if sL > sR else sR
        for v in range(9):
            out[i, v] = 0.5 * (fL[v] + fR[v]) \
                - 0.5 * lam * (uR[i, v] - uL[i, v])
        if uL[i, 0] < rmin:
            rmin = uL[i, 0]
        if uR[i, 0] < rmin:
            rmin = uR[i, 0]
        if pL < pmin:
            pmin = pL
        if pR < pmin:
            pmin = pR
    return rmin, pmin
