"""Smoothing filter: matrix assembly, neighbor handling, indicator, blending."""

from __future__ import annotations

import numpy as np
import numpy.testing as npt
import pytest
import scipy.integrate

from dgsiac.bcs import (
    BoundarySet,
    Dirichlet,
    Outflow,
    Reflecting,
    periodic_box,
)
from dgsiac.kernel import build_kernel, support_width
from dgsiac.mesh import CartesianMesh
from dgsiac.refelem import ReferenceElement, lagrange_eval
from dgsiac.siacfilter import (
    AdaptiveFilterSettings,
    FilterError,
    blend,
    blend_parameter,
    build_multi_element_matrices,
    build_single_element_matrix,
    filter_element_1d,
    filter_field_2d,
    ghost_elements,
    indicator_field,
    normalized_threshold_check,
    quad_point_count,
    shock_indicator,
)


@pytest.fixture(scope="module")
def filt36():
    """Degree-7 filter with the (3, 6) kernel at its benchmark width."""
    ref = ReferenceElement(7)
    kern = build_kernel(3, 6, epsilon=support_width(7, 2.5))
    return build_multi_element_matrices(ref, kern)


def test_quad_point_count_floor_and_bump():
    ref_n = 7
    kern = build_kernel(3, 6)
    # Base rule: n_star + 1 points with n_star = 2(ceil(m/2) + k + 1).
    assert kern.n_star == 18
    assert quad_point_count(kern, ref_n) == 19
    # Even m at extreme degree: the exactness requirement takes over.
    kern2 = build_kernel(2, 1)
    needed = -(-(15 + kern2.degree + 3) // 2)
    assert quad_point_count(kern2, 15) == max(kern2.n_star + 1, needed)


def test_row_sums_unity(filt36):
    npt.assert_allclose(filt36.row_sums(), 1.0, atol=1e-13)


@pytest.mark.parametrize("m,k,n_d,N", [(1, 5, 0.8, 4), (3, 6, 2.5, 7),
                                       (5, 7, 4.5, 7), (1, 6, 0.8, 7)])
def test_row_sums_unity_across_configs(m, k, n_d, N):
    ref = ReferenceElement(N)
    kern = build_kernel(m, k, epsilon=support_width(N, n_d))
    filt = build_multi_element_matrices(ref, kern)
    npt.assert_allclose(filt.row_sums(), 1.0, atol=1e-13)


def test_blocks_immutable(filt36):
    with pytest.raises(ValueError):
        filt36.phi_center[0, 0] = 0.0


def test_polynomial_reproduction_1d(filt36):
    """Kernels with m vanishing moments reproduce polynomials through
    degree m across element boundaries."""
    ref = filt36.ref
    for coeffs in ([0.7], [0.2, -1.3], [0.1, 0.4, -0.9], [0.0, 0.3, 0.0, 1.1]):
        poly = np.polynomial.Polynomial(coeffs)
        u_left = poly(ref.nodes - 2.0)
        u_center = poly(ref.nodes)
        u_right = poly(ref.nodes + 2.0)
        filtered = filter_element_1d(filt36, u_left, u_center, u_right)
        npt.assert_allclose(filtered, u_center, rtol=1e-11, atol=1e-11)


def test_degree_above_moments_not_reproduced(filt36):
    """Degree m+1 data (even, so moment parity cannot save it) must change:
    the filter is a genuine smoother, not an identity."""
    ref = filt36.ref
    poly = np.polynomial.Polynomial([0.0, 0.0, 0.0, 0.0, 1.0])  # x^4, m = 3
    filtered = filter_element_1d(filt36, poly(ref.nodes - 2.0),
                                 poly(ref.nodes), poly(ref.nodes + 2.0))
    assert np.max(np.abs(filtered - poly(ref.nodes))) > 1e-8


def test_reflection_symmetry(filt36):
    """Filtering mirrored data equals mirroring filtered data, which pins
    the left/right block pairing: phi_left = J phi_right J."""
    J = np.eye(filt36.ref.n_nodes)[::-1]
    npt.assert_allclose(filt36.phi_left, J @ filt36.phi_right @ J, atol=1e-14)
    npt.assert_allclose(filt36.phi_center, J @ filt36.phi_center @ J,
                        atol=1e-14)


def test_interior_rows_match_single_element_matrix(filt36):
    """Rows whose stencil stays inside the element agree with the
    single-domain matrix, and their neighbor blocks vanish."""
    ref = filt36.ref
    eps = filt36.kernel.epsilon
    single = build_single_element_matrix(ref, filt36.kernel)
    interior = [i for i, xi in enumerate(ref.nodes)
                if xi - eps >= -1.0 and xi + eps <= 1.0]
    assert interior, "width leaves no interior rows; pick a smaller eps"
    for i in interior:
        npt.assert_allclose(filt36.phi_center[i], single[i], atol=1e-12)
        npt.assert_allclose(filt36.phi_left[i], 0.0, atol=1e-14)
        npt.assert_allclose(filt36.phi_right[i], 0.0, atol=1e-14)


def test_blocks_match_adaptive_quadrature():
    """Entry-level oracle: every block entry equals the brute-force
    integral of kernel times (shifted) basis polynomial, via scipy.quad."""
    ref = ReferenceElement(4)
    kern = build_kernel(1, 3, epsilon=0.55)
    filt = build_multi_element_matrices(ref, kern)
    eps = kern.epsilon

    def entry(i, j, lo, hi, shift):
        a = max(ref.nodes[i] - eps, lo)
        b = min(ref.nodes[i] + eps, hi)
        if b - a <= 1e-14:
            return 0.0

        def integrand(tau):
            dval = kern.eval_p((ref.nodes[i] - tau) / eps) / eps
            return dval * lagrange_eval(ref.nodes, j, tau + shift)

        val, _ = scipy.integrate.quad(integrand, a, b, epsabs=1e-13,
                                      epsrel=1e-13, limit=200)
        return val

    for name, block, (lo, hi, shift) in (
            ("left", filt.phi_left, (-3.0, -1.0, 2.0)),
            ("center", filt.phi_center, (-1.0, 1.0, 0.0)),
            ("right", filt.phi_right, (1.0, 3.0, -2.0))):
        for i in range(ref.n_nodes):
            for j in range(ref.n_nodes):
                expected = entry(i, j, lo, hi, shift)
                assert abs(block[i, j] - expected) <= 1e-11, (
                    f"{name}[{i},{j}]: {block[i, j]} vs quad {expected}")


def test_build_rejects_overwide_stencil():
    ref = ReferenceElement(3)
    kern = build_kernel(1, 2)
    with pytest.raises(FilterError):
        build_multi_element_matrices(ref, kern)  # no width attached
    # eps = 2 exactly reaches the neighbors' far edges and is still legal.
    filt = build_multi_element_matrices(ref, kern.with_epsilon(2.0))
    npt.assert_allclose(filt.row_sums(), 1.0, atol=1e-12)
    # `with_epsilon` itself rejects eps > 2, so the overflow guard in the
    # assembly is exercised through a hand-built kernel copy.
    import dataclasses
    wide = dataclasses.replace(kern, epsilon=2.5)
    with pytest.raises(FilterError):
        build_multi_element_matrices(ref, wide)


def test_filter_field_2d_reproduces_bilinear_with_dirichlet_ghosts():
    """x- then y-pass on a bilinear field is exact when the boundary
    extension continues the polynomial."""
    ref = ReferenceElement(5)
    kern = build_kernel(1, 5, epsilon=support_width(5, 1.2))
    filt = build_multi_element_matrices(ref, kern)
    mesh = CartesianMesh((0.0, 1.0), (-0.5, 0.5), 4, 3)

    def field(x, y):
        return 0.4 - 0.3 * x + 0.8 * y + 0.5 * x * y

    def state(x, y, t):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        return field(x, y)[..., None]

    bcs = BoundarySet(left=Dirichlet(state), right=Dirichlet(state),
                      bottom=Dirichlet(state), top=Dirichlet(state))
    X, Y = mesh.node_coords(ref.nodes)
    u = field(X, Y)[..., None]
    filtered = filter_field_2d(filt, u, mesh, bcs, 0.0)
    npt.assert_allclose(filtered, u, rtol=1e-10, atol=1e-10)


def test_filter_field_2d_constant_periodic():
    ref = ReferenceElement(4)
    kern = build_kernel(1, 4, epsilon=0.9)
    filt = build_multi_element_matrices(ref, kern)
    mesh = CartesianMesh((0.0, 1.0), (0.0, 1.0), 3, 3)
    u = np.full((mesh.n_elem, 5, 5, 2), 1.75)
    filtered = filter_field_2d(filt, u, mesh, periodic_box(), 0.0)
    npt.assert_allclose(filtered, u, rtol=1e-13)


def test_filter_field_2d_periodic_translation_equivariance():
    """On a periodic mesh the filter commutes with shifting the data by a
    whole element."""
    ref = ReferenceElement(4)
    kern = build_kernel(3, 6, epsilon=1.1)
    filt = build_multi_element_matrices(ref, kern)
    mesh = CartesianMesh((0.0, 1.0), (0.0, 1.0), 4, 4)
    X, Y = mesh.node_coords(ref.nodes)
    rng = np.random.default_rng(11)
    u = np.sin(2 * np.pi * X) * np.cos(4 * np.pi * Y) + 0.1 * np.sin(6 * np.pi * X)
    u = u[..., None]
    grid = u.reshape(4, 4, 5, 5, 1)           # (row, col, i, j, var)
    shifted = np.roll(grid, 1, axis=1).reshape(u.shape)
    f_plain = filter_field_2d(filt, u, mesh, periodic_box(), 0.0)
    f_shift = filter_field_2d(filt, shifted, mesh, periodic_box(), 0.0)
    expected = np.roll(f_plain.reshape(4, 4, 5, 5, 1), 1, axis=1)
    npt.assert_allclose(f_shift, expected.reshape(u.shape), atol=1e-13)


def test_ghost_elements_outflow_copies_boundary():
    ref = ReferenceElement(3)
    mesh = CartesianMesh((0.0, 1.0), (0.0, 1.0), 3, 2)
    rng = np.random.default_rng(3)
    # u_boundary: boundary-column elements' nodal data, shape (n_bnd, p, p, v)
    u_boundary = rng.uniform(0.5, 1.5, (2, 4, 4, 4))
    ghost = ghost_elements(Outflow(), u_boundary, mesh, ref, "right", 0.0)
    # Every ghost x-slab repeats the last interior x-slab.
    for i in range(4):
        npt.assert_array_equal(ghost[:, i, :, :], u_boundary[:, -1, :, :])


def test_ghost_elements_reflecting_copies_like_outflow():
    """Filter ghosts next to a wall reuse the last interior values (the
    mirrored state is a face-flux construct, not a smoothing extension)."""
    ref = ReferenceElement(3)
    mesh = CartesianMesh((0.0, 1.0), (0.0, 1.0), 3, 2)
    rng = np.random.default_rng(4)
    u_boundary = rng.uniform(0.5, 1.5, (3, 4, 4, 4))
    ghost_wall = ghost_elements(Reflecting(), u_boundary, mesh, ref,
                                "bottom", 0.0)
    ghost_flow = ghost_elements(Outflow(), u_boundary, mesh, ref,
                                "bottom", 0.0)
    npt.assert_array_equal(ghost_wall, ghost_flow)


def test_ghost_elements_dirichlet_evaluates_state():
    ref = ReferenceElement(2)
    mesh = CartesianMesh((0.0, 2.0), (0.0, 1.0), 2, 2)

    def state(x, y, t):
        x = np.asarray(x, dtype=float)
        out = np.empty(x.shape + (4,))
        out[..., 0] = x
        out[..., 1] = np.asarray(y)
        out[..., 2] = t
        out[..., 3] = 1.0
        return out

    u_boundary = np.zeros((2, 3, 3, 4))
    ghost = ghost_elements(Dirichlet(state), u_boundary, mesh, ref, "left",
                           2.5)
    # Ghost elements sit one element-width outside the left edge.
    assert ghost.shape == (2, 3, 3, 4)
    assert np.all(ghost[..., 0] <= 0.0)       # x coordinates left of 0
    npt.assert_allclose(ghost[..., 2], 2.5)   # time threading


def test_shock_indicator_hand_values():
    w = np.array([[1.0, 2.0], [3.0, 4.0]])
    eps_n, sigma_n = shock_indicator(w, w)
    assert eps_n == 0.0 and sigma_n == -np.inf
    eps_n, sigma_n = shock_indicator(w, w + np.array([[1e-3, 0], [0, -1e-2]]))
    npt.assert_allclose(eps_n, 1e-2)
    npt.assert_allclose(sigma_n, -2.0)


def test_indicator_field_matches_scalar_loop():
    rng = np.random.default_rng(5)
    w = rng.normal(size=(6, 4, 4))
    wf = w + rng.normal(scale=1e-4, size=w.shape)
    wf[2] = w[2]  # one exactly-matching element
    eps, sigma = indicator_field(w, wf)
    for e in range(6):
        eps_e, sigma_e = shock_indicator(w[e], wf[e])
        npt.assert_allclose(eps[e], eps_e)
        if np.isneginf(sigma_e):
            assert np.isneginf(sigma[e])
        else:
            npt.assert_allclose(sigma[e], sigma_e)


def test_blend_parameter_ramp_anchors():
    settings = AdaptiveFilterSettings(sigma_min=-8.0, sigma_max=-3.0)
    npt.assert_allclose(blend_parameter(-8.0, settings), 0.0, atol=1e-15)
    npt.assert_allclose(blend_parameter(-3.0, settings), 1.0, atol=1e-15)
    npt.assert_allclose(blend_parameter(-5.5, settings), 0.5, atol=1e-15)
    assert blend_parameter(-20.0, settings) == 0.0
    assert blend_parameter(0.0, settings) == 1.0
    assert blend_parameter(-np.inf, settings) == 0.0


def test_blend_parameter_monotone_and_strictly_positive_above_floor():
    settings = AdaptiveFilterSettings(sigma_min=-8.0, sigma_max=-3.0)
    sigma = np.linspace(-10.0, -1.0, 181)
    lam = blend_parameter(sigma, settings)
    assert np.all(np.diff(lam) >= -1e-15)
    assert np.all((lam >= 0.0) & (lam <= 1.0))
    # Activation is exactly the sigma_min threshold.
    npt.assert_array_equal(lam > 0.0, sigma > -8.0)


def test_blend_parameter_degenerate_thresholds():
    settings = AdaptiveFilterSettings(sigma_min=-8.0, sigma_max=-8.0)
    sigma = np.array([-9.0, -8.0 - 1e-12, -8.0, -8.0 + 1e-12, -2.0, -np.inf])
    lam = blend_parameter(sigma, settings)
    npt.assert_array_equal(lam, [0.0, 0.0, 0.0, 1.0, 1.0, 0.0])
    assert set(np.unique(lam)) <= {0.0, 1.0}


def test_blend_parameter_printed_variant_differs():
    ramp = AdaptiveFilterSettings(sigma_min=-8.0, sigma_max=-3.0)
    printed = AdaptiveFilterSettings(sigma_min=-8.0, sigma_max=-3.0,
                                     lambda_formula="printed")
    sigma = -5.0
    assert blend_parameter(sigma, ramp) != blend_parameter(sigma, printed)
    lam = blend_parameter(sigma, printed)
    assert 0.0 <= lam <= 1.0


def test_blend_endpoint_exactness():
    settings = AdaptiveFilterSettings(sigma_min=-8.0, sigma_max=-3.0)
    rng = np.random.default_rng(6)
    u = rng.normal(size=(4, 4))
    uf = rng.normal(size=(4, 4))
    npt.assert_array_equal(blend(u, uf, -9.0, settings), u)
    npt.assert_array_equal(blend(u, uf, -1.0, settings), uf)
    mid = blend(u, uf, -5.5, settings)
    npt.assert_allclose(mid, 0.5 * (u + uf), rtol=1e-14)


def test_settings_validation():
    with pytest.raises(FilterError):
        AdaptiveFilterSettings(sigma_min=-2.0, sigma_max=-5.0)
    with pytest.raises(FilterError):
        AdaptiveFilterSettings(sigma_min=-5.0, sigma_max=-2.0, mode="magic")
    with pytest.raises(FilterError):
        AdaptiveFilterSettings(sigma_min=-5.0, sigma_max=-2.0,
                               indicator_variable="entropy")
    with pytest.raises(FilterError):
        AdaptiveFilterSettings(sigma_min=-5.0, sigma_max=-2.0,
                               lambda_formula="cubic")


def test_normalized_threshold_check():
    assert normalized_threshold_check(1.0, 3, 10, 1e-3)       # 1/40 > 1e-3
    assert not normalized_threshold_check(1e-6, 3, 10, 1e-3)
    assert not normalized_threshold_check(0.04, 3, 10, 1e-3)  # equality fails
    with pytest.raises(FilterError):
        normalized_threshold_check(1.0, 3, 10, 0.0)
