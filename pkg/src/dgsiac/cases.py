"""Bundled benchmark problems: initial data, exact solutions, boundaries.

Each factory returns a TestCase bundling the physical system, domain,
initial condition in primitive variables, the exact solution where one is
known, a boundary-set builder, and the default run parameters (polynomial
degree, mesh, CFL number, and shock-filter settings) used by the shipped
configuration files.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .bcs import (BoundarySet, Dirichlet, Outflow, Reflecting, SwitchedBC,
                  outflow_box, periodic_box, piecewise_dirichlet)


class CaseError(Exception):
    """Raised for unknown case names or invalid case parameters."""


@dataclass(frozen=True)
class TestCase:
    """A complete benchmark problem definition.

    Attributes:
        name: registry key used by the CLI.
        system: "euler" or "mhd".
        gamma: adiabatic exponent.
        x_bounds / y_bounds: rectangular domain extents.
        final_time: default integration end time.
        initial_primitive: callable (x, y) -> primitive array of shape
            broadcast(x, y).shape + (n_prim,).
        make_bcs: callable physics -> BoundarySet (conserved-variable
            Dirichlet states built through the physics object).
        exact_primitive: callable (x, y, t) -> primitive array, or None
            when no closed-form solution exists.
        defaults: run parameters (n, n_elem_x, n_elem_y, cfl, filter dict)
            mirroring the configuration-file schema.
    """

    name: str
    system: str
    gamma: float
    x_bounds: tuple
    y_bounds: tuple
    final_time: float
    initial_primitive: Callable
    make_bcs: Callable
    exact_primitive: Optional[Callable] = None
    defaults: dict = field(default_factory=dict)

    def initial_conserved(self, physics, x, y) -> np.ndarray:
        """Initial condition converted to conserved variables."""
        return physics.primitive_to_conservative(self.initial_primitive(x, y))

    def exact_conserved(self, physics, x, y, t) -> np.ndarray:
        """Exact solution in conserved variables (requires exact_primitive)."""
        if self.exact_primitive is None:
            raise CaseError(f"case {self.name!r} has no exact solution")
        return physics.primitive_to_conservative(self.exact_primitive(x, y, t))


def _constant_state(values) -> Callable:
    """Boundary-state callable returning a fixed vector at every point."""
    vec = np.asarray(values, dtype=float)

    def state(x, y, t):
        shape = np.broadcast(np.asarray(x), np.asarray(y)).shape
        out = np.empty(shape + (vec.size,))
        out[...] = vec
        return out

    return state


def _fill(x, y, components) -> np.ndarray:
    """Stack scalar/array primitive components along a trailing axis."""
    shape = np.broadcast(np.asarray(x), np.asarray(y)).shape
    out = np.empty(shape + (len(components),))
    for i, comp in enumerate(components):
        out[..., i] = comp
    return out


# ---------------------------------------------------------------------------
# Smooth advection (Euler): convergence and conservation study
# ---------------------------------------------------------------------------

def convergence_case() -> TestCase:
    """Smooth density wave advected diagonally through a periodic box.

    Density 1 + 0.3 sin(2 pi (x + y)) rides on the uniform velocity (1, 1)
    at constant unit pressure, so the exact solution is the initial profile
    translated by t in each direction.
    """
    gamma = 5.0 / 3.0

    def exact(x, y, t):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        rho = 1.0 + 0.3 * np.sin(2.0 * np.pi * (x + y - 2.0 * t))
        return _fill(x, y, (rho, 1.0, 1.0, 1.0))

    def initial(x, y):
        return exact(x, y, 0.0)

    def make_bcs(physics):
        return periodic_box()

    return TestCase(
        name="convergence",
        system="euler",
        gamma=gamma,
        x_bounds=(-1.0, 1.0),
        y_bounds=(-1.0, 1.0),
        final_time=0.4,
        initial_primitive=initial,
        make_bcs=make_bcs,
        exact_primitive=exact,
        defaults={
            "n": 7,
            "n_elem_x": 4,
            "n_elem_y": 4,
            "cfl": 0.1,
            "filter": {"enabled": False},
        },
    )


# ---------------------------------------------------------------------------
# Cylindrical explosion (Euler)
# ---------------------------------------------------------------------------

def explosion_case() -> TestCase:
    """Cylindrical blast: dense pressurized disc expanding into low state.

    Inside the disc x^2 + y^2 <= 0.4^2 (boundary included) the state is
    (rho, p) = (1, 1); outside it is (0.125, 0.1).  The velocity is zero
    everywhere and the wave does not reach the outflow boundaries by the
    final time.
    """
    radius = 0.4

    def initial(x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        inside = (x * x + y * y) <= radius * radius
        rho = np.where(inside, 1.0, 0.125)
        p = np.where(inside, 1.0, 0.1)
        return _fill(x, y, (rho, 0.0, 0.0, p))

    def make_bcs(physics):
        return outflow_box()

    return TestCase(
        name="explosion",
        system="euler",
        gamma=5.0 / 3.0,
        x_bounds=(-1.0, 1.0),
        y_bounds=(-1.0, 1.0),
        final_time=0.25,
        initial_primitive=initial,
        make_bcs=make_bcs,
        defaults={
            "n": 7,
            "n_elem_x": 80,
            "n_elem_y": 80,
            "cfl": 0.1,
            "filter": {
                "enabled": True,
                "m": 1,
                "k": 6,
                "n_d": 0.6,
                "sigma_min": -7.0,
                "sigma_max": -3.0,
                "indicator": "density",
            },
        },
    )


# ---------------------------------------------------------------------------
# Four-quadrant Riemann problems (Euler)
# ---------------------------------------------------------------------------

# Primitive (rho, v1, v2, p) per quadrant; order tl, bl, tr, br.
_RIEMANN_STATES = {
    17: {
        "tl": (2.0, 0.0, -0.3, 1.0),
        "bl": (1.0625, 0.0, 0.2145, 0.4),
        "tr": (1.0, 0.0, -0.4, 1.0),
        "br": (0.5197, 0.0, -1.1259, 0.4),
    },
    19: {
        "tl": (2.0, 0.0, -0.3, 1.0),
        "bl": (1.0625, 0.0, 0.2145, 0.4),
        "tr": (1.0, 0.0, 0.3, 1.0),
        "br": (0.5197, 0.0, -0.4259, 0.4),
    },
}


def riemann_case(config: int) -> TestCase:
    """Four-state Riemann problem on the unit square.

    Args:
        config: which catalogued quadrant arrangement to use (17 or 19).

    The four constant states meet at (0.5, 0.5).  Points with x < 0.5
    take the left-column states; within the left column y <= 0.5 selects
    the bottom state, within the right column y >= 0.5 selects the top
    state (membership on the dividing lines follows the half-open
    quadrant definitions, ties to the closed side).
    """
    if config not in _RIEMANN_STATES:
        raise CaseError(
            f"unknown Riemann configuration {config!r}; available: "
            f"{sorted(_RIEMANN_STATES)}")
    states = _RIEMANN_STATES[config]
    table = np.array([states["tl"], states["bl"], states["tr"], states["br"]])

    def initial(x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        left = x < 0.5
        idx = np.where(left,
                       np.where(y <= 0.5, 1, 0),
                       np.where(y >= 0.5, 2, 3))
        return table[idx]

    def make_bcs(physics):
        return outflow_box()

    return TestCase(
        name=f"riemann{config}",
        system="euler",
        gamma=1.4,
        x_bounds=(0.0, 1.0),
        y_bounds=(0.0, 1.0),
        final_time=0.3,
        initial_primitive=initial,
        make_bcs=make_bcs,
        defaults={
            "n": 7,
            "n_elem_x": 60,
            "n_elem_y": 60,
            "cfl": 0.1,
            "filter": {
                "enabled": True,
                "m": 5,
                "k": 7,
                "n_d": 4.5,
                "sigma_min": -8.0,
                "sigma_max": -3.0,
                "indicator": "density",
            },
        },
    )


# ---------------------------------------------------------------------------
# Double Mach reflection (Euler)
# ---------------------------------------------------------------------------

def double_mach_case() -> TestCase:
    """Strong oblique shock reflecting off a wall section.

    A Mach-10 front inclined at 60 degrees to the x-axis meets the bottom
    wall at x = 1/6.  Post-shock state (8, 8.25 pi/6, -8.25 pi/6, 116.5)
    fills the region left of the front; quiescent (1.4, 0, 0, 1) fills the
    rest.  The bottom boundary prescribes the post-shock state ahead of the
    wall start and reflects behind it; the top boundary tracks the moving
    intersection s(t) = 1/6 + (1 + 20 t)/sqrt(3).
    """
    gamma = 1.4
    x0 = 1.0 / 6.0
    speed = 8.25 * math.pi / 6.0
    left_prim = (8.0, speed, -speed, 116.5)
    right_prim = (1.4, 0.0, 0.0, 1.0)
    table = np.array([left_prim, right_prim])
    sqrt3 = math.sqrt(3.0)

    def initial(x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        idx = np.where(x < x0 + y / sqrt3, 0, 1)
        return table[idx]

    def shock_top_position(t: float) -> float:
        """x-coordinate where the front crosses the top boundary y = 1."""
        return x0 + (1.0 + 20.0 * t) / sqrt3

    def make_bcs(physics):
        left_state = _constant_state(
            physics.primitive_to_conservative(np.array(left_prim)))
        right_state = _constant_state(
            physics.primitive_to_conservative(np.array(right_prim)))

        def top_predicate(x, y, t):
            return np.asarray(x) < shock_top_position(t)

        def bottom_predicate(x, y, t):
            return np.asarray(x) < x0

        return BoundarySet(
            left=Dirichlet(left_state),
            right=Outflow(),
            bottom=SwitchedBC(bottom_predicate, Dirichlet(left_state),
                              Reflecting()),
            top=piecewise_dirichlet(top_predicate, left_state, right_state),
        )

    return TestCase(
        name="double_mach",
        system="euler",
        gamma=gamma,
        x_bounds=(0.0, 3.25),
        y_bounds=(0.0, 1.0),
        final_time=0.2,
        initial_primitive=initial,
        make_bcs=make_bcs,
        defaults={
            "n": 7,
            "n_elem_x": 325,
            "n_elem_y": 100,
            "cfl": 0.1,
            # Mid-step flux evaluations near the inflow shock dip the
            # pressure transiently; the completed steps stay admissible.
            "admissibility": "post-step",
            "filter": {
                "enabled": True,
                "m": 3,
                "k": 6,
                "n_d": 2.5,
                "sigma_min": -7.0,
                "sigma_max": -2.0,
                "indicator": "density",
            },
        },
    )


# ---------------------------------------------------------------------------
# Orszag-Tang vortex (ideal MHD)
# ---------------------------------------------------------------------------

def orszag_tang_case() -> TestCase:
    """Turbulent plasma vortex developing MHD shocks from smooth data.

    Periodic unit square with density gamma*5/(12 pi), pressure 5/(12 pi),
    rotational velocity (-sin(2 pi y), sin(2 pi x)) and magnetic field
    (-sin(2 pi y), sin(4 pi x))/sqrt(4 pi); remaining variables zero.
    """
    gamma = 5.0 / 3.0
    rho0 = gamma * 5.0 / (12.0 * math.pi)
    p0 = 5.0 / (12.0 * math.pi)
    b_scale = 1.0 / math.sqrt(4.0 * math.pi)

    def initial(x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        v1 = -np.sin(2.0 * np.pi * y)
        v2 = np.sin(2.0 * np.pi * x)
        b1 = -b_scale * np.sin(2.0 * np.pi * y)
        b2 = b_scale * np.sin(4.0 * np.pi * x)
        return _fill(x, y, (rho0, v1, v2, 0.0, p0, b1, b2, 0.0, 0.0))

    def make_bcs(physics):
        return periodic_box()

    return TestCase(
        name="orszag_tang",
        system="mhd",
        gamma=gamma,
        x_bounds=(0.0, 1.0),
        y_bounds=(0.0, 1.0),
        final_time=0.5,
        initial_primitive=initial,
        make_bcs=make_bcs,
        defaults={
            "n": 5,
            "n_elem_x": 40,
            "n_elem_y": 40,
            "cfl": 0.5,
            # Shock formation briefly dips nodal pressure inside a step at
            # interior quadrature points; completed steps stay admissible.
            "admissibility": "post-step",
            "filter": {
                "enabled": True,
                "m": 3,
                "k": 8,
                "epsilon": 1.4,
                "sigma_min": -8.0,
                "sigma_max": -8.0,
                "indicator": "pressure",
            },
        },
    )


# ---------------------------------------------------------------------------
# Magnetic rotor (ideal MHD)
# ---------------------------------------------------------------------------

def magnetic_rotor_case() -> TestCase:
    """Rigidly rotating dense disc in a magnetized static ambient fluid.

    Core r < r0 = 0.1: density 10, rigid rotation of rim speed u0 = 2.
    Taper r0 <= r <= r1 = 0.115: linear ramp s = (r1 - r)/(r1 - r0) scales
    both the density excess (1 + 9 s) and the rotation velocity.  Ambient
    r > r1: density 1 at rest.  Pressure 1 and B1 = 5/sqrt(4 pi) are
    uniform; all other variables start at zero.
    """
    r0, r1, u0 = 0.1, 0.115, 2.0

    def initial(x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        r = np.sqrt((x - 0.5) ** 2 + (y - 0.5) ** 2)
        s = np.clip((r1 - r) / (r1 - r0), 0.0, 1.0)
        rho = 1.0 + 9.0 * s
        v1 = s * (u0 / r0) * (0.5 - y)
        v2 = s * (u0 / r0) * (x - 0.5)
        b1 = 5.0 / math.sqrt(4.0 * math.pi)
        return _fill(x, y, (rho, v1, v2, 0.0, 1.0, b1, 0.0, 0.0, 0.0))

    def make_bcs(physics):
        return periodic_box()

    return TestCase(
        name="magnetic_rotor",
        system="mhd",
        gamma=1.4,
        x_bounds=(0.0, 1.0),
        y_bounds=(0.0, 1.0),
        final_time=0.15,
        initial_primitive=initial,
        make_bcs=make_bcs,
        defaults={
            "n": 4,
            "n_elem_x": 100,
            "n_elem_y": 100,
            "cfl": 0.5,
            "filter": {
                "enabled": True,
                "m": 1,
                "k": 5,
                "epsilon": 1.4,
                "sigma_min": -9.0,
                "sigma_max": -6.0,
                "indicator": "density",
            },
        },
    )


CASE_BUILDERS = {
    "convergence": convergence_case,
    "explosion": explosion_case,
    "riemann17": lambda: riemann_case(17),
    "riemann19": lambda: riemann_case(19),
    "double_mach": double_mach_case,
    "orszag_tang": orszag_tang_case,
    "magnetic_rotor": magnetic_rotor_case,
}


def get_case(name: str) -> TestCase:
    """Look up a benchmark case by registry name."""
    try:
        builder = CASE_BUILDERS[name]
    except KeyError:
        raise CaseError(
            f"unknown case {name!r}; available: {sorted(CASE_BUILDERS)}"
        ) from None
    return builder()
