"""Boundary condition types shared by the DG operator and the filter ghosts.

Each physical boundary side carries one of: periodic pairing, a prescribed
(Dirichlet) state function of (x, y, t), outflow (copy of the interior
trace), a reflecting wall, or a switched combination that dispatches
between two conditions by a pointwise predicate (which covers
piecewise-Dirichlet setups such as a moving-shock top boundary).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

SIDES = ("left", "right", "bottom", "top")


class BoundaryConditionError(Exception):
    """Raised for inconsistent boundary-condition setups."""


class Periodic:
    """Wrap-around pairing with the opposite side."""

    def __repr__(self):
        return "Periodic()"


@dataclass
class Dirichlet:
    """Prescribed exterior state.

    Attributes:
        state: callable (x, y, t) -> conserved-variable array; must accept
            broadcasting numpy arrays for x and y.  Evaluated at ghost-node
            coordinates, so it must be defined (at least) slightly outside
            the domain.
    """

    state: Callable

    def __repr__(self):
        return "Dirichlet(...)"


class Outflow:
    """Exterior trace copies the interior trace."""

    def __repr__(self):
        return "Outflow()"


class Reflecting:
    """Wall: normal velocity (and normal magnetic field) mirrored."""

    def __repr__(self):
        return "Reflecting()"


@dataclass
class SwitchedBC:
    """Pointwise dispatch between two conditions.

    Attributes:
        predicate: callable (x, y, t) -> bool array; True selects bc_true.
        bc_true / bc_false: the two non-periodic conditions.

    A piecewise-Dirichlet boundary is the special case with two Dirichlet
    arms; a mixed wall (prescribed inflow next to a reflecting section)
    uses different arm types.
    """

    predicate: Callable
    bc_true: object
    bc_false: object

    def __post_init__(self):
        for arm in (self.bc_true, self.bc_false):
            if isinstance(arm, (Periodic, SwitchedBC)):
                raise BoundaryConditionError(
                    "SwitchedBC arms must be plain Dirichlet/Outflow/Reflecting")

    def __repr__(self):
        return f"SwitchedBC({self.bc_true!r}, {self.bc_false!r})"


def piecewise_dirichlet(predicate: Callable, state_true: Callable,
                        state_false: Callable) -> SwitchedBC:
    """Dirichlet boundary whose prescribed state switches on a predicate."""
    return SwitchedBC(predicate, Dirichlet(state_true), Dirichlet(state_false))


@dataclass
class BoundarySet:
    """Conditions for the four sides of the rectangular domain."""

    left: object
    right: object
    bottom: object
    top: object

    def __post_init__(self):
        if isinstance(self.left, Periodic) != isinstance(self.right, Periodic):
            raise BoundaryConditionError(
                "periodic conditions must be paired on left/right")
        if isinstance(self.bottom, Periodic) != isinstance(self.top, Periodic):
            raise BoundaryConditionError(
                "periodic conditions must be paired on bottom/top")

    @property
    def periodic_x(self) -> bool:
        return isinstance(self.left, Periodic)

    @property
    def periodic_y(self) -> bool:
        return isinstance(self.bottom, Periodic)

    def side(self, name: str):
        if name not in SIDES:
            raise BoundaryConditionError(f"unknown side {name!r}")
        return getattr(self, name)


def periodic_box() -> BoundarySet:
    """Fully periodic domain."""
    return BoundarySet(Periodic(), Periodic(), Periodic(), Periodic())


def outflow_box() -> BoundarySet:
    """Outflow on all four sides."""
    return BoundarySet(Outflow(), Outflow(), Outflow(), Outflow())
