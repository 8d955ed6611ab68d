"""Eulerian states: velocity, transported density and energy measure.

A state is admissible when the absolutely continuous part of the energy
measure equals ``u_x^2 + rho^2`` cell by cell; the atoms on top of it hold
the energy that has concentrated at wave-breaking points.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .measure import RadonMeasure
from .piecewise import EXT_CONST, PiecewiseConstant, PiecewiseLinear
from .validation import InvalidStateError, ValidationReport, default_tol


@dataclass
class EulerianState:
    """State of the system in physical coordinates.

    Attributes
    ----------
    vel : PiecewiseLinear
        Velocity ``u``; bounded, constant extensions.
    rho : PiecewiseConstant
        Transported density; compactly supported.
    energy : RadonMeasure
        Energy measure; its density must match ``u_x^2 + rho^2``.
    """

    vel: PiecewiseLinear
    rho: PiecewiseConstant
    energy: RadonMeasure

    @classmethod
    def from_parts(cls, vel: PiecewiseLinear, rho: PiecewiseConstant,
                   atoms=()) -> "EulerianState":
        """Build a compatible state: energy density derived from the fields."""
        return cls(vel, rho, RadonMeasure(energy_density(vel, rho), atoms))

    @classmethod
    def vacuum(cls, span=(0.0, 1.0)) -> "EulerianState":
        return cls(PiecewiseLinear.constant(0.0, span), PiecewiseConstant.zero(),
                   RadonMeasure.zero())

    def x_nodes(self) -> np.ndarray:
        """Union of all spatial breakpoints and atom locations."""
        return np.unique(np.concatenate([
            self.vel.x, self.rho.x, self.energy.density.x, self.energy.atom_pos]))


def energy_density(vel: PiecewiseLinear, rho: PiecewiseConstant) -> PiecewiseConstant:
    """The density ``u_x^2 + rho^2`` on the merged grid of both fields."""
    ux = vel.derivative()
    sq = ux * ux
    if not rho.is_zero:
        sq = sq + rho * rho
    return sq


def validate_eulerian(state: EulerianState, tol: float | None = None) -> ValidationReport:
    """Check admissibility; returns a structured report, never raises.

    The compatibility check compares the energy density with
    ``u_x^2 + rho^2`` cell by cell at relative tolerance ``tol``.
    """
    tol = default_tol() if tol is None else tol
    rep = ValidationReport(kind="eulerian")
    vel, rho, mu = state.vel, state.rho, state.energy

    if vel.left != EXT_CONST or vel.right != EXT_CONST:
        rep.add("velocity-extension", "ext", "velocity must have constant extensions")
        return rep
    if mu.density.min_value() < 0:
        rep.add("energy-density-sign", "density", "energy density has a negative cell")
    if np.any(mu.atom_mass <= 0):
        rep.add("atom-mass-sign", "atoms", "atom masses must be positive")

    expected = energy_density(vel, rho)
    grid = np.unique(np.concatenate([expected.x, mu.density.x])) if not (
        expected.is_zero and mu.density.is_zero) else np.empty(0)
    if grid.size >= 2:
        mids = 0.5 * (grid[:-1] + grid[1:])
        got = mu.density(mids)
        want = expected(mids)
        scale = np.maximum(1.0, np.maximum(np.abs(got), np.abs(want)))
        bad = np.abs(got - want) > tol * scale
        if np.any(bad):
            i = int(np.argmax(bad))
            rep.add("energy-compatibility",
                    f"cell [{grid[i]:.6g}, {grid[i + 1]:.6g}]",
                    f"energy density {got[i]:.17g} but u_x^2 + rho^2 = {want[i]:.17g}")
    return rep


def require_valid_eulerian(state: EulerianState, tol: float | None = None) -> None:
    rep = validate_eulerian(state, tol)
    if not rep.ok:
        raise InvalidStateError(rep)
