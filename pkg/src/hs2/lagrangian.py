"""Lagrangian states and the relabeling group acting on them.

A Lagrangian state is a quadruple ``(pos, vel, energy, rho_w)`` of functions
of the label ``xi``: characteristic position, velocity along the
characteristic, cumulative energy, and the relabeled density weight.
Admissibility requires ``pos`` and ``energy`` nondecreasing with their cell
slopes never vanishing simultaneously, and the compatibility identity

    pos' * energy' = vel'^2 + rho_w^2    (cell by cell)

which ties the energy bookkeeping to the fields.  Labels are *normalized*
when ``pos + energy = id``; that slice meets every relabeling orbit exactly
once and is where Eulerian states land under the transform.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .piecewise import (EXT_CONST, EXT_SLOPE1, PiecewiseConstant, PiecewiseLinear,
                        combine_linear, compose, compose_pc, pseudo_inverse)
from .validation import InvalidStateError, ValidationReport, default_tol

#: The combined slope pos' + energy' must stay above this for admissibility.
SLOPE_FLOOR_MIN = 1e-10

#: Sup-norm tolerance for the normalized-labels test pos + energy = id.
NORMALIZED_TOL = 1e-10


@dataclass
class LagrangianState:
    """State in characteristic coordinates.

    Attributes
    ----------
    pos : PiecewiseLinear
        Characteristic position ``y``; slope-1 extensions.
    vel : PiecewiseLinear
        Velocity along characteristics; constant extensions.
    energy : PiecewiseLinear
        Cumulative energy; nondecreasing, 0 at -inf, constant extensions.
    rho_w : PiecewiseConstant
        Density weight (density times the label Jacobian); compact support.
    energy_total : float
        Cached limit of ``energy`` at +inf.
    """

    pos: PiecewiseLinear
    vel: PiecewiseLinear
    energy: PiecewiseLinear
    rho_w: PiecewiseConstant
    energy_total: float = field(init=False)

    def __post_init__(self):
        self.energy_total = float(self.energy.v[-1])

    def xi_nodes(self) -> np.ndarray:
        """Union of all label breakpoints of the four components."""
        parts = [self.pos.x, self.vel.x, self.energy.x]
        if not self.rho_w.is_zero:
            parts.append(self.rho_w.x)
        return np.unique(np.concatenate(parts))

    def label_map(self) -> PiecewiseLinear:
        """The map ``pos + energy`` whose fixed slice is the normalized one."""
        return combine_linear([1.0, 1.0], [self.pos, self.energy])


def validate_lagrangian(state: LagrangianState, tol: float | None = None) -> ValidationReport:
    """Check admissibility; returns a structured report, never raises.

    The report carries the witness ``slope_floor`` (essential lower bound
    of ``pos' + energy'`` over all cells, extensions included) and the
    ``normalized`` flag.
    """
    tol = default_tol() if tol is None else tol
    rep = ValidationReport(kind="lagrangian")
    pos, vel, en, rw = state.pos, state.vel, state.energy, state.rho_w

    if pos.left != EXT_SLOPE1 or pos.right != EXT_SLOPE1:
        rep.add("pos-extension", "ext", "position must extend with slope 1")
        return rep
    if vel.left != EXT_CONST or vel.right != EXT_CONST:
        rep.add("vel-extension", "ext", "velocity must have constant extensions")
        return rep
    if en.left != EXT_CONST or en.right != EXT_CONST:
        rep.add("energy-extension", "ext", "cumulative energy must have constant extensions")
        return rep

    if abs(en.v[0]) > tol * max(1.0, abs(float(en.v[-1]))):
        rep.add("energy-origin", f"xi={en.x[0]:.6g}",
                f"cumulative energy must vanish at -inf, starts at {en.v[0]:.17g}")

    grid = state.xi_nodes()
    pos_g = pos(grid)
    vel_g = vel(grid)
    en_g = en(grid)
    dxi = np.diff(grid)
    sp = np.diff(pos_g) / dxi
    sv = np.diff(vel_g) / dxi
    se = np.diff(en_g) / dxi
    rw_c = rw(0.5 * (grid[:-1] + grid[1:]))

    scale = max(1.0, float(np.max(np.abs(sp))), float(np.max(np.abs(se))))
    if np.any(sp < -tol * scale):
        i = int(np.argmax(sp < -tol * scale))
        rep.add("pos-monotone", f"cell [{grid[i]:.6g}, {grid[i + 1]:.6g}]",
                f"position slope {sp[i]:.17g} is negative")
    if np.any(se < -tol * scale):
        i = int(np.argmax(se < -tol * scale))
        rep.add("energy-monotone", f"cell [{grid[i]:.6g}, {grid[i + 1]:.6g}]",
                f"energy slope {se[i]:.17g} is negative")

    # combined slope floor; outside the span it is exactly 1
    combined = sp + se
    slope_floor = float(min(np.min(combined), 1.0)) if combined.size else 1.0
    rep.slope_floor = slope_floor
    if slope_floor < SLOPE_FLOOR_MIN:
        i = int(np.argmin(combined))
        rep.add("slope-floor", f"cell [{grid[i]:.6g}, {grid[i + 1]:.6g}]",
                f"pos' + energy' = {slope_floor:.17g} falls below {SLOPE_FLOOR_MIN:g}")

    lhs = sp * se
    rhs = sv * sv + rw_c * rw_c
    cscale = np.maximum(1.0, np.maximum(np.abs(lhs), np.abs(rhs)))
    bad = np.abs(lhs - rhs) > tol * cscale
    if np.any(bad):
        i = int(np.argmax(bad))
        rep.add("energy-identity", f"cell [{grid[i]:.6g}, {grid[i + 1]:.6g}]",
                f"pos' * energy' = {lhs[i]:.17g} but vel'^2 + rho_w^2 = {rhs[i]:.17g}")

    dev = state.label_map() - PiecewiseLinear.identity()
    rep.normalized = bool(dev.sup_norm() <= NORMALIZED_TOL)
    return rep


def require_valid_lagrangian(state: LagrangianState,
                             tol: float | None = None) -> ValidationReport:
    rep = validate_lagrangian(state, tol)
    if not rep.ok:
        raise InvalidStateError(rep)
    return rep


# -- relabeling group ------------------------------------------------------


class Relabeling:
    """Orientation-preserving change of labels.

    Wraps a strictly increasing piecewise-linear bijection of R that
    deviates boundedly from the identity (slope-1 extensions).
    """

    __slots__ = ("warp",)

    #: smallest admissible cell slope of a relabeling
    MIN_SLOPE = 1e-12

    def __init__(self, warp: PiecewiseLinear):
        if warp.left != EXT_SLOPE1 or warp.right != EXT_SLOPE1:
            raise ValueError("a relabeling must extend with slope 1 on both sides")
        if np.any(warp.slopes() < Relabeling.MIN_SLOPE):
            raise ValueError("a relabeling must be strictly increasing on every cell")
        self.warp = warp

    @classmethod
    def identity(cls) -> "Relabeling":
        return cls(PiecewiseLinear.identity())

    def __call__(self, xi):
        return self.warp(xi)

    def inverse(self) -> "Relabeling":
        return Relabeling(pseudo_inverse(self.warp))

    def then(self, other: "Relabeling") -> "Relabeling":
        """Composite relabeling ``other(self(.))``."""
        return Relabeling(compose(other.warp, self.warp))

    def max_slope(self) -> float:
        return float(max(np.max(self.warp.slopes()), 1.0))


def apply_relabeling(state: LagrangianState, f: Relabeling) -> LagrangianState:
    """Group action: precompose the components with ``f``.

    The density weight picks up the Jacobian of ``f`` so that transported
    mass is preserved.
    """
    return _relabel_raw(state, f.warp)


def _relabel_raw(state: LagrangianState, warp: PiecewiseLinear) -> LagrangianState:
    pos = compose(state.pos, warp)
    vel = compose(state.vel, warp)
    en = compose(state.energy, warp)
    rw = state.rho_w
    if not rw.is_zero:
        comp = compose_pc(rw, warp)
        if comp.is_zero:
            rw = comp
        else:
            # the warp's Jacobian is 1 beyond its breakpoints; re-express the
            # warp on nodes covering the composite's support so its
            # derivative is exact wherever the product can be nonzero
            jac = warp.with_nodes(comp.x).derivative()
            rw = comp * jac
    return LagrangianState(pos, vel, en, rw)


def normalize(state: LagrangianState, tol: float | None = None) -> LagrangianState:
    """Project onto normalized labels: relabel by the inverse of pos + energy.

    Idempotent, and the projected state satisfies pos + energy = id exactly
    at its breakpoints.
    """
    lmap = state.label_map()
    if np.any(np.diff(lmap.v) <= 0):
        raise InvalidStateError(_floor_report(state))
    return _relabel_raw(state, pseudo_inverse(lmap))


def _floor_report(state: LagrangianState) -> ValidationReport:
    rep = ValidationReport(kind="lagrangian")
    rep.add("slope-floor", "label map",
            "pos + energy has a flat cell; labels cannot be normalized")
    return rep
