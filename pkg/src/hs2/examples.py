"""Built-in closed-form states and trajectories used as cross-checks.

Each entry is an independent transcription of a known solution, written
directly from its closed-form branches rather than produced by this
package's own pipeline, so tests can compare the two with no shared code
path.

Available names:

``ex11``
    Eulerian trajectory of a breaking wave: the velocity steepens, the
    density rides on the right half line, and at time 2 all energy in the
    steepening region concentrates at one point.  Valid for ``0 <= t < 2``.
``ex26``
    Eulerian snapshot whose energy measure already carries an atom of mass
    1/2 at the origin; the standard example for the transform.
``ex34``
    Lagrangian trajectory obtained from ``ex26``; closed-form polynomial
    branches in time.  Valid for ``t >= 0``.
``ex36``
    Eulerian trajectory of ``ex26``: the initial atom releases immediately,
    a new atom of mass 1 forms at x = -1/4 at time 2 and releases again.
    Valid for ``t >= 0``.
``ex47``
    A family of relabelings (parameter ``0 < eps < 1``) that squeeze the
    unit interval by the factor ``eps``; used to probe the relabeling
    invariance of distances.
"""

from __future__ import annotations

import numpy as np

from .eulerian import EulerianState
from .lagrangian import LagrangianState, Relabeling
from .measure import RadonMeasure
from .piecewise import (EXT_CONST, EXT_SLOPE1, PiecewiseConstant, PiecewiseLinear)

EXAMPLE_NAMES = ("ex11", "ex26", "ex34", "ex36", "ex47")


def example(name: str, t: float = 0.0):
    """Closed-form example state.

    ``t`` is the trajectory time; for ``ex47`` it is the squeeze parameter
    instead.  Raises ``ValueError`` for unknown names or parameters outside
    the validity range.
    """
    if name == "ex11":
        return _breaking_wave(t)
    if name == "ex26":
        if t != 0.0:
            raise ValueError("ex26 is a single snapshot; only t = 0 is defined")
        return _atom_snapshot()
    if name == "ex34":
        return _label_trajectory(t)
    if name == "ex36":
        return _atom_trajectory(t)
    if name == "ex47":
        return _squeeze_relabeling(t)
    raise ValueError(f"unknown example {name!r}; choose from {EXAMPLE_NAMES}")


def _breaking_wave(t: float) -> EulerianState:
    t = float(t)
    if not 0.0 <= t < 2.0:
        raise ValueError("ex11 is defined for 0 <= t < 2")
    # velocity: constant plateau, steepening ramp down to zero, then a
    # slow ramp back up to the right plateau
    x0 = -0.25 * t * t + t - 1.0
    x1 = 0.25 * t * t + 1.0
    vel = PiecewiseLinear.from_nodes(
        [x0, 0.0, x1],
        [1.0 - 0.5 * t, 0.0, 0.5 * t],
        EXT_CONST, EXT_CONST)
    rho_val = 1.0 / (0.25 * t * t + 1.0)
    rho = PiecewiseConstant([0.0, x1], [rho_val])
    return EulerianState.from_parts(vel, rho)


def _atom_snapshot() -> EulerianState:
    vel = PiecewiseLinear([-1.0, 0.0], [1.0, 0.0], EXT_CONST, EXT_CONST)
    rho = PiecewiseConstant([0.0, 1.0], [1.0])
    dens = PiecewiseConstant([-1.0, 1.0], [1.0])
    return EulerianState(vel, rho, RadonMeasure(dens, [(0.0, 0.5)]))


def _label_trajectory(t: float) -> LagrangianState:
    t = float(t)
    if t < 0.0:
        raise ValueError("ex34 is defined for t >= 0")
    xi = np.asarray([-1.0, 1.0, 1.5, 3.5])
    # position branches: plateau translation, squeezing ramp, the cell that
    # collapses at t = 2, the cell fed by the released atom, right plateau
    pos_v = np.asarray([
        -0.3125 * t * t + t - 1.0,
        0.25 * (1.0 - 1.25) * t * t,          # = y(1, t) on the flat-at-0 cell
        0.25 * (1.5 - 1.25) * t * t,
        0.125 * (3.5 - 1.0) * t * t + 0.5 * (3.5 - 1.5),
    ])
    vel_v = np.asarray([
        -0.625 * t + 1.0,
        0.5 * (1.0 - 1.25) * t,
        0.5 * (1.5 - 1.25) * t,
        0.25 * (3.5 - 1.0) * t,
    ])
    en_v = np.asarray([0.0, 1.0, 1.5, 2.5])
    pos = PiecewiseLinear(xi, pos_v, EXT_SLOPE1, EXT_SLOPE1)
    vel = PiecewiseLinear(xi, vel_v, EXT_CONST, EXT_CONST)
    energy = PiecewiseLinear(xi, en_v, EXT_CONST, EXT_CONST)
    rho_w = PiecewiseConstant([1.5, 3.5], [0.5])
    return LagrangianState(pos, vel, energy, rho_w)


def _atom_trajectory(t: float) -> EulerianState:
    t = float(t)
    if t < 0.0:
        raise ValueError("ex36 is defined for t >= 0")
    b1 = -0.3125 * t * t + t - 1.0
    b2 = -0.0625 * t * t
    b3 = 0.0625 * t * t
    b4 = 0.3125 * t * t + 1.0
    vel = PiecewiseLinear.from_nodes(
        [b1, b2, b3, b4],
        [-0.625 * t + 1.0, -0.125 * t, 0.125 * t, 0.625 * t],
        EXT_CONST, EXT_CONST)
    rho_val = 1.0 / (0.25 * t * t + 1.0)
    rho = PiecewiseConstant([b3, b4], [rho_val])
    atoms = []
    if t == 0.0:
        atoms.append((0.0, 0.5))
    if t == 2.0:
        atoms.append((-0.25, 1.0))
    return EulerianState.from_parts(vel, rho, atoms)


def _squeeze_relabeling(eps: float) -> Relabeling:
    eps = float(eps)
    if not 0.0 < eps < 1.0:
        raise ValueError("ex47 needs a squeeze parameter strictly between 0 and 1")
    warp = PiecewiseLinear([0.0, 1.0 / eps], [0.0, 1.0], EXT_SLOPE1, EXT_SLOPE1)
    return Relabeling(warp)


def opposite_density_pair():
    """Two states identical except for the sign of the density weight.

    Their plain norm distance is bounded below by a constant, yet after the
    squeeze relabelings of ``ex47`` the one-sided distance decays like
    ``2 sqrt(eps)``: the invariant distance genuinely needs the infimum.
    """
    pos = PiecewiseLinear.identity((0.0, 1.0))
    vel = PiecewiseLinear.constant(0.0, (0.0, 1.0))
    energy = PiecewiseLinear([0.0, 1.0], [0.0, 1.0], EXT_CONST, EXT_CONST)
    rw = PiecewiseConstant([0.0, 1.0], [1.0])
    a = LagrangianState(pos, vel, energy, rw)
    b = LagrangianState(pos, vel, energy, -rw)
    return a, b
