"""Random state generators shared by the test modules.

All generators take an explicit ``numpy.random.Generator`` so every test
is reproducible from its seed.
"""

from __future__ import annotations

import numpy as np

from hs2 import (EulerianState, LagrangianState, PiecewiseConstant,
                 PiecewiseLinear, Relabeling, EXT_CONST, EXT_SLOPE1,
                 apply_relabeling)


def rand_eulerian(rng: np.random.Generator, max_cells: int = 6,
                  with_atoms: bool = True) -> EulerianState:
    """Random admissible Eulerian state (energy density derived exactly)."""
    n = int(rng.integers(2, max_cells + 2))
    x = np.sort(rng.uniform(-3.0, 3.0, size=n))
    while np.any(np.diff(x) < 1e-3):
        x = np.sort(rng.uniform(-3.0, 3.0, size=n))
    v = rng.uniform(-1.5, 1.5, size=n)
    vel = PiecewiseLinear(x, v, EXT_CONST, EXT_CONST)

    if rng.random() < 0.85:
        m = int(rng.integers(1, 4))
        rx = np.sort(rng.uniform(-3.0, 3.0, size=m + 1))
        while np.any(np.diff(rx) < 1e-3):
            rx = np.sort(rng.uniform(-3.0, 3.0, size=m + 1))
        rho = PiecewiseConstant(rx, rng.uniform(-1.0, 1.0, size=m))
    else:
        rho = PiecewiseConstant.zero()

    atoms = []
    if with_atoms and rng.random() < 0.7:
        for _ in range(int(rng.integers(1, 3))):
            atoms.append((float(rng.uniform(-3.0, 3.0)),
                          float(rng.uniform(0.1, 1.0))))
    return EulerianState.from_parts(vel, rho, atoms)


def rand_normalized(rng: np.random.Generator, max_cells: int = 8,
                    allow_flat: bool = True) -> LagrangianState:
    """Random admissible Lagrangian state with normalized labels.

    Cell data is drawn directly: a split of the unit combined slope
    between position and energy, and an angle dividing the interaction
    budget between velocity slope and density weight.  This construction
    is independent of the transform, so round-trip tests against it are
    meaningful.
    """
    n = int(rng.integers(2, max_cells + 2))
    xi = np.sort(rng.uniform(-4.0, 4.0, size=n + 1))
    while np.any(np.diff(xi) < 1e-3):
        xi = np.sort(rng.uniform(-4.0, 4.0, size=n + 1))
    dxi = np.diff(xi)

    pos_slope = rng.uniform(0.0, 1.0, size=n)
    if allow_flat and rng.random() < 0.5:
        # force at least one exactly flat cell (a concentration point)
        pos_slope[rng.integers(0, n)] = 0.0
    en_slope = 1.0 - pos_slope
    budget = np.sqrt(pos_slope * en_slope)
    theta = rng.uniform(0.0, 2.0 * np.pi, size=n)
    vel_slope = budget * np.cos(theta)
    rw_val = budget * np.sin(theta)

    # pos + energy = id holds exactly: the slopes split 1 per cell and the
    # position starts at the first label
    pos_v = xi[0] + np.concatenate([[0.0], np.cumsum(pos_slope * dxi)])
    vel_v = rng.uniform(-1.0, 1.0) + np.concatenate(
        [[0.0], np.cumsum(vel_slope * dxi)])
    en_v = np.concatenate([[0.0], np.cumsum(en_slope * dxi)])

    pos = PiecewiseLinear(xi, pos_v, EXT_SLOPE1, EXT_SLOPE1)
    vel = PiecewiseLinear(xi, vel_v, EXT_CONST, EXT_CONST)
    energy = PiecewiseLinear(xi, en_v, EXT_CONST, EXT_CONST)
    rho_w = PiecewiseConstant.from_cells(xi, rw_val)
    return LagrangianState(pos, vel, energy, rho_w)


def rand_relabeling(rng: np.random.Generator, max_cells: int = 5) -> Relabeling:
    """Random warp with slopes in [0.2, 5] and bounded deviation."""
    n = int(rng.integers(1, max_cells + 1))
    x = np.sort(rng.uniform(-4.0, 4.0, size=n + 1))
    while np.any(np.diff(x) < 1e-2):
        x = np.sort(rng.uniform(-4.0, 4.0, size=n + 1))
    slopes = np.exp(rng.uniform(np.log(0.2), np.log(5.0), size=n))
    v = np.concatenate([[x[0] + rng.uniform(-0.5, 0.5)],
                        np.cumsum(slopes * np.diff(x))])
    v[1:] += v[0]
    return Relabeling(PiecewiseLinear(x, v, EXT_SLOPE1, EXT_SLOPE1))


def rand_lagrangian(rng: np.random.Generator, max_cells: int = 8) -> LagrangianState:
    """Random admissible Lagrangian state with arbitrary labels."""
    return apply_relabeling(rand_normalized(rng, max_cells), rand_relabeling(rng))
