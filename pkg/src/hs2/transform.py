"""Transforms between Eulerian and Lagrangian descriptions.

``to_lagrangian`` inverts the monotone map ``x + (energy mass below x)``:
every atom of the energy measure opens up a flat cell of the position whose
label length equals the atom's mass, so concentrated energy is spread over
an interval of labels.  ``to_eulerian`` pushes everything forward again,
collapsing flat cells back into atoms.  The two maps are mutually inverse;
on the Lagrangian side exactly up to relabeling, and exactly on the
normalized slice.
"""

from __future__ import annotations

import numpy as np

from .eulerian import EulerianState, require_valid_eulerian
from .lagrangian import LagrangianState, require_valid_lagrangian
from .measure import RadonMeasure, pushforward
from .piecewise import (EXT_CONST, EXT_SLOPE1, PiecewiseConstant, PiecewiseLinear,
                        compose, compose_pc, merge_close_nodes)
from .validation import default_tol

#: Cells of the position with slope at or below this are collapsed when
#: moving to Eulerian coordinates (they carry atoms, not density).
COLLAPSE_SLOPE_TOL = 1e-12

#: On a collapsed cell the velocity must be constant to this accuracy, and
#: the density weight must vanish to this accuracy.
COLLAPSE_VALUE_TOL = 1e-10


def to_lagrangian(state: EulerianState, tol: float | None = None) -> LagrangianState:
    """Change to characteristic coordinates with normalized labels.

    The state is validated first; validation failures propagate as
    :class:`~hs2.validation.InvalidStateError`.
    """
    tol = default_tol() if tol is None else tol
    require_valid_eulerian(state, tol)

    grid = state.x_nodes()
    if grid.size < 2:
        grid = np.asarray([0.0, 1.0])
    below = state.energy.cdf_left(grid)

    atom_pos = state.energy.atom_pos
    atom_mass = state.energy.atom_mass
    xi_nodes = []
    pos_vals = []
    k = 0
    for x_i, b_i in zip(grid, below):
        xi = x_i + b_i
        xi_nodes.append(xi)
        pos_vals.append(x_i)
        if k < atom_pos.size and atom_pos[k] == x_i:
            # the atom opens a flat cell of length equal to its mass
            xi_nodes.append(xi + atom_mass[k])
            pos_vals.append(x_i)
            k += 1
    if k != atom_pos.size:
        # atoms always sit on grid nodes; guard against drift
        raise AssertionError("atom locations missing from the spatial grid")

    xi_nodes = np.asarray(xi_nodes)
    pos_vals = np.asarray(pos_vals)
    pos = PiecewiseLinear(xi_nodes, pos_vals, EXT_SLOPE1, EXT_SLOPE1)
    energy = PiecewiseLinear(xi_nodes, xi_nodes - pos_vals, EXT_CONST, EXT_CONST)
    vel = compose(state.vel, pos)
    rho_w = _density_weight(state.rho, pos)
    return LagrangianState(pos, vel, energy, rho_w)


def _density_weight(rho: PiecewiseConstant, pos: PiecewiseLinear) -> PiecewiseConstant:
    if rho.is_zero:
        return rho
    comp = compose_pc(rho, pos)
    if comp.is_zero:
        return comp
    jac = pos.with_nodes(comp.x).derivative()
    return comp * jac


def to_eulerian(state: LagrangianState, tol: float | None = None) -> EulerianState:
    """Change back to physical coordinates.

    Flat cells of the position collapse: their energy becomes an atom of
    the energy measure, the velocity must be constant across them (checked)
    and the density weight must vanish on them (checked).  Relabeling the
    input does not change the result.
    """
    tol = default_tol() if tol is None else tol
    require_valid_lagrangian(state, tol)

    grid = state.xi_nodes()
    pos_g = state.pos(grid)
    vel_g = state.vel(grid)
    en_g = state.energy(grid)
    rw_c = state.rho_w(0.5 * (grid[:-1] + grid[1:]))
    dxi = np.diff(grid)
    dpos = np.diff(pos_g)
    slopes = dpos / dxi

    vel_scale = max(1.0, float(np.max(np.abs(vel_g))))
    collapsed = slopes <= COLLAPSE_SLOPE_TOL

    # velocity: image nodes of non-collapsed cell endpoints.  Node positions
    # are kept bit-identical with the density and energy nodes below so the
    # compatibility identity survives exactly.
    x_nodes = [float(pos_g[0])]
    u_vals = [float(vel_g[0])]
    for i in range(dxi.size):
        if collapsed[i]:
            dv = abs(vel_g[i + 1] - vel_g[i])
            if dv > COLLAPSE_VALUE_TOL * vel_scale:
                raise ValueError(
                    f"velocity jumps by {dv:.3e} across a collapsed cell "
                    f"[{grid[i]:.6g}, {grid[i + 1]:.6g}]; state is inconsistent")
            continue
        if pos_g[i + 1] > x_nodes[-1]:
            x_nodes.append(float(pos_g[i + 1]))
            u_vals.append(float(vel_g[i + 1]))
    if len(x_nodes) < 2:
        # position flat across the whole span (a pure point state): the
        # velocity is a single constant
        x_nodes = [x_nodes[0], x_nodes[0] + 1.0]
        u_vals = [u_vals[0], u_vals[0]]
    vel = PiecewiseLinear(np.asarray(x_nodes), np.asarray(u_vals), EXT_CONST, EXT_CONST)

    # transported density: weight over position Jacobian on expanding cells
    rho_x = [float(pos_g[0])]
    rho_c = []
    for i in range(dxi.size):
        if collapsed[i]:
            if abs(rw_c[i]) > COLLAPSE_VALUE_TOL:
                raise ValueError(
                    f"density weight {rw_c[i]:.3e} on a collapsed cell "
                    f"[{grid[i]:.6g}, {grid[i + 1]:.6g}] cannot be transported")
            continue
        if pos_g[i + 1] > rho_x[-1]:
            rho_x.append(float(pos_g[i + 1]))
            rho_c.append(float(rw_c[i]) / float(slopes[i]))
    rho = PiecewiseConstant.from_cells(np.asarray(rho_x), np.asarray(rho_c))

    # energy measure: pushforward of the cumulative-energy slope
    en_slopes = np.maximum(np.diff(en_g) / dxi, 0.0)
    energy = pushforward(PiecewiseLinear(grid, pos_g, EXT_SLOPE1, EXT_SLOPE1),
                         PiecewiseConstant(grid, en_slopes))
    return EulerianState(vel, rho, energy)
