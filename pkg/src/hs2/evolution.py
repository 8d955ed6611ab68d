"""Time evolution: exact semigroup in label coordinates and the induced
Eulerian flow, plus a weak-form residual checker.

In characteristic coordinates the solution is a closed-form polynomial in
time: with ``B = energy - energy_total / 2``,

    pos(t) = pos + t * vel + (t^2 / 4) * B
    vel(t) = vel + (t / 2) * B
    energy(t) = energy,   rho_w(t) = rho_w

Cell slopes of ``pos`` are quadratics in t; their positive roots are the
wave-breaking times where characteristics collapse and the energy of the
cell concentrates into an atom.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .eulerian import EulerianState
from .lagrangian import (LagrangianState, normalize, require_valid_lagrangian,
                         validate_lagrangian)
from .measure import cdf_gap
from .piecewise import PiecewiseConstant, PiecewiseLinear, combine_linear
from .transform import to_eulerian, to_lagrangian
from .validation import default_tol

#: Quadratic coefficients smaller than this are treated as linear when
#: solving for breaking times (avoids catastrophic cancellation).
QUADRATIC_COEFF_TOL = 1e-14

#: The two Eulerian readouts (with and without label normalization) must
#: agree to this accuracy.
READOUT_AGREE_TOL = 1e-10


def evolve(state: LagrangianState, t: float) -> LagrangianState:
    """Advance a Lagrangian state by time ``t >= 0`` (exact, closed form)."""
    t = float(t)
    if t < 0:
        raise ValueError("evolution runs forward in time only")
    if t == 0.0:
        return state
    half_total = 0.5 * state.energy_total
    pos = combine_linear([1.0, t, 0.25 * t * t],
                         [state.pos, state.vel, state.energy],
                         shift=-0.25 * t * t * half_total)
    vel = combine_linear([1.0, 0.5 * t],
                         [state.vel, state.energy],
                         shift=-0.5 * t * half_total)
    return LagrangianState(pos, vel, state.energy, state.rho_w)


@dataclass
class CellBreaking:
    """Breaking roots of one label cell."""

    lo: float
    hi: float
    times: tuple


@dataclass
class BreakingReport:
    """All future breaking events of a state."""

    cells: list
    first_time: float | None
    first_location: float | None


def breaking_times(state: LagrangianState) -> BreakingReport:
    """Positive roots of the cell-slope quadratics of ``pos(t)``.

    For each cell the slope evolves as ``(e/4) t^2 + v t + p`` with
    ``p, v, e`` the cell slopes of position, velocity and energy.  Roots
    are computed with the cancellation-free quadratic formula; quadratic
    coefficients at or below ``QUADRATIC_COEFF_TOL`` fall back to the
    linear case.  Cells that never break contribute no roots.
    """
    grid = np.unique(np.concatenate([state.pos.x, state.vel.x, state.energy.x]))
    dxi = np.diff(grid)
    p = np.diff(state.pos(grid)) / dxi
    v = np.diff(state.vel(grid)) / dxi
    e = np.diff(state.energy(grid)) / dxi

    cells = []
    first_time = None
    first_cell = None
    for i in range(dxi.size):
        roots = _positive_roots(0.25 * e[i], v[i], p[i])
        cells.append(CellBreaking(float(grid[i]), float(grid[i + 1]), tuple(roots)))
        if roots and (first_time is None or roots[0] < first_time):
            first_time = roots[0]
            first_cell = i
    first_location = None
    if first_time is not None:
        mid = 0.5 * (grid[first_cell] + grid[first_cell + 1])
        first_location = float(evolve(state, first_time).pos(mid))
    return BreakingReport(cells, first_time, first_location)


def _positive_roots(a: float, b: float, c: float) -> list:
    """Positive roots of ``a t^2 + b t + c`` with ``a, c >= 0`` up to rounding."""
    if a <= QUADRATIC_COEFF_TOL:
        # essentially linear: c >= 0, so a root needs negative drift
        if b < 0.0 and c > 0.0:
            return [-c / b]
        if b < 0.0 and c <= 0.0:
            return []  # already collapsed now; no future event
        return []
    disc = b * b - 4.0 * a * c
    if disc < 0.0:
        return []
    sq = float(np.sqrt(disc))
    # cancellation-free pairing of the two roots
    if b >= 0.0:
        q = -0.5 * (b + sq)
    else:
        q = -0.5 * (b - sq)
    roots = []
    r1 = q / a
    if q != 0.0:
        r2 = c / q
    else:
        r2 = 0.0
    for r in (r1, r2):
        if r > 0.0:
            roots.append(float(r))
    roots.sort()
    if len(roots) == 2 and roots[1] - roots[0] <= 1e-14 * max(1.0, roots[0]):
        roots = [roots[0]]
    return roots


def evolve_eulerian(state: EulerianState, t: float,
                    tol: float | None = None) -> EulerianState:
    """The Eulerian flow: transform, evolve, normalize labels, transform back.

    The readout is computed both with and without the normalization step
    (the transform quotients out relabeling, so the two must agree); a
    disagreement beyond ``READOUT_AGREE_TOL`` raises, as it would mean the
    label bookkeeping is broken.
    """
    t = float(t)
    if t < 0:
        raise ValueError("evolution runs forward in time only")
    if t == 0.0:
        return state
    tol = default_tol() if tol is None else tol
    lag = to_lagrangian(state, tol)
    moved = evolve(lag, t)
    out = to_eulerian(normalize(moved), tol)
    direct = to_eulerian(moved, tol)
    _assert_same_readout(out, direct)
    return out


def _assert_same_readout(a: EulerianState, b: EulerianState):
    probes = np.unique(np.concatenate([a.vel.x, b.vel.x]))
    dv = float(np.max(np.abs(a.vel(probes) - b.vel(probes))))
    dr = (a.rho - b.rho).sup_norm()
    dm = cdf_gap(a.energy, b.energy)
    if max(dv, dr, dm) > READOUT_AGREE_TOL:
        raise AssertionError(
            f"normalized and direct readouts disagree: velocity {dv:.3e}, "
            f"density {dr:.3e}, energy cdf {dm:.3e}")


# -- weak-form residuals ---------------------------------------------------


class SeparableTestFunction:
    """Space-time test function ``phi(x, t) = psi(x) * chi(t)``.

    ``psi`` is piecewise linear with compact support (constant-zero
    extensions); ``chi`` and its derivative are arbitrary callables.
    """

    def __init__(self, name: str, psi: PiecewiseLinear, chi, chi_dt):
        if psi.v[0] != 0.0 or psi.v[-1] != 0.0:
            raise ValueError("spatial profile must vanish at its endpoints")
        self.name = name
        self.psi = psi
        self.chi = chi
        self.chi_dt = chi_dt

    def space(self, t: float) -> PiecewiseLinear:
        return float(self.chi(t)) * self.psi

    def space_dt(self, t: float) -> PiecewiseLinear:
        return float(self.chi_dt(t)) * self.psi


def _smooth_window(t_max: float):
    """A smooth time cutoff equal to 1 at t=0 and vanishing at t_max
    together with all derivatives."""
    T = float(t_max)

    def chi(t):
        s = t / T
        if s >= 1.0 - 1e-9:
            return 0.0
        return float(np.exp(1.0 - 1.0 / (1.0 - s * s)))

    def chi_dt(t):
        s = t / T
        if s >= 1.0 - 1e-9:
            return 0.0
        g = 1.0 - s * s
        return float(np.exp(1.0 - 1.0 / g) * (-2.0 * s / (g * g)) / T)

    return chi, chi_dt


def builtin_test_functions(t_max: float, center: float = 0.0,
                           halfwidth: float = 2.0) -> list:
    """The three standard residual witnesses: smooth bump, tent and a
    truncated Gaussian profile, each sampled as a piecewise-linear function
    and multiplied by a smooth time window."""
    chi, chi_dt = _smooth_window(t_max)
    out = []

    n = 129
    s = np.linspace(-1.0, 1.0, n)
    with np.errstate(divide="ignore", over="ignore"):
        vals = np.where(np.abs(s) < 1.0,
                        np.exp(1.0 - 1.0 / np.maximum(1.0 - s * s, 1e-300)), 0.0)
    vals[0] = vals[-1] = 0.0
    out.append(SeparableTestFunction(
        "bump", PiecewiseLinear(center + halfwidth * s, vals), chi, chi_dt))

    tent = PiecewiseLinear([center - halfwidth, center, center + halfwidth],
                           [0.0, 1.0, 0.0])
    out.append(SeparableTestFunction("tent", tent, chi, chi_dt))

    cut = 4.0
    sg = np.linspace(-cut, cut, n)
    gvals = np.exp(-0.5 * sg * sg)
    gvals[0] = gvals[-1] = 0.0
    out.append(SeparableTestFunction(
        "gaussian", PiecewiseLinear(center + (halfwidth / cut) * sg, gvals),
        chi, chi_dt))
    return out


@dataclass
class ResidualTriple:
    """Weak-form defects of the three balance laws for one test function."""

    name: str
    velocity: float
    density: float
    energy: float

    def max_abs(self) -> float:
        return max(abs(self.velocity), abs(self.density), abs(self.energy))


def weak_residual(state: EulerianState, t_max: float, test_fn,
                  time_nodes, tol: float | None = None) -> ResidualTriple:
    """Defect of the three weak identities along the trajectory of ``state``.

    Spatial integrals are evaluated exactly (the integrands are piecewise
    quadratic on the merged breakpoint grid); the time integral uses the
    composite trapezoid rule on ``time_nodes`` (an int for a uniform grid
    on [0, t_max], or an explicit increasing array starting at 0 and ending
    at t_max).  A trajectory that solves the system weakly makes all three
    residuals vanish as the time grid is refined, at second order.
    """
    tol = default_tol() if tol is None else tol
    if np.isscalar(time_nodes):
        ts = np.linspace(0.0, float(t_max), int(time_nodes))
    else:
        ts = np.asarray(time_nodes, dtype=float)
        if ts[0] != 0.0 or abs(ts[-1] - float(t_max)) > 1e-12 or np.any(np.diff(ts) <= 0):
            raise ValueError("time nodes must increase from 0 to t_max")

    lag = to_lagrangian(state, tol)
    vel_int = np.empty(ts.size)
    rho_int = np.empty(ts.size)
    en_int = np.empty(ts.size)
    snapshots = {}
    for j, t in enumerate(ts):
        if t == 0.0:
            snap = state
        else:
            snap = to_eulerian(normalize(evolve(lag, float(t))), tol)
        if j in (0, ts.size - 1):
            snapshots[j] = snap
        phi = test_fn.space(float(t))
        dphi = test_fn.space_dt(float(t))
        vel_int[j], rho_int[j], en_int[j] = _spatial_terms(snap, phi, dphi)

    i_vel = float(np.trapezoid(vel_int, ts))
    i_rho = float(np.trapezoid(rho_int, ts))
    i_en = float(np.trapezoid(en_int, ts))

    phi0 = test_fn.space(0.0)
    phiT = test_fn.space(float(ts[-1]))
    b_vel = _dx_integral(snapshots[0], phi0, "vel") - _dx_integral(
        snapshots[ts.size - 1], phiT, "vel")
    b_rho = _dx_integral(snapshots[0], phi0, "rho") - _dx_integral(
        snapshots[ts.size - 1], phiT, "rho")
    b_en = _mu_integral(snapshots[0], phi0) - _mu_integral(
        snapshots[ts.size - 1], phiT)
    return ResidualTriple(getattr(test_fn, "name", "phi"),
                          i_vel + b_vel, i_rho + b_rho, i_en + b_en)


def _merged_grid(state: EulerianState, phi: PiecewiseLinear) -> np.ndarray:
    lo, hi = phi.span
    nodes = np.concatenate([state.x_nodes(), phi.x])
    nodes = nodes[(nodes >= lo) & (nodes <= hi)]
    return np.unique(np.concatenate([[lo], nodes, [hi]]))


def _simpson(grid: np.ndarray, fa, fm, fb) -> float:
    h = np.diff(grid)
    return float(np.sum(h / 6.0 * (fa + 4.0 * fm + fb)))


def _spatial_terms(state: EulerianState, phi: PiecewiseLinear,
                   dphi: PiecewiseLinear):
    """The three space integrals at one instant.

    All integrands are piecewise quadratic on the merged grid (velocity and
    test function linear per cell, densities and test-function slope
    constant per cell, the energy distribution function linear inside each
    cell), so a per-cell Simpson rule is exact.
    """
    grid = _merged_grid(state, phi)
    a, b = grid[:-1], grid[1:]
    m = 0.5 * (a + b)
    phix = phi.derivative()

    u_a, u_m, u_b = state.vel(a), state.vel(m), state.vel(b)
    p_a, p_m, p_b = phi(a), phi(m), phi(b)
    d_a, d_m, d_b = dphi(a), dphi(m), dphi(b)
    px = phix(m)
    rho_m = state.rho(m)
    dens_m = state.energy.density(m)

    mu = state.energy
    total = mu.total_mass()
    f_a = mu.cdf_right(a)   # inside-cell limit from the right of a
    f_b = mu.cdf_left(b)    # inside-cell limit from the left of b
    f_m = mu.cdf_left(m)

    # velocity law: u phi_t + (u^2/2) phi_x + (1/4)(2F - total) phi
    vel_term = _simpson(
        grid,
        u_a * d_a + 0.5 * u_a * u_a * px + 0.25 * (2.0 * f_a - total) * p_a,
        u_m * d_m + 0.5 * u_m * u_m * px + 0.25 * (2.0 * f_m - total) * p_m,
        u_b * d_b + 0.5 * u_b * u_b * px + 0.25 * (2.0 * f_b - total) * p_b)

    # density law: rho (phi_t + u phi_x)
    rho_term = _simpson(grid,
                        rho_m * (d_a + u_a * px),
                        rho_m * (d_m + u_m * px),
                        rho_m * (d_b + u_b * px))

    # energy law: (phi_t + u phi_x) against the measure
    en_term = _simpson(grid,
                       dens_m * (d_a + u_a * px),
                       dens_m * (d_m + u_m * px),
                       dens_m * (d_b + u_b * px))
    for p, w in zip(mu.atom_pos, mu.atom_mass):
        pad = max(1e-9, 1e-9 * abs(p))
        px_avg = 0.5 * (phi.derivative()(p - pad) + phi.derivative()(p + pad))
        en_term += w * (dphi(p) + state.vel(p) * px_avg)
    return vel_term, rho_term, en_term


def _dx_integral(state: EulerianState, phi: PiecewiseLinear, which: str) -> float:
    """Exact integral of ``u * phi`` or ``rho * phi`` over the line."""
    grid = _merged_grid(state, phi)
    a, b = grid[:-1], grid[1:]
    m = 0.5 * (a + b)
    if which == "vel":
        fa = state.vel(a) * phi(a)
        fm = state.vel(m) * phi(m)
        fb = state.vel(b) * phi(b)
    else:
        r = state.rho(m)
        fa = r * phi(a)
        fm = r * phi(m)
        fb = r * phi(b)
    return _simpson(grid, fa, fm, fb)


def _mu_integral(state: EulerianState, phi: PiecewiseLinear) -> float:
    """Exact integral of ``phi`` against the energy measure."""
    grid = _merged_grid(state, phi)
    a, b = grid[:-1], grid[1:]
    m = 0.5 * (a + b)
    d = state.energy.density(m)
    out = _simpson(grid, d * phi(a), d * phi(m), d * phi(b))
    for p, w in zip(state.energy.atom_pos, state.energy.atom_mass):
        out += w * phi(p)
    return float(out)
