"""Finite positive measures with piecewise-constant density plus point atoms.

The singular part is restricted to finitely many atoms; that is the only
singular behaviour the evolution can produce from piecewise-linear data,
where energy concentrates at isolated points while characteristics overlap
and is released again afterwards.
"""

from __future__ import annotations

import numpy as np

from .piecewise import PiecewiseConstant, PiecewiseLinear

#: Atoms closer than this are coalesced into one (their masses add).
ATOM_MERGE_TOL = 1e-12

#: A cell of a nondecreasing map whose image is shorter than this (relative
#: to the local scale) is treated as collapsed: its mass lands in an atom.
FLAT_IMAGE_TOL = 1e-14


class RadonMeasure:
    """Finite positive measure: absolutely continuous density plus atoms.

    Parameters
    ----------
    density : PiecewiseConstant
        Nonnegative density of the absolutely continuous part.
    atoms : sequence of (location, mass)
        Point masses; masses must be positive.  Atoms are sorted and
        coalesced on construction.
    """

    __slots__ = ("density", "atom_pos", "atom_mass")

    def __init__(self, density: PiecewiseConstant | None = None, atoms=()):
        if density is None:
            density = PiecewiseConstant.zero()
        if not density.is_zero and np.any(density.c < 0):
            # rounding-level negatives are clamped; anything worse is kept
            # verbatim so validation can report it
            floor = -ATOM_MERGE_TOL * max(1.0, density.sup_norm())
            if np.all(density.c >= floor):
                density = PiecewiseConstant(density.x, np.maximum(density.c, 0.0))
        self.density = density
        pos, mass = _normalize_atoms(atoms)
        self.atom_pos = pos
        self.atom_mass = mass
        self.atom_pos.setflags(write=False)
        self.atom_mass.setflags(write=False)

    @classmethod
    def zero(cls) -> "RadonMeasure":
        return cls(PiecewiseConstant.zero(), ())

    @property
    def atoms(self):
        """List of (location, mass) pairs."""
        return list(zip(self.atom_pos.tolist(), self.atom_mass.tolist()))

    def __repr__(self):  # pragma: no cover - debugging aid
        return (f"RadonMeasure(cells={self.density.c.size}, "
                f"atoms={self.atom_pos.size}, mass={self.total_mass():g})")

    # -- mass queries ----------------------------------------------------

    def total_mass(self) -> float:
        return float(self.density.integral() + np.sum(self.atom_mass))

    def cdf_left(self, x):
        """Measure of the open half line (-inf, x); vectorised."""
        x_arr = np.asarray(x, dtype=float)
        out = self.density.integral_upto(x_arr)
        if self.atom_pos.size:
            cum = np.concatenate([[0.0], np.cumsum(self.atom_mass)])
            out = out + cum[np.searchsorted(self.atom_pos, x_arr, side="left")]
        if np.isscalar(x) or getattr(x, "ndim", 1) == 0:
            return float(out)
        return out

    def cdf_right(self, x):
        """Measure of the closed half line (-inf, x]; vectorised."""
        x_arr = np.asarray(x, dtype=float)
        out = self.density.integral_upto(x_arr)
        if self.atom_pos.size:
            cum = np.concatenate([[0.0], np.cumsum(self.atom_mass)])
            out = out + cum[np.searchsorted(self.atom_pos, x_arr, side="right")]
        if np.isscalar(x) or getattr(x, "ndim", 1) == 0:
            return float(out)
        return out

    def atom_mass_at(self, x: float, tol: float = ATOM_MERGE_TOL) -> float:
        """Mass of the atom at ``x`` (0.0 if there is none within ``tol``)."""
        if not self.atom_pos.size:
            return 0.0
        i = int(np.argmin(np.abs(self.atom_pos - x)))
        return float(self.atom_mass[i]) if abs(self.atom_pos[i] - x) <= tol else 0.0

    # -- structure -------------------------------------------------------

    def nodes(self) -> np.ndarray:
        """All locations where the distribution function can kink or jump."""
        return np.unique(np.concatenate([self.density.x, self.atom_pos]))


def _normalize_atoms(atoms):
    pairs = [(float(p), float(m)) for p, m in atoms]
    if any(not np.isfinite(p) or not np.isfinite(m) for p, m in pairs):
        raise ValueError("atom data must be finite")
    if any(m < 0 for _, m in pairs):
        raise ValueError("atom masses must be positive")
    pairs = [(p, m) for p, m in pairs if m > 0.0]
    pairs.sort()
    pos: list = []
    mass: list = []
    for p, m in pairs:
        if pos and p - pos[-1] <= ATOM_MERGE_TOL * max(1.0, abs(p)):
            mass[-1] += m
        else:
            pos.append(p)
            mass.append(m)
    return np.asarray(pos, dtype=float), np.asarray(mass, dtype=float)


def pushforward(pos: PiecewiseLinear, weight: PiecewiseConstant) -> RadonMeasure:
    """Image measure of ``weight(s) ds`` under a nondecreasing map ``pos``.

    Cells on which ``pos`` increases map their mass to a density cell of
    the image; cells on which ``pos`` is flat collapse their whole mass
    into an atom at the image point.  Total mass is preserved exactly up
    to rounding.
    """
    if np.any(np.diff(pos.v) < 0):
        raise ValueError("pushforward needs a nondecreasing map")
    if weight.is_zero:
        return RadonMeasure.zero()
    if np.any(weight.c < -ATOM_MERGE_TOL * max(1.0, weight.sup_norm())):
        raise ValueError("pushforward needs a nonnegative weight")

    grid = np.union1d(pos.x, weight.x)
    vals = pos(grid)
    mids = 0.5 * (grid[:-1] + grid[1:])
    wvals = np.maximum(weight(mids), 0.0)

    dens_x: list = [float(vals[0])]
    dens_c: list = []
    atoms: list = []
    for i in range(mids.size):
        m = wvals[i] * (grid[i + 1] - grid[i])
        a, b = float(vals[i]), float(vals[i + 1])
        flat = (b - a) <= FLAT_IMAGE_TOL * max(1.0, abs(a), abs(b))
        if flat:
            if m > 0.0:
                atoms.append((a, m))
            b = a
        else:
            if dens_x[-1] != a:
                # should not happen for a continuous map; guard anyway
                dens_x.append(a)
                dens_c.append(0.0)
            dens_x.append(b)
            dens_c.append(m / (b - a))
        if dens_x[-1] < b:
            dens_x.append(b)
            dens_c.append(0.0)
    density = PiecewiseConstant.from_cells(np.asarray(dens_x), np.asarray(dens_c))
    return RadonMeasure(density, atoms)


def cdf_gap(a: RadonMeasure, b: RadonMeasure) -> float:
    """Sup distance between the two distribution functions.

    Both the left and right limits are compared at every node of either
    measure; between nodes the distribution functions are affine, so this
    sup is exact.
    """
    probes = np.unique(np.concatenate([a.nodes(), b.nodes(), [0.0]]))
    gap = np.max(np.abs(a.cdf_left(probes) - b.cdf_left(probes))) if probes.size else 0.0
    gap_r = np.max(np.abs(a.cdf_right(probes) - b.cdf_right(probes))) if probes.size else 0.0
    return float(max(gap, gap_r, abs(a.total_mass() - b.total_mass())))
