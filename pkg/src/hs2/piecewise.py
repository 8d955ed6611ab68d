"""Breakpoint-exact piecewise-linear and piecewise-constant functions on R.

Every operation in this module works directly on breakpoints: results carry
the exact merged node set of their inputs and no resampling onto auxiliary
grids ever happens.  This is what makes flat cells (zero slope over an
interval) representable exactly, which the rest of the package relies on.

Two extension modes are supported outside the breakpoint span:

* ``"const"``  -- continue with the boundary value (bounded functions),
* ``"slope1"`` -- continue with slope one (functions of the form
  identity + bounded part, e.g. monotone reparametrisations).

Piecewise-constant functions are always zero outside their span.
"""

from __future__ import annotations

import numpy as np

EXT_CONST = "const"
EXT_SLOPE1 = "slope1"

_EXT_SLOPES = {EXT_CONST: 0.0, EXT_SLOPE1: 1.0}

#: Relative node-merge tolerance: nodes closer than this times the span of
#: the breakpoint list are considered duplicates produced by rounding.
MERGE_REL_TOL = 1e-12


def _as_1d(a) -> np.ndarray:
    out = np.asarray(a, dtype=float)
    if out.ndim != 1:
        raise ValueError("expected a one-dimensional array of reals")
    if out.size and not np.all(np.isfinite(out)):
        raise ValueError("breakpoint data must be finite")
    return out


def merge_close_nodes(x: np.ndarray, *values: np.ndarray):
    """Drop nodes closer than ``MERGE_REL_TOL * span`` to their predecessor.

    The first node of each cluster survives together with its values.
    Returns ``(x, *values)`` filtered to the surviving nodes.
    """
    x = np.asarray(x, dtype=float)
    if x.size <= 1:
        return (x, *values)
    span = x[-1] - x[0]
    tol = MERGE_REL_TOL * max(span, abs(x[0]), abs(x[-1]), 1e-300)
    keep = np.empty(x.size, dtype=bool)
    keep[0] = True
    last = x[0]
    for i in range(1, x.size):
        if x[i] - last > tol:
            keep[i] = True
            last = x[i]
        else:
            keep[i] = False
    return (x[keep], *(np.asarray(v, dtype=float)[keep] for v in values))


class PiecewiseLinear:
    """Continuous piecewise-linear function with explicit extension modes.

    Parameters
    ----------
    x : array_like
        Strictly increasing breakpoints, at least two.
    v : array_like
        Function values at the breakpoints.
    left, right : str
        Extension mode beyond the first/last breakpoint, ``"const"`` or
        ``"slope1"``.
    """

    __slots__ = ("x", "v", "left", "right")

    def __init__(self, x, v, left: str = EXT_CONST, right: str = EXT_CONST):
        x = _as_1d(x)
        v = _as_1d(v)
        if x.size < 2:
            raise ValueError("a piecewise-linear function needs at least two breakpoints")
        if x.size != v.size:
            raise ValueError("breakpoints and values must have equal length")
        if np.any(np.diff(x) <= 0):
            raise ValueError("breakpoints must be strictly increasing")
        if left not in _EXT_SLOPES or right not in _EXT_SLOPES:
            raise ValueError(f"extension mode must be one of {sorted(_EXT_SLOPES)}")
        self.x = x
        self.v = v
        self.left = left
        self.right = right
        self.x.setflags(write=False)
        self.v.setflags(write=False)

    # -- constructors -------------------------------------------------

    @classmethod
    def from_nodes(cls, x, v, left: str = EXT_CONST, right: str = EXT_CONST) -> "PiecewiseLinear":
        """Build from possibly rounding-polluted nodes, merging near-duplicates."""
        x = _as_1d(x)
        v = _as_1d(v)
        order = np.argsort(x, kind="stable")
        x, v = merge_close_nodes(x[order], v[order])
        return cls(x, v, left, right)

    @classmethod
    def constant(cls, value: float, span=(0.0, 1.0)) -> "PiecewiseLinear":
        return cls([span[0], span[1]], [value, value], EXT_CONST, EXT_CONST)

    @classmethod
    def identity(cls, span=(0.0, 1.0)) -> "PiecewiseLinear":
        return cls([span[0], span[1]], [span[0], span[1]], EXT_SLOPE1, EXT_SLOPE1)

    # -- basic queries -------------------------------------------------

    @property
    def span(self):
        return float(self.x[0]), float(self.x[-1])

    @property
    def ext_slopes(self):
        return _EXT_SLOPES[self.left], _EXT_SLOPES[self.right]

    def slopes(self) -> np.ndarray:
        """Cell slopes, one per breakpoint interval."""
        return np.diff(self.v) / np.diff(self.x)

    def __call__(self, t):
        t_arr = np.asarray(t, dtype=float)
        out = np.interp(t_arr, self.x, self.v)
        sl, sr = self.ext_slopes
        if sl != 0.0:
            mask = t_arr < self.x[0]
            if np.any(mask):
                out = np.where(mask, self.v[0] + sl * (t_arr - self.x[0]), out)
        if sr != 0.0:
            mask = t_arr > self.x[-1]
            if np.any(mask):
                out = np.where(mask, self.v[-1] + sr * (t_arr - self.x[-1]), out)
        if np.isscalar(t) or getattr(t, "ndim", 1) == 0:
            return float(out)
        return out

    def __repr__(self):  # pragma: no cover - debugging aid
        return (f"PiecewiseLinear(n={self.x.size}, span=({self.x[0]:g}, {self.x[-1]:g}), "
                f"ext=({self.left}, {self.right}))")

    # -- calculus ------------------------------------------------------

    def derivative(self) -> "PiecewiseConstant":
        """Cell-wise derivative over the span.

        Outside the span the derivative equals the extension slope; the
        returned piecewise-constant object only describes the span cells
        (it is zero outside), so callers that care about the extensions
        must consult :attr:`ext_slopes`.
        """
        return PiecewiseConstant(self.x, self.slopes())

    def resample(self, grid) -> np.ndarray:
        """Values on an arbitrary grid (same as ``self(grid)``)."""
        return self(np.asarray(grid, dtype=float))

    def with_nodes(self, grid) -> "PiecewiseLinear":
        """Same function re-expressed on a superset of nodes.

        ``grid`` must contain the span of ``self``; nodes are merged with
        the existing ones.
        """
        g = np.union1d(self.x, _as_1d(grid))
        return PiecewiseLinear(g, self(g), self.left, self.right)

    def simplify(self) -> "PiecewiseLinear":
        """Drop interior nodes that are exactly collinear with their neighbours."""
        if self.x.size == 2:
            return self
        sl = self.slopes()
        keep = np.ones(self.x.size, dtype=bool)
        keep[1:-1] = sl[:-1] != sl[1:]
        return PiecewiseLinear(self.x[keep], self.v[keep], self.left, self.right)

    # -- algebra -------------------------------------------------------

    def _combine(self, other: "PiecewiseLinear", op) -> "PiecewiseLinear":
        # merge near-coincident nodes of the two grids: a pair one ulp apart
        # would otherwise form a sliver cell whose evaluation noise reads as
        # an O(1) slope of the result
        grid = np.union1d(self.x, other.x)
        grid, = merge_close_nodes(grid)
        vals = op(self(grid), other(grid))
        sl = op(self.ext_slopes[0], other.ext_slopes[0])
        sr = op(self.ext_slopes[1], other.ext_slopes[1])
        return PiecewiseLinear(grid, vals, _slope_to_ext(sl), _slope_to_ext(sr))

    def __add__(self, other):
        if isinstance(other, PiecewiseLinear):
            return self._combine(other, lambda a, b: a + b)
        return PiecewiseLinear(self.x, self.v + float(other), self.left, self.right)

    def __radd__(self, other):
        return self.__add__(other)

    def __sub__(self, other):
        if isinstance(other, PiecewiseLinear):
            return self._combine(other, lambda a, b: a - b)
        return PiecewiseLinear(self.x, self.v - float(other), self.left, self.right)

    def __neg__(self):
        return PiecewiseLinear(self.x, -self.v,
                               _slope_to_ext(-self.ext_slopes[0]),
                               _slope_to_ext(-self.ext_slopes[1]))

    def __mul__(self, scalar):
        c = float(scalar)
        return PiecewiseLinear(self.x, c * self.v,
                               _slope_to_ext(c * self.ext_slopes[0]),
                               _slope_to_ext(c * self.ext_slopes[1]))

    def __rmul__(self, scalar):
        return self.__mul__(scalar)

    # -- norms -----------------------------------------------------------

    def sup_norm(self) -> float:
        """Supremum norm over all of R; requires constant extensions."""
        if self.left != EXT_CONST or self.right != EXT_CONST:
            raise ValueError("sup norm is infinite for slope-1 extensions")
        return float(np.max(np.abs(self.v)))

    def deriv_l2(self) -> float:
        """L2 norm of the derivative over all of R; requires constant extensions."""
        if self.left != EXT_CONST or self.right != EXT_CONST:
            raise ValueError("derivative is not square integrable with slope-1 extensions")
        sl = self.slopes()
        return float(np.sqrt(np.sum(sl * sl * np.diff(self.x))))

    # -- comparison helper ---------------------------------------------

    def isclose(self, other: "PiecewiseLinear", tol: float = 1e-12) -> bool:
        """Pointwise agreement on merged nodes, probes beyond both ends included."""
        if self.ext_slopes != other.ext_slopes:
            return False
        grid = np.union1d(self.x, other.x)
        pad = max(1.0, grid[-1] - grid[0])
        grid = np.concatenate([[grid[0] - pad], grid, [grid[-1] + pad]])
        return bool(np.max(np.abs(self(grid) - other(grid))) <= tol)


def _slope_to_ext(s: float) -> str:
    if s == 0.0:
        return EXT_CONST
    if s == 1.0:
        return EXT_SLOPE1
    raise ValueError(f"operation produces extension slope {s}, "
                     "only 0 (const) and 1 (slope1) are representable")


def combine_linear(coeffs, funcs, shift: float = 0.0) -> PiecewiseLinear:
    """Exact linear combination ``sum(c_i * f_i) + shift`` on the merged grid.

    Merges the node sets once, so repeated pairwise addition noise is avoided.
    The resulting extension slopes must land on 0 or 1.
    """
    funcs = list(funcs)
    coeffs = [float(c) for c in coeffs]
    if len(funcs) != len(coeffs) or not funcs:
        raise ValueError("need matching, non-empty coefficient and function lists")
    grid = funcs[0].x
    for f in funcs[1:]:
        grid = np.union1d(grid, f.x)
    grid, = merge_close_nodes(grid)
    vals = np.full(grid.shape, shift, dtype=float)
    sl = sr = 0.0
    for c, f in zip(coeffs, funcs):
        if c == 0.0:
            continue
        vals += c * f(grid)
        sl += c * f.ext_slopes[0]
        sr += c * f.ext_slopes[1]
    return PiecewiseLinear(grid, vals, _slope_to_ext(sl), _slope_to_ext(sr))


class PiecewiseConstant:
    """Piecewise-constant function, identically zero outside its span.

    ``x`` holds the cell boundaries (``len(c) + 1`` of them) and ``c`` the
    cell values.  The function is right-continuous: at an interior
    breakpoint the value of the cell to the right applies.  An empty node
    list represents the zero function.
    """

    __slots__ = ("x", "c")

    def __init__(self, x, c):
        x = _as_1d(x)
        c = _as_1d(c)
        if x.size == 0:
            if c.size != 0:
                raise ValueError("cell values without breakpoints")
        else:
            if x.size != c.size + 1:
                raise ValueError("need exactly one more breakpoint than cell values")
            if np.any(np.diff(x) <= 0):
                raise ValueError("breakpoints must be strictly increasing")
        self.x = x
        self.c = c
        self.x.setflags(write=False)
        self.c.setflags(write=False)

    # -- constructors -------------------------------------------------

    @classmethod
    def zero(cls) -> "PiecewiseConstant":
        return cls([], [])

    @classmethod
    def from_cells(cls, x, c) -> "PiecewiseConstant":
        """Normalised constructor: merges duplicate nodes, fuses equal
        neighbouring cells and trims zero cells from both ends."""
        x = _as_1d(x)
        c = _as_1d(c)
        if x.size and x.size != c.size + 1:
            raise ValueError("need exactly one more breakpoint than cell values")
        if x.size <= 1:
            return cls.zero()
        tol = MERGE_REL_TOL * max(x[-1] - x[0], abs(x[0]), abs(x[-1]), 1e-300)
        # walk the cells, skipping rounding-width slivers and fusing equal
        # neighbours as we go
        xs = [x[0]]
        cs: list = []
        for i in range(c.size):
            if x[i + 1] - xs[-1] <= tol:
                continue
            if cs and c[i] == cs[-1]:
                xs[-1] = x[i + 1]
            else:
                xs.append(x[i + 1])
                cs.append(c[i])
        # trim zero cells from both ends
        lo, hi = 0, len(cs)
        while lo < hi and cs[lo] == 0.0:
            lo += 1
        while hi > lo and cs[hi - 1] == 0.0:
            hi -= 1
        if lo == hi:
            return cls.zero()
        return cls(np.asarray(xs[lo:hi + 1]), np.asarray(cs[lo:hi]))

    # -- queries -------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return self.c.size == 0

    @property
    def span(self):
        if self.is_zero:
            return (0.0, 0.0)
        return float(self.x[0]), float(self.x[-1])

    def __call__(self, t):
        t_arr = np.asarray(t, dtype=float)
        if self.is_zero:
            out = np.zeros(t_arr.shape)
        else:
            idx = np.searchsorted(self.x, t_arr, side="right") - 1
            inside = (idx >= 0) & (idx < self.c.size)
            out = np.where(inside, self.c[np.clip(idx, 0, self.c.size - 1)], 0.0)
        if np.isscalar(t) or getattr(t, "ndim", 1) == 0:
            return float(out)
        return out

    def __repr__(self):  # pragma: no cover - debugging aid
        if self.is_zero:
            return "PiecewiseConstant(zero)"
        return f"PiecewiseConstant(cells={self.c.size}, span=({self.x[0]:g}, {self.x[-1]:g}))"

    # -- integrals and norms -------------------------------------------

    def integral(self) -> float:
        if self.is_zero:
            return 0.0
        return float(np.sum(self.c * np.diff(self.x)))

    def integral_upto(self, t):
        """Integral over (-inf, t], vectorised in ``t``."""
        t_arr = np.asarray(t, dtype=float)
        if self.is_zero:
            out = np.zeros(t_arr.shape)
        else:
            cum = np.concatenate([[0.0], np.cumsum(self.c * np.diff(self.x))])
            idx = np.clip(np.searchsorted(self.x, t_arr, side="right") - 1, 0, self.c.size)
            base = cum[idx]
            inside = (idx < self.c.size) & (t_arr > self.x[0])
            partial = np.where(inside, self.c[np.clip(idx, 0, self.c.size - 1)]
                               * (t_arr - self.x[np.clip(idx, 0, self.x.size - 1)]), 0.0)
            out = np.where(t_arr <= self.x[0], 0.0, base + partial)
            out = np.where(t_arr >= self.x[-1], cum[-1], out)
        if np.isscalar(t) or getattr(t, "ndim", 1) == 0:
            return float(out)
        return out

    def l2_norm(self) -> float:
        if self.is_zero:
            return 0.0
        return float(np.sqrt(np.sum(self.c * self.c * np.diff(self.x))))

    def sup_norm(self) -> float:
        if self.is_zero:
            return 0.0
        return float(np.max(np.abs(self.c)))

    def min_value(self) -> float:
        if self.is_zero:
            return 0.0
        return float(min(np.min(self.c), 0.0))

    # -- algebra -------------------------------------------------------

    def _combine(self, other: "PiecewiseConstant", op) -> "PiecewiseConstant":
        if self.is_zero and other.is_zero:
            return PiecewiseConstant.zero()
        grid = np.union1d(self.x, other.x)
        if grid.size < 2:
            return PiecewiseConstant.zero()
        mid = 0.5 * (grid[:-1] + grid[1:])
        return PiecewiseConstant.from_cells(grid, op(self(mid), other(mid)))

    def __add__(self, other):
        if isinstance(other, PiecewiseConstant):
            return self._combine(other, lambda a, b: a + b)
        return NotImplemented

    def __sub__(self, other):
        if isinstance(other, PiecewiseConstant):
            return self._combine(other, lambda a, b: a - b)
        return NotImplemented

    def __neg__(self):
        return PiecewiseConstant(self.x, -self.c)

    def __mul__(self, other):
        if isinstance(other, PiecewiseConstant):
            return self._combine(other, lambda a, b: a * b)
        return PiecewiseConstant(self.x, float(other) * self.c)

    def __rmul__(self, other):
        return self.__mul__(other)

    def isclose(self, other: "PiecewiseConstant", tol: float = 1e-12) -> bool:
        diff = self - other
        return diff.sup_norm() <= tol


# -- composition and inversion ------------------------------------------


def _first_reach(f: PiecewiseLinear, level: float):
    """Leftmost t with f(t) == level for nondecreasing f, or None if unattained."""
    v = f.v
    sl, sr = f.ext_slopes
    if level < v[0] or (level == v[0] and sl != 0.0):
        if sl == 0.0:
            return None if level != v[0] else float(f.x[0])
        return float(f.x[0] + (level - v[0]) / sl)
    if level > v[-1]:
        if sr == 0.0:
            return None
        return float(f.x[-1] + (level - v[-1]) / sr)
    i = int(np.searchsorted(v, level, side="left"))
    if v[i] == level:
        # walk back across any flat run that already sits at this level
        while i > 0 and v[i - 1] == level:
            i -= 1
        return float(f.x[i])
    # crossing strictly inside cell (i-1, i)
    x0, x1 = f.x[i - 1], f.x[i]
    y0, y1 = v[i - 1], v[i]
    return float(x0 + (level - y0) * (x1 - x0) / (y1 - y0))


def _require_nondecreasing(g: PiecewiseLinear, what: str):
    if np.any(np.diff(g.v) < 0):
        raise ValueError(f"{what} must be nondecreasing")


def _preimage_nodes(g: PiecewiseLinear, levels) -> list:
    """First-reach preimages under nondecreasing g of each level that is attained."""
    out = []
    for b in np.asarray(levels, dtype=float):
        t = _first_reach(g, b)
        if t is not None:
            out.append(t)
    return out


def compose(f: PiecewiseLinear, g: PiecewiseLinear) -> PiecewiseLinear:
    """Exact composition ``f(g(.))`` for nondecreasing ``g``.

    The result's breakpoints are g's own breakpoints plus the first-reach
    preimages under g of f's breakpoints, so no kink of the composite is
    lost.  Flat cells of g need no interior nodes.
    """
    _require_nondecreasing(g, "inner function of a composition")
    nodes = list(g.x) + _preimage_nodes(g, f.x)
    nodes = np.unique(np.asarray(nodes, dtype=float))
    nodes, = merge_close_nodes(nodes)
    vals = f(g(nodes))
    gl, gr = g.ext_slopes
    left = EXT_CONST if gl == 0.0 else f.left
    right = EXT_CONST if gr == 0.0 else f.right
    return PiecewiseLinear(nodes, vals, left, right)


def compose_pc(w: PiecewiseConstant, g: PiecewiseLinear) -> PiecewiseConstant:
    """Exact composition ``w(g(.))`` for nondecreasing ``g`` (right-continuous w)."""
    _require_nondecreasing(g, "inner function of a composition")
    if w.is_zero:
        return PiecewiseConstant.zero()
    gl, gr = g.ext_slopes
    # the composite must vanish outside a bounded set: with a slope-1
    # extension g eventually leaves the span of w, with a constant
    # extension the persisting value w(g(+-inf)) has to be zero.
    if gl == 0.0 and w(float(g.v[0])) != 0.0:
        raise ValueError("composition is a nonzero constant near -inf; "
                         "not representable with compact support")
    if gr == 0.0 and w(float(g.v[-1])) != 0.0:
        raise ValueError("composition is a nonzero constant near +inf; "
                         "not representable with compact support")
    nodes = list(g.x) + _preimage_nodes(g, w.x)
    nodes = np.unique(np.asarray(nodes, dtype=float))
    nodes, = merge_close_nodes(nodes)
    if nodes.size < 2:
        return PiecewiseConstant.zero()
    mid = 0.5 * (nodes[:-1] + nodes[1:])
    return PiecewiseConstant.from_cells(nodes, w(g(mid)))


def pseudo_inverse(f: PiecewiseLinear) -> PiecewiseLinear:
    """Inverse of a strictly increasing piecewise-linear bijection of R.

    Requires slope-1 extensions on both sides (so the function is onto) and
    strictly positive slopes on every cell.  Inputs with flat cells are
    rejected: their generalized inverse has jumps and leaves the continuous
    class this module works in.
    """
    if f.left != EXT_SLOPE1 or f.right != EXT_SLOPE1:
        raise ValueError("inversion needs slope-1 extensions on both sides")
    if np.any(np.diff(f.v) <= 0):
        raise ValueError("inversion needs strictly increasing values "
                         "(flat or decreasing cells have no continuous inverse)")
    return PiecewiseLinear(f.v, f.x, EXT_SLOPE1, EXT_SLOPE1)


# -- norms over component quadruples --------------------------------------


def component_norm(f: PiecewiseLinear) -> float:
    """Sup norm plus L2 norm of the derivative (finite only for bounded f)."""
    return f.sup_norm() + f.deriv_l2()


def quad_norm(dpos: PiecewiseLinear, dvel: PiecewiseLinear,
              den: PiecewiseLinear, drw: PiecewiseConstant) -> float:
    """Norm of a four-component perturbation: three graph norms plus one L2."""
    return (component_norm(dpos) + component_norm(dvel)
            + component_norm(den) + drw.l2_norm())
