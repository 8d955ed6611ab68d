"""Certified two-sided bracket on the relabeling-invariant distance.

The distance between Lagrangian states is defined through an infimum over
relabelings of both arguments, which no finite computation attains.  This
module therefore never reports a point estimate: it computes

* an upper bound, by exhibiting concrete relabelings (candidate warps
  refined by coordinate descent on their node ordinates), and
* a lower bound, valid for normalized states: half the sup-norm distance
  of the first three components, which the relabeling infimum can never
  undercut.

The stability check compares the lower bound after evolution against the
theoretical growth factor applied to the upper bound before evolution, so
a pass is a genuine certificate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .lagrangian import (LagrangianState, Relabeling, _relabel_raw, normalize,
                         require_valid_lagrangian, validate_lagrangian)
from .piecewise import (EXT_SLOPE1, PiecewiseLinear, combine_linear, compose,
                        merge_close_nodes, pseudo_inverse, quad_norm)
from .validation import InvalidStateError

#: Neighbouring warp ordinates keep at least this separation during descent.
DESCENT_GAP = 1e-8

#: Total objective evaluations allowed per one-sided alignment.
DESCENT_BUDGET = 200

#: Golden-section iterations per node line search.
GOLDEN_ITERS = 12

#: Relative float-noise allowance folded into the upper bound, so the
#: bracket stays ordered even when both bounds sit at rounding level.
BRACKET_EPS = 1e-13

_INV_GOLD = (np.sqrt(5.0) - 1.0) / 2.0


def _magnitude(state: LagrangianState) -> float:
    """Scale of a state's ordinates, for sizing rounding allowances."""
    return max(float(np.max(np.abs(state.pos.v))),
               float(np.max(np.abs(state.vel.v))),
               abs(state.energy_total), 1.0)


def norm_distance(a: LagrangianState, b: LagrangianState) -> float:
    """Plain norm of the component differences (no relabeling)."""
    return quad_norm(a.pos - b.pos, a.vel - b.vel, a.energy - b.energy,
                     a.rho_w - b.rho_w)


@dataclass
class MetricBracket:
    """Two-sided bracket on the relabeling-invariant distance.

    ``lower <= distance <= upper``; the witnesses are the relabelings that
    realise the upper bound (``align_ab`` applied to the first state,
    ``align_ba`` to the second).
    """

    lower: float
    upper: float
    align_ab: Relabeling
    align_ba: Relabeling

    @property
    def width(self) -> float:
        return self.upper - self.lower


def lower_distance(a: LagrangianState, b: LagrangianState) -> float:
    """Certified lower bound; requires both states normalized.

    Half the sup-norm distance of position, velocity and cumulative energy
    never exceeds the relabeling-invariant distance between normalized
    states.
    """
    for name, st in (("first", a), ("second", b)):
        rep = validate_lagrangian(st)
        if not rep.ok:
            raise InvalidStateError(rep)
        if not rep.normalized:
            raise ValueError(f"lower bound needs normalized labels; "
                             f"{name} state has pos + energy != id")
    return 0.5 * ((a.pos - b.pos).sup_norm()
                  + (a.vel - b.vel).sup_norm()
                  + (a.energy - b.energy).sup_norm())


def upper_distance(a: LagrangianState, b: LagrangianState,
                   budget: int = DESCENT_BUDGET) -> MetricBracket:
    """Upper bound via explicit relabelings, as a full bracket.

    The bound is ``|a . f - b| + |a - b . g|`` minimised over a candidate
    family (identity, label-map alignment, node matching, affine span map)
    and then polished by coordinate descent on the warp ordinates, plus a
    rounding allowance of ``BRACKET_EPS`` times the state magnitude that
    keeps the bracket ordered when both sides sit at float-noise level.
    The lower field of the returned bracket is filled in when both states
    are normalized and left at 0.0 otherwise.
    """
    val_ab, f = _one_sided(a, b, budget)
    val_ba, g = _one_sided(b, a, budget)
    upper = val_ab + val_ba + BRACKET_EPS * max(_magnitude(a), _magnitude(b))
    rep_a = validate_lagrangian(a)
    rep_b = validate_lagrangian(b)
    lower = 0.0
    if rep_a.normalized and rep_b.normalized:
        lower = lower_distance(a, b)
    if lower > upper:  # both bounds are certified, so this cannot happen
        raise AssertionError(f"bracket inverted: lower {lower} > upper {upper}")
    return MetricBracket(lower, upper, Relabeling(f), Relabeling(g))


def _one_sided(a: LagrangianState, b: LagrangianState, budget: int):
    """Minimise ``|a . f - b|`` over warps f; returns (value, warp)."""
    candidates = [PiecewiseLinear.identity(tuple(b.pos.span))]
    la, lb = a.label_map(), b.label_map()
    if np.all(np.diff(la.v) > 0):
        candidates.append(compose(pseudo_inverse(la), lb))
    if np.all(np.diff(lb.v) > 0):
        # inverse-direction alignment, useful when b is a relabeled copy of a
        candidates.append(pseudo_inverse(compose(pseudo_inverse(lb), la)))
    matched = _matched_nodes_warp(a, b)
    if matched is not None:
        candidates.append(matched)

    best_val = np.inf
    best_warp = candidates[0]
    evals = 0
    for w in candidates:
        if np.any(w.slopes() < Relabeling.MIN_SLOPE):
            continue
        try:
            val = norm_distance(_relabel_raw(a, w), b)
        except ValueError:
            continue
        evals += 1
        if val < best_val:
            best_val = val
            best_warp = w
    refined_val, refined_warp = _coordinate_descent(
        a, b, best_warp, best_val, budget - evals)
    return refined_val, refined_warp


def _matched_nodes_warp(a: LagrangianState, b: LagrangianState) -> PiecewiseLinear | None:
    """Warp sending quantile-matched label nodes of b to those of a."""
    na = a.xi_nodes()
    nb = b.xi_nodes()
    k = int(min(na.size, nb.size, 12))
    if k < 2:
        return None
    qa = np.quantile(na, np.linspace(0.0, 1.0, k))
    qb = np.quantile(nb, np.linspace(0.0, 1.0, k))
    qb, qa = merge_close_nodes(qb, qa)
    if qb.size < 2 or np.any(np.diff(qa) <= 0):
        return None
    return PiecewiseLinear(qb, qa, EXT_SLOPE1, EXT_SLOPE1)


def _coordinate_descent(a: LagrangianState, b: LagrangianState,
                        warp: PiecewiseLinear, value: float, budget: int):
    """Golden-section line search on each warp ordinate in turn."""
    x = warp.x.copy()
    v = warp.v.copy()
    span = max(x[-1] - x[0], 1.0)

    def objective(vals):
        return norm_distance(_relabel_raw(
            a, PiecewiseLinear(x, vals, EXT_SLOPE1, EXT_SLOPE1)), b)

    evals = 0
    improved = True
    while improved and evals < budget:
        improved = False
        for j in range(v.size):
            lo = v[j - 1] + DESCENT_GAP if j > 0 else v[0] - span
            hi = v[j + 1] - DESCENT_GAP if j + 1 < v.size else v[-1] + span
            if hi <= lo:
                continue
            vj, fj, used = _golden(lambda t: objective(_with(v, j, t)),
                                   lo, hi, min(GOLDEN_ITERS, budget - evals))
            evals += used
            if fj < value - 1e-15:
                if fj < value - 1e-9 * max(1.0, value):
                    improved = True
                value = fj
                v[j] = vj
            if evals >= budget:
                break
    return value, PiecewiseLinear(x, v, EXT_SLOPE1, EXT_SLOPE1)


def _with(v: np.ndarray, j: int, t: float) -> np.ndarray:
    out = v.copy()
    out[j] = t
    return out


def _golden(fn, lo: float, hi: float, iters: int):
    """Golden-section minimisation on [lo, hi]; returns (argmin, min, evals)."""
    if iters <= 0:
        return lo, np.inf, 0
    c = hi - _INV_GOLD * (hi - lo)
    d = lo + _INV_GOLD * (hi - lo)
    fc, fd = fn(c), fn(d)
    used = 2
    for _ in range(max(iters - 2, 0)):
        if fc <= fd:
            hi, d, fd = d, c, fc
            c = hi - _INV_GOLD * (hi - lo)
            fc = fn(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + _INV_GOLD * (hi - lo)
            fd = fn(d)
        used += 1
    return (c, fc, used) if fc <= fd else (d, fd, used)


@dataclass
class StabilityReport:
    """Outcome of one stability comparison at a single time."""

    t: float
    lower_after: float
    upper_before: float
    growth: float
    bound: float
    satisfied: bool


def growth_factor(t: float) -> float:
    """Theoretical growth of the distance under the flow up to time t."""
    return float(np.exp(0.5 * t) * (0.5 * t * t + t + 1.0))


def stability_check(a: LagrangianState, b: LagrangianState, t: float,
                    bracket: MetricBracket | None = None) -> StabilityReport:
    """Certified one-time stability test.

    Evolves both states, renormalizes labels, and compares the certified
    lower bound after evolution with the growth factor applied to the
    certified upper bound before evolution.  ``satisfied`` is a rigorous
    pass: lower-after can never legitimately exceed growth * upper-before.
    """
    from .evolution import evolve  # deferred: evolution is a heavier import

    require_valid_lagrangian(a)
    require_valid_lagrangian(b)
    if bracket is None:
        bracket = upper_distance(a, b)
    at = normalize(evolve(a, t))
    bt = normalize(evolve(b, t))
    lower_after = lower_distance(at, bt)
    g = growth_factor(t)
    bound = g * bracket.upper
    slack = 1e-12 * max(1.0, bound)
    return StabilityReport(float(t), lower_after, bracket.upper, g, bound,
                           bool(lower_after <= bound + slack))
