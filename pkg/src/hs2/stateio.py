"""Line-oriented text format for states and relabelings.

An Eulerian state file has the sections ``[u]``, ``[rho]``, ``[mu.density]``
and ``[mu.atoms]``; a Lagrangian state file has ``[y]``, ``[U]``, ``[H]``
and ``[r]``; a relabeling file has the single section ``[f]``.  Piecewise
linear sections hold one ``x value`` pair per line, piecewise constant
sections one ``x_left x_right value`` cell per line, and the atom section
one ``x mass`` pair per line.  Sections may be empty where the object is
zero.  Extension behaviour is implied by the role (``u``, ``U`` and ``H``
continue with their boundary values, ``y`` and ``f`` with slope one,
everything piecewise constant with zero).

Numbers are printed with 17 significant digits, so parse(print(state))
reproduces the state exactly and printing is idempotent byte for byte.
"""

from __future__ import annotations

import numpy as np

from .eulerian import EulerianState
from .lagrangian import LagrangianState, Relabeling
from .measure import RadonMeasure
from .piecewise import EXT_CONST, EXT_SLOPE1, PiecewiseConstant, PiecewiseLinear
from .validation import StateFormatError

_EULERIAN_SECTIONS = ("u", "rho", "mu.density", "mu.atoms")
_LAGRANGIAN_SECTIONS = ("y", "U", "H", "r")
_RELABELING_SECTIONS = ("f",)


def _fmt(v: float) -> str:
    return f"{v:.17g}"


def _pl_lines(f: PiecewiseLinear) -> list:
    return [f"{_fmt(x)} {_fmt(v)}" for x, v in zip(f.x, f.v)]


def _pc_lines(f: PiecewiseConstant) -> list:
    if f.is_zero:
        return []
    return [f"{_fmt(f.x[i])} {_fmt(f.x[i + 1])} {_fmt(f.c[i])}"
            for i in range(f.c.size)]


def print_state(obj) -> str:
    """Canonical text form of a state or relabeling."""
    if isinstance(obj, EulerianState):
        parts = [("u", _pl_lines(obj.vel)),
                 ("rho", _pc_lines(obj.rho)),
                 ("mu.density", _pc_lines(obj.energy.density)),
                 ("mu.atoms", [f"{_fmt(p)} {_fmt(m)}"
                               for p, m in zip(obj.energy.atom_pos,
                                               obj.energy.atom_mass)])]
    elif isinstance(obj, LagrangianState):
        parts = [("y", _pl_lines(obj.pos)),
                 ("U", _pl_lines(obj.vel)),
                 ("H", _pl_lines(obj.energy)),
                 ("r", _pc_lines(obj.rho_w))]
    elif isinstance(obj, Relabeling):
        parts = [("f", _pl_lines(obj.warp))]
    else:
        raise TypeError(f"cannot print a {type(obj).__name__}")
    lines = []
    for name, rows in parts:
        lines.append(f"[{name}]")
        lines.extend(rows)
    return "\n".join(lines) + "\n"


def parse_state(text: str):
    """Parse a state or relabeling from its text form.

    Raises :class:`~hs2.validation.StateFormatError` for malformed input:
    unknown or repeated sections, rows with the wrong arity, non-numeric
    fields, or breakpoints out of order.
    """
    sections: dict = {}
    current = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("[") and line.endswith("]"):
            current = line[1:-1].strip()
            if current in sections:
                raise StateFormatError(f"line {lineno}: repeated section [{current}]")
            sections[current] = []
            continue
        if current is None:
            raise StateFormatError(f"line {lineno}: data before any section header")
        fields = line.split()
        try:
            sections[current].append([float(tok) for tok in fields])
        except ValueError:
            raise StateFormatError(
                f"line {lineno}: non-numeric field in section [{current}]") from None

    names = set(sections)
    if names == set(_EULERIAN_SECTIONS):
        return _build_eulerian(sections)
    if names == set(_LAGRANGIAN_SECTIONS):
        return _build_lagrangian(sections)
    if names == set(_RELABELING_SECTIONS):
        try:
            return Relabeling(_build_pl(sections["f"], "f", EXT_SLOPE1, EXT_SLOPE1))
        except ValueError as exc:
            raise StateFormatError(str(exc)) from None
    raise StateFormatError(
        "sections do not form a state: expected "
        f"{list(_EULERIAN_SECTIONS)}, {list(_LAGRANGIAN_SECTIONS)} or"
        f" {list(_RELABELING_SECTIONS)}, got {sorted(names)}")


def _build_pl(rows, name, left, right) -> PiecewiseLinear:
    if len(rows) < 2:
        raise StateFormatError(f"section [{name}] needs at least two breakpoints")
    if any(len(r) != 2 for r in rows):
        raise StateFormatError(f"section [{name}] rows must be 'x value' pairs")
    x = np.asarray([r[0] for r in rows])
    v = np.asarray([r[1] for r in rows])
    if np.any(np.diff(x) <= 0):
        raise StateFormatError(f"section [{name}] breakpoints must strictly increase")
    return PiecewiseLinear(x, v, left, right)


def _build_pc(rows, name) -> PiecewiseConstant:
    if not rows:
        return PiecewiseConstant.zero()
    if any(len(r) != 3 for r in rows):
        raise StateFormatError(f"section [{name}] rows must be 'x_left x_right value'")
    rows = sorted(rows)
    xs = [rows[0][0]]
    cs = []
    for lo, hi, val in rows:
        if hi <= lo:
            raise StateFormatError(f"section [{name}] has an empty or inverted cell")
        if lo < xs[-1]:
            raise StateFormatError(f"section [{name}] has overlapping cells")
        if lo > xs[-1]:
            xs.append(lo)
            cs.append(0.0)
        xs.append(hi)
        cs.append(val)
    return PiecewiseConstant.from_cells(np.asarray(xs), np.asarray(cs))


def _build_atoms(rows):
    if any(len(r) != 2 for r in rows):
        raise StateFormatError("section [mu.atoms] rows must be 'x mass' pairs")
    for _, m in rows:
        if m <= 0:
            raise StateFormatError("section [mu.atoms] masses must be positive")
    return [(r[0], r[1]) for r in rows]


def _build_eulerian(sections) -> EulerianState:
    vel = _build_pl(sections["u"], "u", EXT_CONST, EXT_CONST)
    rho = _build_pc(sections["rho"], "rho")
    dens = _build_pc(sections["mu.density"], "mu.density")
    atoms = _build_atoms(sections["mu.atoms"])
    try:
        mu = RadonMeasure(dens, atoms)
    except ValueError as exc:
        raise StateFormatError(str(exc)) from None
    return EulerianState(vel, rho, mu)


def _build_lagrangian(sections) -> LagrangianState:
    pos = _build_pl(sections["y"], "y", EXT_SLOPE1, EXT_SLOPE1)
    vel = _build_pl(sections["U"], "U", EXT_CONST, EXT_CONST)
    energy = _build_pl(sections["H"], "H", EXT_CONST, EXT_CONST)
    rho_w = _build_pc(sections["r"], "r")
    return LagrangianState(pos, vel, energy, rho_w)
