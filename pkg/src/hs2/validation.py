"""Shared validation report types and tolerance configuration."""

from __future__ import annotations

import os
from dataclasses import dataclass, field

#: Default relative tolerance for validation checks; can be overridden with
#: the ``HS2_TOL`` environment variable.
DEFAULT_TOL = 1e-9


def default_tol() -> float:
    raw = os.environ.get("HS2_TOL")
    if raw is None:
        return DEFAULT_TOL
    try:
        tol = float(raw)
    except ValueError as exc:
        raise ValueError(f"HS2_TOL must be a real number, got {raw!r}") from exc
    if not tol > 0:
        raise ValueError("HS2_TOL must be positive")
    return tol


@dataclass(frozen=True)
class Violation:
    """One failed validation check."""

    code: str
    where: str
    detail: str

    def __str__(self):
        return f"{self.code} at {self.where}: {self.detail}"


@dataclass
class ValidationReport:
    """Outcome of validating a state."""

    kind: str
    violations: list[Violation] = field(default_factory=list)
    #: essential lower bound of the combined cell slopes (Lagrangian only)
    slope_floor: float | None = None
    #: whether the labels are normalised, i.e. pos + energy = id (Lagrangian only)
    normalized: bool | None = None

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, code: str, where: str, detail: str):
        self.violations.append(Violation(code, where, detail))

    def __str__(self):
        if self.ok:
            return f"{self.kind} state: ok"
        lines = [f"{self.kind} state: {len(self.violations)} violation(s)"]
        lines += [f"  - {v}" for v in self.violations]
        return "\n".join(lines)


class StateFormatError(ValueError):
    """Raised for malformed state text or structurally invalid raw data."""


class InvalidStateError(ValueError):
    """Raised when a state fails validation; carries the report."""

    def __init__(self, report: ValidationReport):
        super().__init__(str(report))
        self.report = report
