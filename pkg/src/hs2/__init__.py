"""Exact solver for a two-component nonlinear transport system.

The package computes global conservative weak solutions for piecewise-
linear initial data by changing to characteristic coordinates, applying a
closed-form semigroup there, and transforming back; wave breaking appears
as flat cells of the characteristic map whose energy concentrates into
atoms of the energy measure.  On top of the solver it provides a certified
two-sided bracket on a relabeling-invariant distance together with a
stability checker for the flow.
"""

from .piecewise import (EXT_CONST, EXT_SLOPE1, PiecewiseConstant, PiecewiseLinear,
                        combine_linear, component_norm, compose, compose_pc,
                        pseudo_inverse, quad_norm)
from .measure import RadonMeasure, cdf_gap, pushforward
from .validation import (InvalidStateError, StateFormatError, ValidationReport,
                         Violation, default_tol)
from .eulerian import EulerianState, energy_density, validate_eulerian
from .lagrangian import (LagrangianState, Relabeling, apply_relabeling,
                         normalize, validate_lagrangian)
from .transform import to_eulerian, to_lagrangian
from .evolution import (BreakingReport, ResidualTriple, SeparableTestFunction,
                        breaking_times, builtin_test_functions, evolve,
                        evolve_eulerian, weak_residual)
from .metric import (MetricBracket, StabilityReport, growth_factor,
                     lower_distance, norm_distance, stability_check,
                     upper_distance)
from .examples import EXAMPLE_NAMES, example
from .stateio import parse_state, print_state

__version__ = "0.1.0"

__all__ = [
    "EXT_CONST", "EXT_SLOPE1", "PiecewiseConstant", "PiecewiseLinear",
    "combine_linear", "component_norm", "compose", "compose_pc",
    "pseudo_inverse", "quad_norm",
    "RadonMeasure", "cdf_gap", "pushforward",
    "InvalidStateError", "StateFormatError", "ValidationReport", "Violation",
    "default_tol",
    "EulerianState", "energy_density", "validate_eulerian",
    "LagrangianState", "Relabeling", "apply_relabeling", "normalize",
    "validate_lagrangian",
    "to_eulerian", "to_lagrangian",
    "BreakingReport", "ResidualTriple", "SeparableTestFunction",
    "breaking_times", "builtin_test_functions", "evolve", "evolve_eulerian",
    "weak_residual",
    "MetricBracket", "StabilityReport", "growth_factor", "lower_distance",
    "norm_distance", "stability_check", "upper_distance",
    "EXAMPLE_NAMES", "example",
    "parse_state", "print_state",
    "__version__",
]
