"""Closed-form time stepping, breaking prediction, weak-form defects."""

import numpy as np
import pytest

from hs2.evolution import (breaking_times, builtin_test_functions, evolve,
                           evolve_eulerian, weak_residual)
from hs2.examples import example
from hs2.lagrangian import LagrangianState
from hs2.measure import cdf_gap
from hs2.piecewise import (EXT_SLOPE1, PiecewiseConstant, PiecewiseLinear)
from hs2.transform import to_lagrangian
from support import rand_eulerian, rand_normalized


def assert_states_close(a, b, tol=1e-12):
    assert (a.pos - b.pos).sup_norm() <= tol
    assert (a.vel - b.vel).sup_norm() <= tol
    assert (a.energy - b.energy).sup_norm() <= tol
    assert (a.rho_w - b.rho_w).sup_norm() <= tol


class TestEvolve:
    def test_matches_trajectory_oracle(self):
        start = example("ex34", 0.0)
        for t in (0.5, 1.0, 2.0, 3.5):
            assert_states_close(evolve(start, t), example("ex34", t),
                                tol=1e-13)

    def test_literal_values_at_unit_time(self):
        # per-node closed form: pos + t*vel + (t^2/4)(energy - total/2)
        # with total 5/2, evaluated by hand at t = 1
        moved = evolve(example("ex34", 0.0), 1.0)
        assert np.allclose(moved.pos.v, [-0.3125, -0.0625, 0.0625, 1.3125],
                           rtol=0, atol=1e-15)
        assert np.allclose(moved.vel.v, [0.375, -0.125, 0.125, 0.625],
                           rtol=0, atol=1e-15)

    def test_energy_and_weight_are_carried_unchanged(self):
        start = example("ex34", 0.0)
        moved = evolve(start, 1.7)
        assert moved.energy is start.energy
        assert moved.rho_w is start.rho_w

    def test_zero_time_returns_same_object(self):
        start = example("ex34", 0.0)
        assert evolve(start, 0.0) is start

    def test_negative_time_raises(self):
        with pytest.raises(ValueError):
            evolve(example("ex34", 0.0), -0.5)

    def test_semigroup(self):
        rng = np.random.default_rng(97)
        for _ in range(20):
            state = rand_normalized(rng)
            s, t = rng.uniform(0.1, 2.0, size=2)
            assert_states_close(evolve(evolve(state, s), t),
                                evolve(state, s + t), tol=1e-10)


class TestBreaking:
    def test_snapshot_with_atom_breaks_at_two(self):
        report = breaking_times(example("ex34", 0.0))
        assert report.first_time == 2.0
        assert report.first_location == -0.25

    def test_breaking_shifts_with_evolution(self):
        start = example("ex34", 0.0)
        for s in (0.5, 1.0, 1.5):
            report = breaking_times(evolve(start, s))
            assert report.first_time == pytest.approx(2.0 - s, abs=1e-12)

    def test_grazing_cell_reports_double_root_once(self):
        # slope (t-1)^2: admissible tangency with rho_w = 0
        state = LagrangianState(
            PiecewiseLinear([0, 1], [0, 1], EXT_SLOPE1, EXT_SLOPE1),
            PiecewiseLinear([0, 1], [0, -2]),
            PiecewiseLinear([0, 1], [0, 4]),
            PiecewiseConstant.zero())
        report = breaking_times(state)
        assert report.first_time == 1.0
        (cell,) = [c for c in report.cells if c.times]
        assert cell.times == (1.0,)

    def test_linear_fallback_for_vanishing_energy_slope(self):
        # energy slope exactly zero: the quadratic degenerates
        state = LagrangianState(
            PiecewiseLinear([0, 1], [0, 2], EXT_SLOPE1, EXT_SLOPE1),
            PiecewiseLinear([0, 1], [0, -1]),
            PiecewiseLinear([0, 1], [0, 0]),
            PiecewiseConstant.zero())
        report = breaking_times(state)
        assert report.first_time == 2.0

    def test_no_breaking_for_expanding_state(self):
        state = LagrangianState(
            PiecewiseLinear([0, 1], [0, 1], EXT_SLOPE1, EXT_SLOPE1),
            PiecewiseLinear([0, 1], [0, 1]),
            PiecewiseLinear([0, 1], [0, 1]),
            PiecewiseConstant.zero())
        assert breaking_times(state).first_time is None


class TestEvolveEulerian:
    def test_matches_trajectory_through_breaking(self):
        start = example("ex36", 0.0)
        for t in (0.5, 1.0, 2.0, 2.5):
            got = evolve_eulerian(start, t)
            want = example("ex36", t)
            assert (got.vel - want.vel).sup_norm() <= 1e-12
            assert (got.rho - want.rho).sup_norm() <= 1e-12
            assert cdf_gap(got.energy, want.energy) <= 1e-12

    def test_atom_appears_and_dissolves(self):
        start = example("ex36", 0.0)
        at_two = evolve_eulerian(start, 2.0)
        assert at_two.energy.atom_mass_at(-0.25) == pytest.approx(
            1.0, abs=1e-12)
        after = evolve_eulerian(start, 2.5)
        assert after.energy.atom_pos.size == 0

    def test_breaking_wave_density_blowup(self):
        # u_x -> -inf along x = 0 while rho stays bounded
        start = example("ex11", 0.0)
        for t in (0.5, 1.0, 1.5, 1.9):
            got = evolve_eulerian(start, t)
            want = example("ex11", t)
            assert (got.vel - want.vel).sup_norm() <= 1e-12
            assert (got.rho - want.rho).sup_norm() <= 1e-12
            assert cdf_gap(got.energy, want.energy) <= 1e-12

    def test_mass_conserved(self):
        rng = np.random.default_rng(101)
        for _ in range(10):
            state = rand_eulerian(rng)
            total = state.energy.total_mass()
            for t in (0.5, 1.5, 3.0):
                moved = evolve_eulerian(state, t)
                assert moved.energy.total_mass() == pytest.approx(
                    total, rel=1e-12, abs=1e-12)

    def test_zero_time_returns_same_object(self):
        state = example("ex26")
        assert evolve_eulerian(state, 0.0) is state


class TestWeakResidual:
    def test_builtin_test_functions_shape(self):
        fns = builtin_test_functions(2.0)
        assert [f.name for f in fns] == ["bump", "tent", "gaussian"]
        for fn in fns:
            # compact support in space and a time window closing at t_max
            assert fn.psi.v[0] == 0.0 and fn.psi.v[-1] == 0.0
            assert fn.chi(0.0) == pytest.approx(1.0)
            assert fn.chi(2.0) == 0.0

    def test_residual_small_on_exact_trajectory(self):
        state = example("ex36", 0.0)
        fn = builtin_test_functions(1.5)[0]
        res = weak_residual(state, 1.5, fn, 64)
        assert res.max_abs() <= 2e-3

    def test_residual_shrinks_quadratically(self):
        state = example("ex36", 0.0)
        fn = builtin_test_functions(1.5)[1]
        coarse = weak_residual(state, 1.5, fn, 32).max_abs()
        fine = weak_residual(state, 1.5, fn, 128).max_abs()
        assert fine <= coarse / 8.0

    def test_accepts_explicit_time_grid(self):
        state = example("ex36", 0.0)
        fn = builtin_test_functions(1.0)[0]
        uniform = weak_residual(state, 1.0, fn, 33)
        explicit = weak_residual(state, 1.0, fn, np.linspace(0, 1, 33))
        assert uniform.velocity == explicit.velocity
        assert uniform.energy == explicit.energy
