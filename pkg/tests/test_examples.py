"""Closed-form reference states."""

import numpy as np
import pytest

from hs2.eulerian import validate_eulerian
from hs2.examples import EXAMPLE_NAMES, example, opposite_density_pair
from hs2.lagrangian import Relabeling, validate_lagrangian
from hs2.metric import norm_distance


def test_names():
    assert EXAMPLE_NAMES == ("ex11", "ex26", "ex34", "ex36", "ex47")


def test_unknown_name_raises():
    with pytest.raises(ValueError):
        example("ex99")


class TestBreakingWave:
    def test_literal_values_at_unit_time(self):
        # u has nodes at -t^2/4 + t - 1, 0 and t^2/4 + 1 with values
        # 1 - t/2, 0, t/2; rho = 1/(t^2/4 + 1) on [0, t^2/4 + 1]
        state = example("ex11", 1.0)
        assert np.allclose(state.vel.x, [-0.25, 0.0, 1.25], rtol=0, atol=0)
        assert np.allclose(state.vel.v, [0.5, 0.0, 0.5], rtol=0, atol=0)
        assert state.rho(0.5) == 0.8
        assert state.rho(-0.1) == 0.0

    def test_valid_with_constant_mass(self):
        for t in (0.0, 0.5, 1.0, 1.5, 1.9):
            state = example("ex11", t)
            assert validate_eulerian(state).ok
            assert state.energy.total_mass() == pytest.approx(2.0, rel=1e-14)

    def test_steepening_slope(self):
        # u_x on the left cell is -1/(1 - t/2 + ...): steepens toward -inf
        early = example("ex11", 0.0).vel.slopes()[0]
        late = example("ex11", 1.9).vel.slopes()[0]
        assert late < early < 0.0

    def test_defined_before_breaking_only(self):
        with pytest.raises(ValueError):
            example("ex11", 2.0)


class TestAtomSnapshot:
    def test_fields(self):
        state = example("ex26")
        assert validate_eulerian(state).ok
        assert state.energy.atom_mass_at(0.0) == 0.5
        assert state.energy.total_mass() == 2.5
        assert state.vel(-1.0) == 1.0 and state.vel(0.5) == 0.0
        assert state.rho(0.5) == 1.0

    def test_snapshot_only(self):
        with pytest.raises(ValueError):
            example("ex26", 1.0)


class TestLabelTrajectory:
    def test_validates_along_the_flow(self):
        for t in (0.0, 1.0, 2.0, 3.5):
            report = validate_lagrangian(example("ex34", t))
            assert report.ok

    def test_normalized_at_start(self):
        assert validate_lagrangian(example("ex34", 0.0)).normalized

    def test_energy_constant(self):
        for t in (0.0, 1.0, 2.0):
            state = example("ex34", t)
            assert state.energy_total == 2.5
            assert np.array_equal(state.energy.v, [0.0, 1.0, 1.5, 2.5])


class TestAtomTrajectory:
    def test_atom_lifecycle(self):
        assert example("ex36", 0.0).energy.atom_mass_at(0.0) == 0.5
        assert example("ex36", 1.0).energy.atom_pos.size == 0
        assert example("ex36", 2.0).energy.atom_mass_at(-0.25) == 1.0
        assert example("ex36", 2.5).energy.atom_pos.size == 0

    def test_valid_with_constant_mass(self):
        for t in (0.0, 0.5, 2.0, 3.0):
            state = example("ex36", t)
            assert validate_eulerian(state).ok
            assert state.energy.total_mass() == pytest.approx(2.5, rel=1e-14)

    def test_agrees_with_snapshot_at_start(self):
        a = example("ex26")
        b = example("ex36", 0.0)
        assert (a.vel - b.vel).sup_norm() == 0.0
        assert (a.rho - b.rho).sup_norm() == 0.0


class TestSqueezeRelabeling:
    def test_is_relabeling_with_slope_eps(self):
        warp = example("ex47", 0.25)
        assert isinstance(warp, Relabeling)
        assert warp.warp.slopes().min() == 0.25

    def test_requires_unit_interval(self):
        for bad in (0.0, 1.0, -0.5, 2.0):
            with pytest.raises(ValueError):
                example("ex47", bad)


def test_opposite_density_pair():
    a, b = opposite_density_pair()
    assert validate_lagrangian(a).ok and validate_lagrangian(b).ok
    assert (a.rho_w + b.rho_w).sup_norm() == 0.0
    assert norm_distance(a, b) == 2.0
