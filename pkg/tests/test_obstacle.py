import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import isostab.graph_geometry as gg
from isostab import obstacle as ob
from isostab.sphere_core import ScalarField, make_grid

CIRCLE = make_grid(1, 128)
AXI = make_grid(2, 64, "axisym")


@pytest.fixture(scope="module")
def dimple_solution():
    s = ob.dimple_set(CIRCLE, 0.3)
    return s, ob.truncate_mean_curvature(s, 1.0)


@pytest.mark.parametrize("grid", [CIRCLE, AXI], ids=["circle", "axisym"])
def test_gradient_matches_finite_differences(grid):
    rng = np.random.default_rng(3)
    c = 0.02 * rng.standard_normal(grid.n_coeffs) * (grid.degrees <= 6)
    v = grid.synthesize(c)
    lam = 1.3
    grad = ob.energy_gradient(grid, v, lam) * grid.weights
    for i in rng.choice(grid.size, 5, replace=False):
        e = np.zeros(grid.size)
        e[i] = 1e-6
        fd = (ob.energy(grid, v + e, lam) - ob.energy(grid, v - e, lam)) / 2e-6
        assert grad[i] == pytest.approx(fd, rel=1e-5, abs=1e-9)


@pytest.mark.parametrize("grid", [CIRCLE, AXI], ids=["circle", "axisym"])
def test_ball_is_a_fixed_point(grid):
    s = gg.build_set(ScalarField.constant(grid, 0.0))
    res = ob.truncate_mean_curvature(s, float(grid.dim))
    assert res.converged
    assert np.max(np.abs(res.v.values)) < 1e-12
    assert res.contact_mask.all()


def test_unsupported_grid_and_lambda():
    s = gg.build_set(ScalarField.constant(make_grid(2, 16), 0.0))
    with pytest.raises(ob.UnsupportedGridError):
        ob.truncate_mean_curvature(s, 2.0)
    with pytest.raises(ValueError):
        ob.truncate_mean_curvature(gg.build_set(ScalarField.constant(CIRCLE, 0.0)), 0.0)


def test_dimple_solution(dimple_solution):
    s, res = dimple_solution
    assert res.converged
    rep = ob.verify_truncation(res, s)
    assert rep.contained and rep.energy_monotone and rep.energy_not_above_obstacle
    assert rep.distance_ok and rep.curvature_ok
    assert rep.free_cmc_residual <= 1e-3
    assert rep.free_nodes > 0
    assert np.all(res.v.values >= s.u.values - 1e-12)


def test_energy_decreases_below_obstacle(dimple_solution):
    s, res = dimple_solution
    assert res.energy_history[-1] <= ob.energy(CIRCLE, s.u.values, 1.0)
    assert np.all(np.diff(res.energy_history) <= 1e-12 * np.abs(res.energy_history[1:]))


def test_solution_is_independent_of_start(dimple_solution):
    s, res = dimple_solution
    other = ob.truncate_mean_curvature(s, 1.0, start=s.u.values + 0.1)
    assert other.converged
    assert np.max(np.abs(other.v.values - res.v.values)) < 1e-5


@settings(max_examples=4)
@given(st.floats(0.5, 1.0), st.floats(1.2, 2.0))
def test_larger_lambda_gives_smaller_set(lam_small, factor):
    s = ob.dimple_set(CIRCLE, 0.2)
    a = ob.truncate_mean_curvature(s, lam_small)
    b = ob.truncate_mean_curvature(s, lam_small * factor)
    assert a.converged and b.converged
    assert np.all(b.v.values <= a.v.values + 1e-6)


def test_dimple_set_respects_curvature_bound():
    s = ob.dimple_set(AXI, 0.3)
    assert np.max(gg.mean_curvature(s).values) <= 2 + 1e-8
    assert ob.contact_threshold(s.u) == pytest.approx(1e-7 * (1 + np.max(np.abs(s.u.values))))
