import math

import numpy as np
import pytest
import shapely
from hypothesis import given, strategies as st
from scipy.integrate import quad

import isostab.graph_geometry as gg
from isostab.sphere_core import ScalarField, ball_volume, make_grid, sphere_area

GRIDS = {1: make_grid(1, 128), 2: make_grid(2, 48), 3: make_grid(3, 96, "axisym")}


def shifted_ball(grid, center, radius=1.0):
    return gg.build_set(ScalarField.from_values(grid, gg.ball_radial(grid, np.asarray(center), radius) - 1.0))


@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("t", [0.0, 0.05, -0.1])
def test_constant_graph_closed_forms(n, t):
    s = gg.build_set(ScalarField.constant(GRIDS[n], t))
    assert gg.perimeter(s) == pytest.approx(sphere_area(n) * (1 + t) ** n, rel=1e-12)
    assert gg.volume(s) == pytest.approx(ball_volume(n) * (1 + t) ** (n + 1), rel=1e-12)
    assert np.max(np.abs(gg.mean_curvature(s).values - n / (1 + t))) < 1e-10
    assert abs(gg.isoperimetric_deficit(s)) < 1e-12
    assert np.linalg.norm(gg.barycenter(s)) < 1e-12
    assert gg.cmc_deficit(s) < 1e-10


def test_deficit_report_of_ball():
    d = gg.deficits(gg.build_set(ScalarField.constant(GRIDS[2], 0.0)))
    assert d.delta == pytest.approx(0.0, abs=1e-12)
    assert d.alpha < 1e-8
    assert d.outer_gap < 1e-6


@pytest.mark.parametrize("n", [1, 2, 3])
def test_shifted_ball_is_a_ball(n):
    grid = GRIDS[n]
    c = np.zeros(n + 1)
    c[grid.axis] = 0.1
    s = shifted_ball(grid, c)
    assert gg.perimeter(s) == pytest.approx(sphere_area(n), rel=1e-9)
    assert gg.volume(s) == pytest.approx(ball_volume(n), rel=1e-9)
    assert np.max(np.abs(gg.mean_curvature(s).values - n)) < 1e-6
    assert np.allclose(gg.barycenter(s), sphere_area(n) * c, atol=1e-9)
    back, shift = gg.recenter(s)
    assert np.allclose(shift, -c, atol=1e-9)
    assert np.max(np.abs(back.u.values)) < 1e-8
    alpha, center = gg.fraenkel(s)
    assert alpha < 1e-6
    assert np.allclose(center, c, atol=1e-4)


def test_fraenkel_positive_for_elongation():
    grid = GRIDS[2]
    z = grid.nodes[:, 2]
    s = gg.build_set(ScalarField.from_values(grid, 0.05 * (3 * z**2 - 1) / 2))
    alpha, _ = gg.fraenkel(s)
    assert alpha > 1e-3
    assert gg.perimeter_deficit(s) > 0
    assert gg.isoperimetric_deficit(s) > 0


@given(st.integers(0, 10_000))
def test_circle_graph_against_polygon(seed):
    # independent route: shapely length and area of the densely sampled boundary curve
    grid = make_grid(1, 256, band_limit=8)
    rng = np.random.default_rng(seed)
    c = 0.03 * rng.standard_normal(grid.n_coeffs) * (grid.degrees <= 8)
    s = gg.build_set(ScalarField.from_coeffs(grid, c))

    def polygon(count):
        theta = np.linspace(0, 2 * np.pi, count + 1)[:-1]
        dirs = np.column_stack([np.cos(theta), np.sin(theta)])
        return shapely.Polygon((1 + grid.evaluate(c, dirs))[:, None] * dirs)

    # polygon errors scale like count^-2; extrapolate from two resolutions
    coarse, fine = polygon(4000), polygon(8000)
    assert gg.perimeter(s) == pytest.approx((4 * fine.length - coarse.length) / 3, rel=1e-10)
    assert gg.volume(s) == pytest.approx((4 * fine.area - coarse.area) / 3, rel=1e-10)


@given(st.floats(-0.08, 0.08), st.floats(-0.08, 0.08))
def test_zonal_graph_against_quadrature(a, b):
    # independent route: revolution integrals evaluated by adaptive quadrature
    grid = make_grid(2, 64, "axisym")
    z = grid.nodes[:, 2]
    s = gg.build_set(ScalarField.from_values(grid, a * z + b * (3 * z**2 - 1) / 2))

    def rad(th):
        c = math.cos(th)
        return 1 + a * c + b * (3 * c * c - 1) / 2, -a * math.sin(th) - 3 * b * c * math.sin(th)

    area = quad(lambda th: 2 * math.pi * rad(th)[0] * math.sin(th) * math.hypot(*rad(th)), 0, math.pi,
                epsabs=1e-14, epsrel=1e-13)[0]
    vol = quad(lambda th: 2 * math.pi * rad(th)[0] ** 3 * math.sin(th) / 3, 0, math.pi, epsabs=1e-14)[0]
    assert gg.perimeter(s) == pytest.approx(area, rel=1e-10)
    assert gg.volume(s) == pytest.approx(vol, rel=1e-10)


def test_barycenter_first_order():
    grid = GRIDS[2]
    eps = 1e-4
    s = gg.build_set(ScalarField.from_values(grid, eps * grid.nodes[:, 0]))
    # a translation by eps e1 to first order
    assert gg.barycenter(s)[0] == pytest.approx(4 * math.pi * eps, rel=1e-3)


def test_outer_gap():
    grid = GRIDS[2]
    s = gg.build_set(ScalarField.constant(grid, 0.02))
    assert gg.outer_inclusion_gap(s, np.zeros(3)) == pytest.approx(0.02, abs=1e-12)
    assert gg.outer_inclusion_gap(gg.build_set(ScalarField.constant(grid, -0.02)), np.zeros(3)) == 0.0


def test_enforce_curvature_bound_scales_small_sets():
    s = gg.build_set(ScalarField.constant(GRIDS[2], -0.1))
    out, scale = gg.enforce_curvature_bound(s)
    assert scale == pytest.approx(1 / 0.9, rel=1e-10)
    assert np.max(gg.mean_curvature(out).values) <= 2 + 1e-9
    assert gg.enforce_curvature_bound(gg.build_set(ScalarField.constant(GRIDS[2], 0.1)))[1] == 1.0


def test_not_star_shaped():
    with pytest.raises(gg.NotStarShapedError):
        gg.build_set(ScalarField.constant(GRIDS[1], -0.97))
    with pytest.raises(gg.NotStarShapedError):
        gg.build_set(ScalarField.from_values(GRIDS[1], np.full(GRIDS[1].size, np.nan)))


def test_symmetric_difference_requires_origin_inside():
    with pytest.raises(ValueError):
        gg.symmetric_difference(gg.build_set(ScalarField.constant(GRIDS[2], 0.0)), [0, 0, 1.5], 1.0)


@given(st.floats(0.01, 0.2))
def test_symmetric_difference_of_concentric_balls(t):
    grid = GRIDS[3]
    s = gg.build_set(ScalarField.constant(grid, t))
    assert gg.symmetric_difference(s, np.zeros(4), 1.0) == pytest.approx(ball_volume(3) * ((1 + t) ** 4 - 1), rel=1e-12)
