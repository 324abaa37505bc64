import math

import numpy as np
import pytest
import shapely
from hypothesis import given, strategies as st

from isostab import axisym
from isostab.sphere_core import ball_volume, sphere_area


@pytest.mark.parametrize("n", [1, 2, 3, 4])
@pytest.mark.parametrize("radius", [1.0, 0.7])
def test_sphere_functionals(n, radius):
    prof = axisym.sphere_profile(n, radius)
    f = axisym.revolution_functionals(prof)
    assert f.perimeter == pytest.approx(sphere_area(n) * radius**n, rel=1e-12)
    assert f.volume == pytest.approx(ball_volume(n) * radius ** (n + 1), rel=1e-12)
    assert f.diameter == pytest.approx(2 * radius, rel=1e-6)
    tau = np.linspace(0.01, math.pi - 0.01, 50)
    assert np.allclose(axisym.revolution_mean_curvature(prof, tau), n / radius, rtol=1e-12)
    assert np.allclose(axisym.revolution_gauss_curvature(prof, tau), radius**-n, rtol=1e-12)


def test_flat_graph_has_zero_curvature():
    zero = lambda r: 0 * r  # noqa: E731
    prof = axisym.graph_profile(3, zero, zero, zero, 0.5)
    assert np.all(axisym.revolution_mean_curvature(prof, np.linspace(0, 0.5, 11)) == 0)
    assert axisym.revolution_functionals(prof).perimeter == pytest.approx(sphere_area(2) * 0.5**3 / 3, rel=1e-12)


def test_circle_curve():
    c = axisym.circle(2.0, (1.0, -1.0))
    assert c.length() == pytest.approx(4 * math.pi, rel=1e-13)
    assert c.signed_area() == pytest.approx(4 * math.pi, rel=1e-13)
    assert c.reversed().signed_area() == pytest.approx(-4 * math.pi, rel=1e-13)


def test_sampled_profile_recovers_sphere():
    t = np.linspace(0, math.pi, 33)
    prof = axisym.sampled_profile(2, np.sin(t), np.cos(t))
    assert axisym.revolution_functionals(prof).perimeter == pytest.approx(4 * math.pi, rel=1e-10)


def test_profile_errors():
    with pytest.raises(axisym.ProfileError):
        axisym.registry_profile(2, "torus")
    with pytest.raises(axisym.ProfileError):
        axisym.registry_profile(2, "dented_sphere(0.95,0.3)")
    with pytest.raises(axisym.ProfileError):
        axisym.sampled_profile(2, np.ones(12), np.ones(12))
    with pytest.raises(axisym.ProfileError):
        axisym.fourier_curve([0, 1], [1, 0])


def test_registry_parsing():
    assert axisym.revolution_functionals(axisym.registry_profile(2, "sphere_radius(2)")).perimeter == \
        pytest.approx(16 * math.pi, rel=1e-12)


@pytest.mark.parametrize("n", [2, 3])
def test_almgren_on_sphere(n):
    terms = axisym.almgren_profile(axisym.sphere_profile(n), 1024)
    for value in (terms.t1, terms.t2, terms.t3, terms.delta, terms.residual):
        assert abs(value) < 1e-10
    assert terms.gauss_total == pytest.approx(sphere_area(n), rel=1e-10)


@pytest.mark.parametrize("radius", [1.0, 2.0, 3.5])
def test_almgren_on_disks(radius):
    terms = axisym.almgren_planar(axisym.PlanarRegion(axisym.circle(radius)))
    assert terms.t1 == pytest.approx(0.0, abs=1e-12)
    assert terms.t2 == pytest.approx(2 * math.pi * (radius - 1), abs=1e-11)
    assert terms.t3 == pytest.approx(0.0, abs=1e-12)
    assert abs(terms.residual) < 1e-10


def dented_circle(depth, width, samples=256):
    tau = 2 * np.pi * np.arange(samples) / samples
    rho = 1 - depth * np.exp(-(1 - np.cos(tau)) / width**2)
    return axisym.fourier_curve(rho * np.cos(tau), rho * np.sin(tau))


@pytest.mark.parametrize("depth", [0.15, 0.3])
def test_planar_envelope_against_shapely_hull(depth):
    # independent route: shapely convex hull of a ten times denser polygon
    curve = dented_circle(depth, 0.3)
    count = 2048
    env = axisym.planar_envelope(curve, count)
    assert len(env.bridges) == 1
    terms = axisym.almgren_planar(axisym.PlanarRegion(curve), count)
    bridge = 0.0
    for ta, tb in env.bridges:
        xa, ya, *_ = curve.evaluate(np.array([ta]))
        xb, yb, *_ = curve.evaluate(np.array([tb]))
        bridge += math.hypot(xb[0] - xa[0], yb[0] - ya[0])
    x, y = curve.points(10 * count)
    hull = shapely.MultiPoint(np.column_stack([x, y])).convex_hull
    assert terms.contact_measure + bridge == pytest.approx(hull.length, rel=1e-6)
    assert abs(terms.residual) <= 1e-6 * max(terms.delta, 1.0)
    assert terms.gauss_total == pytest.approx(2 * math.pi, rel=1e-8)


def test_profile_envelope_bounds():
    prof = axisym.dented_sphere(2, 0.15, 0.3)
    res = axisym.envelope_of_profile(prof, 2048)
    f = axisym.revolution_functionals(prof)
    assert res.hull_perimeter < f.perimeter
    assert res.hull_volume > f.volume
    sphere = axisym.envelope_of_profile(axisym.sphere_profile(2), 1024)
    assert sphere.hull_perimeter == pytest.approx(4 * math.pi, rel=1e-10)
    assert sphere.hull_volume == pytest.approx(4 * math.pi / 3, rel=1e-10)


@given(st.floats(0.05, 0.3), st.floats(0.2, 0.5))
def test_almgren_terms_are_nonnegative(depth, width):
    terms = axisym.almgren_profile(axisym.dented_sphere(2, depth, width), 1024)
    assert terms.t1 >= -1e-10
    assert terms.t2 >= -1e-10
    assert terms.t3 >= -1e-10
    assert abs(terms.residual) <= 1e-6 * terms.delta


@pytest.mark.parametrize("holes", [1, 2, 3])
def test_planar_structure_with_holes(holes):
    eps = 0.05
    centers = [(0.4 * math.cos(2 * math.pi * k / holes), 0.4 * math.sin(2 * math.pi * k / holes))
               for k in range(holes)]
    region = axisym.PlanarRegion(axisym.circle(1.0), tuple(axisym.circle(eps, c) for c in centers))
    st_ = axisym.planar_structure(region)
    assert st_.perimeter_ratio == pytest.approx(1.0, abs=1e-9)
    assert st_.area_ratio == pytest.approx(1 / (4 * math.pi * holes), rel=1e-6)


def test_overlapping_holes_rejected():
    with pytest.raises(axisym.ProfileError):
        axisym.PlanarRegion(axisym.circle(1.0), (axisym.circle(0.2), axisym.circle(0.2, (0.1, 0.0))))
    with pytest.raises(axisym.ProfileError):
        axisym.planar_structure(axisym.PlanarRegion(axisym.circle(1.0)))
