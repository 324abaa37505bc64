import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import special

from isostab.sphere_core import (GridError, GridMismatchError, ScalarField, ball_volume, gauss_gegenbauer,
                                 laplace_eigenvalue, make_grid, norm, normalized_legendre,
                                 orthonormal_gegenbauer, sphere_area)

GRIDS = [(1, 256, "full"), (2, 64, "full"), (2, 96, "axisym"), (3, 200, "axisym"), (4, 64, "axisym")]


@pytest.fixture(scope="module", params=GRIDS, ids=lambda g: f"n{g[0]}-{g[2]}")
def grid(request):
    n, res, mode = request.param
    return make_grid(n, res, mode)


def test_closed_forms():
    assert sphere_area(1) == pytest.approx(2 * math.pi, rel=1e-15)
    assert sphere_area(2) == pytest.approx(4 * math.pi, rel=1e-15)
    assert sphere_area(3) == pytest.approx(2 * math.pi**2, rel=1e-15)
    assert ball_volume(3) == pytest.approx(math.pi**2 / 2, rel=1e-15)
    assert laplace_eigenvalue(3, 2) == 12


def test_weights_sum_to_area(grid):
    assert grid.weights.sum() == pytest.approx(sphere_area(grid.dim), rel=1e-10)


def test_node_counts():
    assert make_grid(1, 256).size == 256
    assert make_grid(2, 64).size == 64 * 128


def test_moments_on_s2():
    g = make_grid(2, 64)
    z = g.nodes[:, 2]
    assert g.integrate(z**2) == pytest.approx(4 * math.pi / 3, rel=1e-12)
    assert abs(g.integrate(z)) < 1e-12


def test_grid_errors():
    with pytest.raises(GridError):
        make_grid(3, 32, "full")
    with pytest.raises(GridError):
        make_grid(1, 7)
    with pytest.raises(GridError):
        make_grid(2, 16, band_limit=40)


def test_legendre_matches_scipy():
    # independent route: scipy's associated Legendre functions rescaled to unit L2 norm on [-1, 1]
    theta = np.linspace(0.1, 3.0, 7)
    p = normalized_legendre(6, theta)
    x = np.cos(theta)
    for ell in range(7):
        for m in range(ell + 1):
            scale = math.sqrt((2 * ell + 1) / 2 * math.factorial(ell - m) / math.factorial(ell + m))
            ref = scale * special.lpmv(m, ell, x)
            assert np.allclose(np.abs(p[m, ell]), np.abs(ref), atol=1e-12)


def test_gegenbauer_nodes_match_scipy():
    x, w = gauss_gegenbauer(3, 20)
    xs, ws = special.roots_jacobi(20, 0.5, 0.5)
    assert np.allclose(np.sort(x), np.sort(xs), atol=1e-12)
    assert w.sum() == pytest.approx(ws.sum(), rel=1e-12)


def test_gegenbauer_orthonormal():
    x, w = gauss_gegenbauer(4, 40)
    basis = orthonormal_gegenbauer(4, 30, x)
    gram = (basis * w[:, None]).T @ basis
    assert np.max(np.abs(gram - np.eye(31) * gram[0, 0])) < 1e-12 * gram[0, 0]


def test_round_trip(grid):
    rng = np.random.default_rng(1)
    c = rng.standard_normal(grid.n_coeffs) * (grid.degrees <= 10)
    v = grid.synthesize(c)
    assert np.max(np.abs(grid.analyze(v) - c)) < 1e-12


def test_gradient_of_linear_field():
    g = make_grid(2, 64)
    e = np.array([0.3, -0.4, 0.5])
    u = ScalarField.from_values(g, g.nodes @ e)
    expected = e - (g.nodes @ e)[:, None] * g.nodes
    assert np.max(np.abs(u.gradient() - expected)) < 1e-9
    assert np.max(np.abs(ScalarField.constant(g, 0.3).gradient())) == 0.0


def test_laplacian_eigenvalues(grid):
    axis = grid.nodes[:, grid.axis]
    u = ScalarField.from_values(grid, axis)
    assert np.max(np.abs(u.laplacian().values + grid.dim * axis)) < 1e-8
    assert np.max(np.abs(ScalarField.constant(grid, 2.0).laplacian().values)) < 1e-12


def test_degree_two_band():
    g = make_grid(2, 64)
    z = g.nodes[:, 2]
    u = ScalarField.from_values(g, (3 * z**2 - 1) / 2)
    grad = u.gradient()
    assert g.integrate(np.einsum("ij,ij->i", grad, grad)) == pytest.approx(6 * g.integrate(u.values**2), rel=1e-10)
    assert np.max(np.abs(u.laplacian().values + 6 * u.values)) < 1e-8


@given(st.integers(min_value=0, max_value=10_000))
def test_weak_divergence_is_adjoint(seed):
    g = make_grid(2, 16, "axisym")
    rng = np.random.default_rng(seed)
    f = ScalarField.from_coeffs(g, rng.standard_normal(g.n_coeffs))
    vec = rng.standard_normal(g.size)[:, None] * g.tangent_basis[0]
    div = g.synthesize(g.weak_divergence(vec))
    lhs = g.integrate(np.einsum("ij,ij->i", f.gradient(), vec))
    assert lhs == pytest.approx(-g.integrate(f.values * div), rel=1e-10, abs=1e-12)


def test_norms():
    g = make_grid(2, 64)
    e3 = g.nodes[:, 2]
    assert norm(ScalarField.constant(g, 0.05), "L1") == pytest.approx(0.05 * 4 * math.pi, rel=1e-12)
    u = ScalarField.from_values(g, e3)
    assert norm(u, "L2") ** 2 == pytest.approx(4 * math.pi / 3, rel=1e-12)
    assert norm(u, "W12") ** 2 == pytest.approx(4 * math.pi, rel=1e-10)
    assert norm(u, "C0") == pytest.approx(1.0, abs=1e-3)
    with pytest.raises(ValueError):
        norm(u, "Lp")
    with pytest.raises(ValueError):
        norm(u, "C1alpha", alpha=1.5)


def test_fields_on_different_grids_do_not_mix():
    a = ScalarField.constant(make_grid(1, 32), 1.0)
    b = ScalarField.constant(make_grid(1, 64), 1.0)
    with pytest.raises(GridMismatchError):
        a + b


def test_constant_field_is_exact(grid):
    u = ScalarField.constant(grid, 0.1)
    assert u.integral() == pytest.approx(0.1 * sphere_area(grid.dim), rel=1e-14)
