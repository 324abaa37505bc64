import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from isostab.harmonics import (BandSpecError, DegenerateInputError, calibrate_fuglede, decompose,
                               fuglede_bound, fuglede_profile, gradient_energy, l2_energy, poincare_ratio,
                               synthesize)
from isostab.sphere_core import ScalarField, make_grid, sphere_area

S2 = make_grid(2, 32)


def test_decompose_low_modes():
    z = S2.nodes[:, 2]
    u = ScalarField.from_values(S2, 0.1 + 0.2 * z + 0.05 * (3 * z**2 - 1) / 2)
    d = decompose(u)
    assert d.mean == pytest.approx(0.1, abs=1e-12)
    assert np.allclose(d.linear, [0, 0, 0.2], atol=1e-12)
    expected = 0.05 * (3 * z**2 - 1) / 2
    assert np.max(np.abs(d.remainder.values - expected)) < 1e-12
    assert poincare_ratio(d.remainder) == pytest.approx(6.0, rel=1e-10)


def test_degree_three_ratio():
    u = synthesize([{"degree": 3, "coeff": 1.0}], S2)
    assert poincare_ratio(decompose(u).remainder) == pytest.approx(12.0, rel=1e-10)


def test_pure_low_modes_are_degenerate():
    z = S2.nodes[:, 2]
    d = decompose(ScalarField.from_values(S2, 1.0 + z))
    with pytest.raises(DegenerateInputError):
        poincare_ratio(d.remainder)


def test_unorthogonalized_remainder_is_rejected():
    with pytest.raises(DegenerateInputError):
        poincare_ratio(ScalarField.from_values(S2, 1.0 + S2.nodes[:, 2] ** 2))


@given(st.integers(0, 10_000), st.sampled_from([1, 2]))
def test_pythagoras_and_poincare(seed, n):
    grid = make_grid(n, 64 if n == 1 else 24, "full", band_limit=12 if n == 1 else 10)
    rng = np.random.default_rng(seed)
    u = ScalarField.from_coeffs(grid, rng.standard_normal(grid.n_coeffs) * (grid.degrees <= grid.band_limit))
    d = decompose(u)
    low = d.mean**2 * sphere_area(n) + d.linear @ d.linear * sphere_area(n) / (n + 1)
    assert l2_energy(u) == pytest.approx(low + l2_energy(d.remainder), rel=1e-10)
    grad_low = n * d.linear @ d.linear * sphere_area(n) / (n + 1)
    assert gradient_energy(u) == pytest.approx(grad_low + gradient_energy(d.remainder), rel=1e-9)
    ratio = poincare_ratio(d.remainder)
    assert 2 * (n + 1) - 1e-8 <= ratio <= grid.band_limit * (grid.band_limit + n - 1) + 1e-8


@given(st.integers(2, 5), st.integers(3, 4))
def test_band_ratio_bounds(lo, span):
    grid = make_grid(2, 32, "full", band_limit=12)
    hi = lo + span
    u = synthesize([{"degree": k, "coeff": 1.0} for k in range(lo, hi + 1)], grid)
    ratio = poincare_ratio(decompose(u).remainder)
    assert lo * (lo + 1) - 1e-8 <= ratio <= hi * (hi + 1) + 1e-8


def test_synthesize_errors():
    with pytest.raises(BandSpecError):
        synthesize([{"degree": 40, "coeff": 1.0}], S2)
    with pytest.raises(BandSpecError):
        synthesize([{"degree": 2, "coeff": 1.0, "order": 5}], S2)
    with pytest.raises(BandSpecError):
        synthesize([{"coeff": 1.0}], S2)
    with pytest.raises(BandSpecError):
        synthesize([{"degree": 2, "coeff": 1.0, "order": 1}], make_grid(2, 32, "axisym"))


def test_synthesize_zonal_is_one_at_pole():
    for n, mode in ((2, "full"), (3, "axisym")):
        grid = make_grid(n, 64, mode)
        u = synthesize([{"degree": 4, "coeff": 1.0}], grid)
        pole = np.argmax(grid.nodes[:, grid.axis])
        assert abs(u.values[pole] - 1.0) < 0.05


def test_fuglede_on_circle():
    grid = make_grid(1, 64)
    eps = 0.01
    v = ScalarField.from_values(grid, eps * grid.nodes[:, 0])
    lhs, shape = fuglede_profile(v)
    assert lhs == pytest.approx(eps, rel=1e-12)
    assert shape == pytest.approx(eps * math.sqrt(math.pi), rel=1e-12)
    assert fuglede_bound(v).holds


def test_fuglede_rejects_mean():
    grid = make_grid(1, 64)
    with pytest.raises(DegenerateInputError):
        fuglede_bound(ScalarField.from_values(grid, 1 + grid.nodes[:, 0]))
    with pytest.raises(DegenerateInputError):
        fuglede_bound(ScalarField.constant(grid, 0.0))


@given(st.integers(0, 10_000), st.sampled_from([1, 2, 3]))
def test_fuglede_holds_on_random_fields(seed, n):
    if n <= 2:
        grid = make_grid(n, 128 if n == 1 else 32, "full", band_limit=20 if n == 1 else 14)
    else:
        grid = make_grid(n, 96, "axisym", band_limit=20)
    rng = np.random.default_rng(seed)
    c = rng.standard_normal(grid.n_coeffs) * (1.0 + grid.degrees) ** -rng.uniform(0, 1.5)
    c *= grid.degrees <= grid.band_limit
    c[grid.degrees == 0] = 0.0
    assert fuglede_bound(ScalarField.from_coeffs(grid, c)).holds


def test_calibration_is_deterministic():
    assert calibrate_fuglede(1, members=8) == calibrate_fuglede(1, members=8)
