"""Low-mode splitting of functions on S^n and the interpolation bound for
mean-zero functions."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .sphere_core import (ScalarField, SphereGrid, laplace_eigenvalue, make_grid,
                          sphere_area, zonal_polynomial)


class DegenerateInputError(ValueError):
    """Input for which the requested quantity is undefined."""


class BandSpecError(ValueError):
    """Malformed harmonic band specification."""


@dataclass(frozen=True)
class Decomposition:
    """``u = a + b . x + R`` with R orthogonal to degrees 0 and 1."""

    mean: float
    linear: np.ndarray
    remainder: ScalarField
    degree_energy: np.ndarray

    def linear_part(self, grid: SphereGrid) -> np.ndarray:
        return grid.nodes @ self.linear


def decompose(u: ScalarField) -> Decomposition:
    grid = u.grid
    area = sphere_area(grid.dim)
    mean = u.integral() / area
    second_moment = area / (grid.dim + 1)
    linear = grid.integrate_vector(grid.nodes * u.values[:, None]) / second_moment
    rest = u - mean - ScalarField.from_values(grid, grid.nodes @ linear)
    coeffs = u.coeffs if u.coeffs is not None else grid.analyze(u.values)
    energy = np.bincount(grid.degrees, weights=coeffs**2, minlength=grid.max_band + 1)
    return Decomposition(float(mean), linear, rest, energy)


def gradient_energy(u: ScalarField) -> float:
    g = u.gradient()
    return u.grid.integrate(np.einsum("ij,ij->i", g, g))


def l2_energy(u: ScalarField) -> float:
    return u.grid.integrate(u.values**2)


def poincare_ratio(rest: ScalarField, tol: float = 1e-8) -> float:
    """``int |grad R|^2 / int R^2`` for R orthogonal to degrees 0 and 1."""
    grid = rest.grid
    size = math.sqrt(l2_energy(rest))
    if size == 0.0:
        raise DegenerateInputError("remainder vanishes identically")
    scale = size * math.sqrt(sphere_area(grid.dim))
    low = max(abs(rest.integral()),
              float(np.max(np.abs(grid.integrate_vector(grid.nodes * rest.values[:, None])))))
    if low > tol * scale:
        raise DegenerateInputError(f"remainder is not orthogonal to degrees <= 1 (residual {low:.3e})")
    return gradient_energy(rest) / size**2


# ---------------------------------------------------------------------------
# synthesis from band specifications
# ---------------------------------------------------------------------------

def synthesize(bands: list[dict], grid: SphereGrid) -> ScalarField:
    """Field from a list of ``{"degree", "order" | "axis", "coeff"}`` entries.

    ``order`` may be ``"zonal"`` (the degree-k harmonic symmetric about
    ``e_{n+1}``, equal to 1 at the pole) or an integer selecting an
    orthonormal basis function (on the circle ``m > 0`` is cosine and
    ``m < 0`` is sine).  ``axis`` (1-based) with degree 1 gives ``x_axis``.
    """
    values = np.zeros(grid.size)
    coeffs = np.zeros(grid.n_coeffs)
    for band in bands:
        try:
            degree = int(band["degree"])
            coeff = float(band["coeff"])
        except (KeyError, TypeError, ValueError) as exc:
            raise BandSpecError(f"bad band entry {band!r}") from exc
        if degree < 0:
            raise BandSpecError("degrees are non-negative")
        if degree > grid.band_limit:
            raise BandSpecError(f"degree {degree} exceeds band limit {grid.band_limit}")
        if degree == 0:
            values += coeff
            continue
        if "axis" in band:
            axis = int(band["axis"]) - 1
            if degree != 1 or not 0 <= axis <= grid.dim:
                raise BandSpecError("axis entries are degree-1 coordinate functions")
            if grid.mode == "axisym" and axis != grid.axis:
                raise BandSpecError("axisymmetric grids only carry the polar coordinate")
            values += coeff * grid.nodes[:, axis]
            continue
        order = band.get("order", "zonal")
        if order == "zonal":
            values += coeff * zonal_polynomial(degree, grid.dim, grid.nodes[:, grid.axis])
            continue
        if grid.mode == "axisym":
            raise BandSpecError("axisymmetric grids accept only zonal bands")
        order = int(order)
        hit = np.flatnonzero((grid.degrees == degree) & (grid.orders == order))
        if grid.dim == 1 and abs(order) != degree:
            hit = np.array([], dtype=int)
        if hit.size != 1:
            raise BandSpecError(f"no harmonic with degree {degree} and order {order}")
        coeffs[hit[0]] += coeff
    return ScalarField.from_values(grid, values + grid.synthesize(coeffs))


# ---------------------------------------------------------------------------
# interpolation bound
# ---------------------------------------------------------------------------

# log argument constant for n = 2 keeps the logarithm >= 1
LOG_CONSTANT_2 = math.e * math.sqrt(4.0 * math.pi)


@dataclass(frozen=True)
class FugledeBound:
    lhs: float
    rhs: float
    constant: float

    @property
    def ratio(self) -> float:
        return self.lhs / self.rhs if self.rhs > 0 else math.inf

    @property
    def holds(self) -> bool:
        return self.lhs <= self.rhs * (1 + 1e-12)


def fuglede_profile(v: ScalarField) -> tuple[float, float]:
    """``(sup|v|, bound without constant)`` for a mean-zero field."""
    grid = v.grid
    n = grid.dim
    g = np.linalg.norm(v.gradient(), axis=1)
    grad_l2 = math.sqrt(grid.integrate(g**2))
    grad_sup = float(np.max(g))
    lhs = float(np.max(np.abs(v.values)))
    if grad_l2 == 0.0:
        raise DegenerateInputError("gradient vanishes; bound is trivial")
    if n == 1:
        shape = grad_l2
    elif n == 2:
        shape = grad_l2 * math.sqrt(math.log(LOG_CONSTANT_2 * grad_sup / grad_l2))
    else:
        shape = grad_sup ** ((n - 2) / n) * grad_l2 ** (2 / n)
    return lhs, shape


def fuglede_bound(v: ScalarField, constant: float | None = None, tol: float = 1e-8) -> FugledeBound:
    """Sup norm of a mean-zero field against its gradient-norm bound."""
    from .config import fuglede_constant

    grid = v.grid
    scale = grid.integrate(np.abs(v.values)) + 1e-300
    if abs(v.integral()) > tol * scale:
        raise DegenerateInputError("field does not have zero mean")
    lhs, shape = fuglede_profile(v)
    c = fuglede_constant(grid.dim) if constant is None else float(constant)
    return FugledeBound(lhs, c * shape, c)


def calibration_family(n: int, members: int = 48, seed: int = 0) -> list[ScalarField]:
    """Seeded mean-zero band-limited fields used to calibrate the constants."""
    rng = np.random.default_rng(seed)
    if n <= 2:
        grid = make_grid(n, 128 if n == 1 else 32, "full", band_limit=24 if n == 1 else 16)
    else:
        grid = make_grid(n, 96, "axisym", band_limit=24)
    out = []
    for idx in range(members):
        top = 1 + idx % grid.band_limit
        decay = rng.uniform(0.0, 1.5)
        c = rng.standard_normal(grid.n_coeffs) * (grid.degrees <= top)
        c *= (1.0 + grid.degrees) ** (-decay)
        c[grid.degrees == 0] = 0.0
        if not np.any(c):
            c[1] = 1.0
        out.append(ScalarField.from_coeffs(grid, c))
    return out


def calibrate_fuglede(n: int, members: int = 48, seed: int = 0, safety: float = 1.5) -> float:
    ratios = [lhs / shape for lhs, shape in map(fuglede_profile, calibration_family(n, members, seed))]
    return safety * max(ratios)
