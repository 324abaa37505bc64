"""Sets whose boundary is the normal graph ``{(1 + u(x)) x : x in S^n}``."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from . import config
from .sphere_core import ScalarField, ball_volume, sphere_area


class NotStarShapedError(ValueError):
    """The radial function ``1 + u`` drops below the admissible margin."""


class ConvergenceError(RuntimeError):
    """An iterative procedure did not reach its tolerance."""


@dataclass(frozen=True, eq=False)
class NormalGraphSet:
    """Star-shaped set described by its radial function ``1 + u``."""

    u: ScalarField
    margin: float = 0.05

    @property
    def grid(self):
        return self.u.grid

    @property
    def dim(self) -> int:
        return self.u.grid.dim

    @property
    def radius(self) -> np.ndarray:
        return 1.0 + self.u.values

    def boundary_points(self) -> np.ndarray:
        return self.radius[:, None] * self.grid.nodes


def build_set(u: ScalarField, margin: float | None = None) -> NormalGraphSet:
    margin = config.get("star_margin") if margin is None else float(margin)
    low = float(np.min(1.0 + u.values))
    if not np.all(np.isfinite(u.values)):
        raise NotStarShapedError("radial function has non-finite samples")
    if low <= margin:
        raise NotStarShapedError(f"min(1 + u) = {low:.4g} is below the margin {margin}")
    if u.coeffs is None:
        u = ScalarField.from_values(u.grid, u.values)
    return NormalGraphSet(u, margin)


# ---------------------------------------------------------------------------
# integrals
# ---------------------------------------------------------------------------

def _grad_sq(s: NormalGraphSet) -> np.ndarray:
    g = s.u.gradient()
    return np.einsum("ij,ij->i", g, g)


def area_element(s: NormalGraphSet) -> np.ndarray:
    """``sqrt(det G)`` of the parametrization ``x -> (1 + u) x``."""
    r = s.radius
    return r ** (s.dim - 1) * np.sqrt(r * r + _grad_sq(s))


def perimeter(s: NormalGraphSet) -> float:
    return s.grid.integrate(area_element(s))


def volume(s: NormalGraphSet) -> float:
    return s.grid.integrate(s.radius ** (s.dim + 1)) / (s.dim + 1)


def barycenter(s: NormalGraphSet) -> np.ndarray:
    """``int_{boundary} y dH^n`` (not normalized by the perimeter)."""
    return s.grid.integrate_vector(s.boundary_points() * area_element(s)[:, None])


def perimeter_deficit(s: NormalGraphSet) -> float:
    return perimeter(s) - sphere_area(s.dim)


# ---------------------------------------------------------------------------
# curvature
# ---------------------------------------------------------------------------

def mean_curvature(s: NormalGraphSet) -> ScalarField:
    """Sum of principal curvatures (outer normal, unit sphere has ``n``)."""
    grid, n = s.grid, s.dim
    r = s.radius
    grad = s.u.gradient()
    gsq = np.einsum("ij,ij->i", grad, grad)
    w = np.sqrt(r * r + gsq)
    flux = grad / (r * w)[:, None]
    div = grid.synthesize(grid.weak_divergence(flux))
    values = -div + (n - gsq / (r * r)) / w
    return ScalarField.from_values(grid, values)


def reference_curvature(s: NormalGraphSet) -> float:
    """Mean curvature ``n P / ((n+1) |Omega|)`` of the volume-matched sphere fit."""
    return s.dim * perimeter(s) / ((s.dim + 1) * volume(s))


# ---------------------------------------------------------------------------
# deficits and asymmetries
# ---------------------------------------------------------------------------

def ball_radial(grid, center: np.ndarray, radius: float) -> np.ndarray:
    """Radial function about the origin of ``B_radius(center)``."""
    proj = grid.nodes @ center
    disc = radius * radius - center @ center + proj * proj
    return proj + np.sqrt(np.maximum(disc, 0.0))


def symmetric_difference(s: NormalGraphSet, center, radius: float) -> float:
    """``|Omega symdiff B_radius(center)|`` via radial integration."""
    center = np.asarray(center, dtype=float)
    if np.linalg.norm(center) >= radius:
        raise ValueError("ball must contain the origin")
    k = s.dim + 1
    rb = ball_radial(s.grid, center, radius)
    return s.grid.integrate(np.abs(s.radius**k - rb**k)) / k


def volume_radius(s: NormalGraphSet) -> float:
    return (volume(s) / ball_volume(s.dim)) ** (1.0 / (s.dim + 1))


def _center_from(params: np.ndarray, s: NormalGraphSet) -> np.ndarray:
    if s.grid.mode == "axisym":
        c = np.zeros(s.dim + 1)
        c[s.grid.axis] = params[0]
        return c
    return np.asarray(params, dtype=float)


def _multistart(objective, s: NormalGraphSet, bound: float):
    offset = config.get("fraenkel_starts_offset")
    guess = barycenter(s) / perimeter(s)
    if s.grid.mode == "axisym":
        starts = [np.zeros(1), np.array([offset]), np.array([-offset]), guess[s.grid.axis:s.grid.axis + 1]]
    else:
        eye = np.eye(s.dim + 1)
        starts = [np.zeros(s.dim + 1)] + [sign * offset * e for e in eye for sign in (1, -1)] + [guess]

    def wrapped(p):
        c = _center_from(p, s)
        if np.linalg.norm(c) >= 0.999 * bound:
            return 1e3 + np.linalg.norm(c)
        return objective(c)

    best = None
    opts = dict(maxiter=config.get("fraenkel_max_iter"), fatol=config.get("fraenkel_ftol"), xatol=1e-10)
    for x0 in starts:
        res = minimize(wrapped, x0, method="Nelder-Mead", options=opts)
        if best is None or res.fun < best.fun:
            best = res
    center = _center_from(best.x, s)
    if np.linalg.norm(center) >= 0.999 * bound:
        raise ConvergenceError("optimal center left the admissible region")
    return float(best.fun), center


def fraenkel(s: NormalGraphSet) -> tuple[float, np.ndarray]:
    """Fraenkel asymmetry ``min_x |Omega symdiff B_r(x)| / |Omega|`` and its center."""
    r = volume_radius(s)
    vol = volume(s)
    return _multistart(lambda c: symmetric_difference(s, c, r) / vol, s, r)


def hausdorff_radial(s: NormalGraphSet, center) -> float:
    """Sup of the radial gap to the volume-matched ball at ``center``, relative to its radius."""
    r = volume_radius(s)
    rb = ball_radial(s.grid, np.asarray(center, dtype=float), r)
    return float(np.max(np.abs(s.radius - rb)) / r)


def outer_inclusion_gap(s: NormalGraphSet, center) -> float:
    """How far the boundary sticks out of the unit ball ``B_1(center)``."""
    dist = np.linalg.norm(s.boundary_points() - np.asarray(center, dtype=float), axis=1)
    return max(float(np.max(dist)) - 1.0, 0.0)


@dataclass(frozen=True)
class DeficitReport:
    delta: float
    delta_iso: float
    delta_cmc: float
    alpha: float
    hausdorff: float
    outer_gap: float
    center_used: np.ndarray
    reference_curvature: float

    def as_dict(self) -> dict:
        return {
            "delta": self.delta,
            "delta_iso": self.delta_iso,
            "delta_cmc": self.delta_cmc,
            "alpha": self.alpha,
            "hausdorff": self.hausdorff,
            "outer_gap": self.outer_gap,
            "center_used": [float(c) for c in self.center_used],
            "reference_curvature": self.reference_curvature,
        }


def isoperimetric_deficit(s: NormalGraphSet) -> float:
    n = s.dim
    p, v = perimeter(s), volume(s)
    expo = n / (n + 1)
    return p * ball_volume(n) ** expo / (sphere_area(n) * v**expo) - 1.0


def cmc_deficit(s: NormalGraphSet, curvature: ScalarField | None = None) -> float:
    h = mean_curvature(s) if curvature is None else curvature
    return float(np.max(np.abs(h.values / reference_curvature(s) - 1.0)))


def deficits(s: NormalGraphSet) -> DeficitReport:
    alpha, center = fraenkel(s)
    return DeficitReport(
        delta=perimeter_deficit(s),
        delta_iso=isoperimetric_deficit(s),
        delta_cmc=cmc_deficit(s),
        alpha=alpha,
        hausdorff=hausdorff_radial(s, center),
        outer_gap=outer_inclusion_gap(s, center),
        center_used=center,
        reference_curvature=reference_curvature(s),
    )


# ---------------------------------------------------------------------------
# normalizations
# ---------------------------------------------------------------------------

def radial_about(s: NormalGraphSet, center, tol: float = 1e-14, max_iter: int = 200) -> np.ndarray:
    """Radial function of the same set seen from ``center``, at the grid nodes."""
    grid = s.grid
    c = np.asarray(center, dtype=float)
    coeffs = s.u.coeffs
    nodes = grid.nodes
    proj = nodes @ c
    rho = s.radius - proj
    for _ in range(max_iter):
        y = c + rho[:, None] * nodes
        dirs = y / np.linalg.norm(y, axis=1)[:, None]
        big_r = 1.0 + grid.evaluate(coeffs, dirs)
        new = -proj + np.sqrt(proj * proj - c @ c + big_r * big_r)
        if np.max(np.abs(new - rho)) <= tol * np.max(np.abs(new)):
            return new
        rho = new
    raise ConvergenceError("radial re-parametrization did not converge")


def translate(s: NormalGraphSet, shift) -> NormalGraphSet:
    """The set ``Omega + shift`` as a normal graph about the origin."""
    rho = radial_about(s, -np.asarray(shift, dtype=float))
    return build_set(ScalarField.from_values(s.grid, rho - 1.0), s.margin)


def recenter(s: NormalGraphSet, tol: float | None = None) -> tuple[NormalGraphSet, np.ndarray]:
    """Translate until the boundary barycenter sits at the origin.

    Returns the new set and the cumulative translation applied.
    """
    tol = config.get("recenter_tol") if tol is None else tol
    total = np.zeros(s.dim + 1)
    for _ in range(config.get("recenter_max_iter")):
        bary = barycenter(s)
        if np.linalg.norm(bary) <= tol:
            return s, total
        step = -bary / perimeter(s)
        s = translate(s, step)
        total = total + step
    raise ConvergenceError("barycenter did not reach tolerance")


def enforce_curvature_bound(s: NormalGraphSet) -> tuple[NormalGraphSet, float]:
    """Scale by ``max(sup H / n, 1)`` so that ``H <= n`` afterwards."""
    h = mean_curvature(s)
    scale = max(float(np.max(h.values)) / s.dim, 1.0)
    if scale == 1.0:
        return s, 1.0
    return build_set(scale * s.u + (scale - 1.0), s.margin), scale


def scale_set(s: NormalGraphSet, factor: float) -> NormalGraphSet:
    return build_set(factor * s.u + (factor - 1.0), s.margin)
