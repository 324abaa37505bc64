"""Quadrature grids on the unit sphere S^n and the fields that live on them.

Three layouts are supported:

* ``(1, "full")``: uniform angles on the circle with a real Fourier basis.
* ``(2, "full")``: Gauss-Legendre latitudes times uniform longitudes with
  real orthonormal spherical harmonics.
* ``(n, "axisym")``: Gauss-Jacobi nodes in ``cos(theta)`` for functions of
  ``x . e_{n+1}`` only, expanded in Jacobi polynomials of ``cos(theta)``.

Every grid exposes the same small set of spectral operations (analysis,
synthesis, gradient, weak divergence, point evaluation) so that the geometry
code above it never branches on the layout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import special

DEFAULT_BAND_LIMIT = 32
ROUNDOFF_FLOOR = 4e-16
DEFAULT_RESOLUTION = {(1, "full"): 256, (2, "full"): 64, "axisym": 128}


class GridError(ValueError):
    """Unsupported or inconsistent grid request."""


class GridMismatchError(ValueError):
    """Fields defined on different grids were combined."""


def sphere_area(n: int) -> float:
    """Surface measure of the unit sphere S^n in R^{n+1}."""
    return 2.0 * math.pi ** ((n + 1) / 2) / math.gamma((n + 1) / 2)


def ball_volume(n: int) -> float:
    """Volume of the unit ball in R^{n+1}."""
    return sphere_area(n) / (n + 1)


def laplace_eigenvalue(k: int | np.ndarray, n: int):
    """Eigenvalue ``k (n + k - 1)`` of minus the Laplacian on degree-k harmonics."""
    return k * (n + k - 1)


def normalized_legendre(lmax: int, theta: np.ndarray, with_derivative: bool = False):
    """Associated Legendre functions normalized on [-1, 1].

    Returns ``P[m, l, k]`` with ``int_{-1}^{1} P[m, l]^2 dx = 1`` evaluated at
    ``cos(theta[k])``; entries with ``l < m`` are zero.  The optional second
    array holds the polar-angle derivative (undefined exactly at the poles).
    """
    theta = np.asarray(theta, dtype=float)
    x = np.cos(theta)
    s = np.sin(theta)
    p = np.zeros((lmax + 1, lmax + 1, theta.size))
    diag = np.full(theta.size, 1.0 / math.sqrt(2.0))
    for m in range(lmax + 1):
        if m > 0:
            diag = math.sqrt((2 * m + 1) / (2 * m)) * s * diag
        p[m, m] = diag
        if m + 1 <= lmax:
            p[m, m + 1] = math.sqrt(2 * m + 3) * x * diag
        for ell in range(m + 2, lmax + 1):
            a = math.sqrt((4 * ell * ell - 1) / (ell * ell - m * m))
            b = math.sqrt(((ell - 1) ** 2 - m * m) / (4 * (ell - 1) ** 2 - 1))
            p[m, ell] = a * (x * p[m, ell - 1] - b * p[m, ell - 2])
    if not with_derivative:
        return p
    dp = np.zeros_like(p)
    for m in range(lmax + 1):
        for ell in range(m, lmax + 1):
            lower = p[m, ell - 1] if ell - 1 >= m else 0.0
            c = math.sqrt((2 * ell + 1) / (2 * ell - 1) * (ell * ell - m * m)) if ell > m else 0.0
            dp[m, ell] = (ell * x * p[m, ell] - c * lower) / s
    return p, dp


def zonal_polynomial(k: int, n: int, t):
    """Degree-k zonal harmonic on S^n as a function of ``t = x . e``, equal to 1 at t = 1."""
    t = np.asarray(t, dtype=float)
    vals = orthonormal_gegenbauer(n, k, np.append(t.ravel(), 1.0))[:, k]
    return (vals[:-1] / vals[-1]).reshape(t.shape)


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class SphereGrid:
    """Nodes and weights on S^n plus the spectral machinery of one layout.

    ``band_limit`` is the user-facing degree cap for synthesized harmonics;
    ``max_band`` is the largest degree the grid resolves and is used for
    fields analyzed from samples and for nonlinear operations.
    """

    dim: int
    mode: str
    resolution: int
    band_limit: int
    max_band: int
    nodes: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)
    degrees: np.ndarray = field(repr=False)
    orders: np.ndarray = field(repr=False)
    tangent_basis: tuple = field(repr=False)
    _ops: dict = field(repr=False)

    # -- identity -----------------------------------------------------------
    @property
    def key(self) -> tuple:
        return (self.dim, self.mode, self.resolution, self.band_limit)

    def __eq__(self, other):
        return isinstance(other, SphereGrid) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    @property
    def size(self) -> int:
        return self.weights.size

    @property
    def n_coeffs(self) -> int:
        return self.degrees.size

    @property
    def axis(self) -> int:
        """Index of the polar axis ``e_{n+1}``."""
        return self.dim

    # -- quadrature ----------------------------------------------------------
    def integrate(self, values) -> float:
        values = np.asarray(values, dtype=float)
        if values.ndim == 1:
            return float(self.weights @ values)
        return np.einsum("i,i...->...", self.weights, values)

    def integrate_vector(self, values: np.ndarray) -> np.ndarray:
        """Integrate an ambient-vector-valued function; on axisymmetric grids
        only the polar component survives the rotation average."""
        out = np.asarray(self.weights @ np.asarray(values, dtype=float))
        if self.mode == "axisym":
            kept = np.zeros_like(out)
            kept[self.axis] = out[self.axis]
            out = kept
        return out

    # -- spectral operations --------------------------------------------------
    def analyze(self, values) -> np.ndarray:
        return self._ops["analyze"](np.asarray(values, dtype=float))

    def synthesize(self, coeffs) -> np.ndarray:
        return self._ops["synthesize"](np.asarray(coeffs, dtype=float))

    def gradient(self, coeffs) -> np.ndarray:
        """Tangential gradient as ambient vectors, shape ``(N, n+1)``."""
        return self._ops["gradient"](np.asarray(coeffs, dtype=float))

    def weak_divergence(self, vectors) -> np.ndarray:
        """Coefficients of the Galerkin projection of ``div V``.

        Uses ``int div(V) Y = - int V . grad Y`` so that the result is the
        exact adjoint of :meth:`gradient` under the grid quadrature.
        """
        return self._ops["divergence"](np.asarray(vectors, dtype=float))

    def evaluate(self, coeffs, points) -> np.ndarray:
        """Evaluate a coefficient vector at arbitrary unit vectors."""
        return self._ops["evaluate"](np.asarray(coeffs, dtype=float), np.atleast_2d(points))

    def laplacian_coeffs(self, coeffs) -> np.ndarray:
        return -laplace_eigenvalue(self.degrees, self.dim) * np.asarray(coeffs, dtype=float)

    def finite_difference_gradient(self, values) -> np.ndarray:
        return self._ops["fd_gradient"](np.asarray(values, dtype=float))

    def neighbor_pairs(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Index pairs of adjacent nodes and their geodesic distance."""
        return self._ops["neighbors"]()

    def spacing(self) -> float:
        return float(np.max(self.neighbor_pairs()[2]))


def make_grid(n: int, resolution: int | None = None, mode: str = "full",
              band_limit: int | None = None) -> SphereGrid:
    """Build a quadrature grid on S^n.

    ``resolution`` counts nodes on the circle, latitudes for ``n = 2``, and
    polar-angle nodes in axisymmetric mode.
    """
    if mode not in ("full", "axisym"):
        raise GridError(f"unknown grid mode {mode!r}")
    if n < 1:
        raise GridError("sphere dimension must be at least 1")
    if mode == "full" and n > 2:
        raise GridError(f"full grids exist only for n <= 2; use axisym for n = {n}")
    if resolution is None:
        resolution = DEFAULT_RESOLUTION["axisym" if mode == "axisym" else (n, mode)]
    resolution = int(resolution)
    if mode == "axisym":
        builder = _axisym_grid
    elif n == 1:
        builder = _circle_grid
    else:
        builder = _sphere2_grid
    return builder(n, resolution, band_limit)


def _check_band(band_limit, max_band):
    if band_limit is None:
        band_limit = min(DEFAULT_BAND_LIMIT, max_band)
    band_limit = int(band_limit)
    if band_limit < 1 or band_limit > max_band:
        raise GridError(f"band limit {band_limit} not resolvable (max {max_band})")
    return band_limit


# ---------------------------------------------------------------------------
# circle
# ---------------------------------------------------------------------------

def _circle_grid(n, resolution, band_limit):
    if resolution < 8 or resolution % 2:
        raise GridError("circle grids need an even node count >= 8")
    size = resolution
    half = size // 2
    max_band = half - 1
    band_limit = _check_band(band_limit, max_band)
    phi = 2.0 * np.pi * np.arange(size) / size
    nodes = np.stack([np.cos(phi), np.sin(phi)], axis=1)
    weights = np.full(size, 2.0 * np.pi / size)

    # columns: 1, (cos k, sin k) for k < N/2, cos(N/2)
    degrees = [0]
    orders = [0]
    for k in range(1, half):
        degrees += [k, k]
        orders += [k, -k]
    degrees.append(half)
    orders.append(half)
    degrees = np.array(degrees)
    orders = np.array(orders)

    basis, dbasis = _circle_basis(phi, degrees, orders, half)
    e_phi = np.stack([-np.sin(phi), np.cos(phi)], axis=1)
    wb = basis * weights[:, None]

    def analyze(v):
        return v @ wb

    def synthesize(c):
        return basis @ c

    def gradient(c):
        return (dbasis @ c)[:, None] * e_phi

    def divergence(vec):
        tangential = np.einsum("ij,ij->i", vec, e_phi)
        return -(dbasis.T @ (weights * tangential))

    def evaluate(c, points):
        ang = np.arctan2(points[:, 1], points[:, 0])
        b, _ = _circle_basis(ang, degrees, orders, half)
        return b @ c

    h = 2.0 * np.pi / size

    def fd_gradient(v):
        d = (-np.roll(v, -2) + 8 * np.roll(v, -1) - 8 * np.roll(v, 1) + np.roll(v, 2)) / (12 * h)
        return d[:, None] * e_phi

    idx = np.arange(size)

    def neighbors():
        return idx, np.roll(idx, -1), np.full(size, h)

    ops = dict(analyze=analyze, synthesize=synthesize, gradient=gradient,
               divergence=divergence, evaluate=evaluate, fd_gradient=fd_gradient,
               neighbors=neighbors)
    return SphereGrid(n, "full", resolution, band_limit, max_band, _frozen(nodes),
                      _frozen(weights), _frozen(degrees), _frozen(orders), (_frozen(e_phi),), ops)


def _circle_basis(phi, degrees, orders, half):
    b = np.empty((phi.size, degrees.size))
    db = np.empty_like(b)
    for j, (k, m) in enumerate(zip(degrees, orders)):
        if k == 0 or k == half:
            norm = 1.0 / math.sqrt(2 * math.pi)
            b[:, j] = norm * np.cos(k * phi)
            db[:, j] = -norm * k * np.sin(k * phi)
        elif m > 0:
            norm = 1.0 / math.sqrt(math.pi)
            b[:, j] = norm * np.cos(k * phi)
            db[:, j] = -norm * k * np.sin(k * phi)
        else:
            norm = 1.0 / math.sqrt(math.pi)
            b[:, j] = norm * np.sin(k * phi)
            db[:, j] = norm * k * np.cos(k * phi)
    return b, db


# ---------------------------------------------------------------------------
# two-sphere
# ---------------------------------------------------------------------------

def _sphere2_grid(n, resolution, band_limit):
    if resolution < 4:
        raise GridError("two-sphere grids need at least 4 latitudes")
    nlat, nlon = resolution, 2 * resolution
    lmax = nlat - 1
    band_limit = _check_band(band_limit, lmax)
    x, w = np.polynomial.legendre.leggauss(nlat)
    theta = np.arccos(x)[::-1]          # north to south
    w = w[::-1]
    phi = 2.0 * np.pi * np.arange(nlon) / nlon
    dphi = 2.0 * np.pi / nlon
    st, ct = np.sin(theta), np.cos(theta)
    sp, cp = np.sin(phi), np.cos(phi)
    nodes = np.stack([np.outer(st, cp), np.outer(st, sp), np.outer(ct, np.ones(nlon))], axis=-1)
    nodes = nodes.reshape(-1, 3)
    weights = np.outer(w * dphi, np.ones(nlon)).ravel()
    e_theta = np.stack([np.outer(ct, cp), np.outer(ct, sp), np.outer(-st, np.ones(nlon))], axis=-1).reshape(-1, 3)
    e_phi = np.stack([np.outer(np.ones(nlat), -sp), np.outer(np.ones(nlat), cp), np.zeros((nlat, nlon))], axis=-1).reshape(-1, 3)

    leg, dleg = normalized_legendre(lmax, theta, with_derivative=True)
    ms = np.arange(lmax + 1)
    cosm = np.cos(np.outer(phi, ms))    # (nlon, m)
    sinm = np.sin(np.outer(phi, ms))
    norm = np.where(ms == 0, 1.0 / math.sqrt(2 * math.pi), 1.0 / math.sqrt(math.pi))

    degrees = np.array([ell for ell in range(lmax + 1) for m in range(-ell, ell + 1)])
    orders = np.array([m for ell in range(lmax + 1) for m in range(-ell, ell + 1)])
    # flat index of (l, m) is l*l + l + m
    ell_grid, m_grid = np.meshgrid(np.arange(lmax + 1), ms, indexing="ij")
    valid = m_grid <= ell_grid
    cos_idx = (ell_grid * ell_grid + ell_grid + m_grid)[valid]
    sin_valid = valid & (m_grid > 0)
    sin_idx = (ell_grid * ell_grid + ell_grid - m_grid)[sin_valid]

    leg_w = leg * (w * dphi)[None, None, :] * norm[:, None, None]
    dleg_w = dleg * (w * dphi)[None, None, :] * norm[:, None, None]
    leg_n = leg * norm[:, None, None]
    dleg_n = dleg * norm[:, None, None]
    inv_sin = 1.0 / st

    def split(c):
        cc = np.zeros((lmax + 1, lmax + 1))   # [l, m]
        ss = np.zeros((lmax + 1, lmax + 1))
        cc[valid] = c[cos_idx]
        ss[sin_valid] = c[sin_idx]
        return cc, ss

    def merge(cc, ss):
        c = np.zeros(degrees.size)
        c[cos_idx] = cc[valid]
        c[sin_idx] = ss[sin_valid]
        return c

    def analyze(v):
        u = v.reshape(nlat, nlon)
        ac = u @ cosm                       # (i, m)
        asn = u @ sinm
        cc = np.einsum("mli,im->lm", leg_w, ac)
        ss = np.einsum("mli,im->lm", leg_w, asn)
        return merge(cc, ss)

    def synthesize(c):
        cc, ss = split(c)
        gc = np.einsum("mli,lm->im", leg_n, cc)
        gs = np.einsum("mli,lm->im", leg_n, ss)
        return (gc @ cosm.T + gs @ sinm.T).ravel()

    def gradient(c):
        cc, ss = split(c)
        gc = np.einsum("mli,lm->im", dleg_n, cc)
        gs = np.einsum("mli,lm->im", dleg_n, ss)
        d_theta = gc @ cosm.T + gs @ sinm.T
        hc = np.einsum("mli,lm->im", leg_n, cc) * ms
        hs = np.einsum("mli,lm->im", leg_n, ss) * ms
        d_phi = (-hc @ sinm.T + hs @ cosm.T) * inv_sin[:, None]
        return d_theta.reshape(-1, 1) * e_theta + d_phi.reshape(-1, 1) * e_phi

    def divergence(vec):
        vt = np.einsum("ij,ij->i", vec, e_theta).reshape(nlat, nlon)
        vp = (np.einsum("ij,ij->i", vec, e_phi).reshape(nlat, nlon)) * inv_sin[:, None]
        tc, ts = vt @ cosm, vt @ sinm
        pc, ps = vp @ cosm, vp @ sinm
        cc = np.einsum("mli,im->lm", dleg_w, tc) - np.einsum("mli,im->lm", leg_w, ps * ms)
        ss = np.einsum("mli,im->lm", dleg_w, ts) + np.einsum("mli,im->lm", leg_w, pc * ms)
        return -merge(cc, ss)

    def evaluate(c, points):
        th = np.arccos(np.clip(points[:, 2], -1.0, 1.0))
        ph = np.arctan2(points[:, 1], points[:, 0])
        p = normalized_legendre(lmax, th) * norm[:, None, None]
        cc, ss = split(c)
        gc = np.einsum("mlk,lm->km", p, cc)
        gs = np.einsum("mlk,lm->km", p, ss)
        return np.sum(gc * np.cos(np.outer(ph, ms)) + gs * np.sin(np.outer(ph, ms)), axis=1)

    hlon = dphi

    def fd_gradient(v):
        u = v.reshape(nlat, nlon)
        d_phi = (-np.roll(u, -2, 1) + 8 * np.roll(u, -1, 1) - 8 * np.roll(u, 1, 1) + np.roll(u, 2, 1)) / (12 * hlon)
        d_theta = np.gradient(u, theta, axis=0, edge_order=2)
        return d_theta.reshape(-1, 1) * e_theta + (d_phi * inv_sin[:, None]).reshape(-1, 1) * e_phi

    idx = np.arange(nlat * nlon).reshape(nlat, nlon)

    def neighbors():
        a_lon, b_lon = idx.ravel(), np.roll(idx, -1, axis=1).ravel()
        d_lon = np.repeat(hlon * st, nlon)
        a_lat, b_lat = idx[:-1].ravel(), idx[1:].ravel()
        d_lat = np.repeat(np.diff(theta), nlon)
        return (np.concatenate([a_lon, a_lat]), np.concatenate([b_lon, b_lat]),
                np.concatenate([d_lon, d_lat]))

    ops = dict(analyze=analyze, synthesize=synthesize, gradient=gradient,
               divergence=divergence, evaluate=evaluate, fd_gradient=fd_gradient,
               neighbors=neighbors)
    return SphereGrid(n, "full", resolution, band_limit, lmax, _frozen(nodes), _frozen(weights),
                      _frozen(degrees), _frozen(orders), (_frozen(e_theta), _frozen(e_phi)), ops)


# ---------------------------------------------------------------------------
# axisymmetric
# ---------------------------------------------------------------------------

def orthonormal_gegenbauer(n: int, kmax: int, x: np.ndarray, with_derivative: bool = False):
    """Polynomials orthonormal for ``(1 - x^2)^{(n-2)/2}`` on [-1, 1].

    These are the zonal harmonics of S^n written in ``x = cos(theta)``.
    Built with the three-term recurrence; derivatives are in ``x``.
    """
    x = np.asarray(x, dtype=float)
    lam = (n - 1) / 2
    a = (n - 2) / 2
    mu0 = math.sqrt(math.pi) * math.gamma(a + 1) / math.gamma(a + 1.5)

    def b(k):
        if lam == 0:
            return math.sqrt(0.5) if k == 1 else 0.5
        return math.sqrt(k * (k + 2 * lam - 1) / (4 * (k + lam) * (k + lam - 1)))

    p = np.zeros((kmax + 1, x.size))
    dp = np.zeros_like(p)
    p[0] = 1.0 / math.sqrt(mu0)
    if kmax >= 1:
        p[1] = x * p[0] / b(1)
        dp[1] = p[0] / b(1)
    for k in range(1, kmax):
        p[k + 1] = (x * p[k] - b(k) * p[k - 1]) / b(k + 1)
        dp[k + 1] = (p[k] + x * dp[k] - b(k) * dp[k - 1]) / b(k + 1)
    return (p.T, dp.T) if with_derivative else p.T


def gauss_gegenbauer(n: int, size: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss nodes (descending) and weights for ``(1 - x^2)^{(n-2)/2}``.

    scipy's roots are polished by Newton steps on the orthonormal recurrence
    and the weights are recomputed from the Christoffel function.
    """
    a = (n - 2) / 2
    x, _ = special.roots_jacobi(size, a, a)
    for _ in range(3):
        p, dp = orthonormal_gegenbauer(n, size, x, with_derivative=True)
        x = x - p[:, size] / dp[:, size]
    p = orthonormal_gegenbauer(n, size - 1, x)
    w = 1.0 / np.sum(p**2, axis=1)
    order = np.argsort(-x)
    return x[order], w[order]


def _jacobi_basis(n, kmax, theta):
    vals, dx = orthonormal_gegenbauer(n, kmax, np.cos(theta), with_derivative=True)
    return vals, -np.sin(theta)[:, None] * dx


def _axisym_grid(n, resolution, band_limit):
    if resolution < 8:
        raise GridError("axisymmetric grids need at least 8 nodes")
    size = resolution
    max_band = size - 1
    band_limit = _check_band(band_limit, max_band)
    a = (n - 2) / 2
    # Gauss-Jacobi in cos(theta): exact for the sin^{n-1} measure up to degree 2N-1
    x, w = gauss_gegenbauer(n, size)
    theta = np.arccos(x)
    omega = sphere_area(n - 1) if n > 1 else 2.0
    weights = omega * w
    nodes = np.zeros((size, n + 1))
    nodes[:, 0] = np.sin(theta)
    nodes[:, n] = x
    e_theta = np.zeros((size, n + 1))
    e_theta[:, 0] = x
    e_theta[:, n] = -np.sin(theta)

    raw, draw = _jacobi_basis(n, max_band, theta)
    scale = 1.0 / np.sqrt(weights @ raw**2)
    basis, dbasis = raw * scale, draw * scale
    basis_w = basis * weights[:, None]
    degrees = np.arange(size)

    def analyze(v):
        return v @ basis_w

    def synthesize(c):
        return basis @ c

    def gradient(c):
        return (dbasis @ c)[:, None] * e_theta

    def divergence(vec):
        vt = np.einsum("ij,ij->i", vec, e_theta)
        return -(dbasis.T @ (weights * vt))

    def evaluate(c, points):
        xs = np.clip(points[:, n], -1.0, 1.0)
        return (orthonormal_gegenbauer(n, max_band, xs) * scale) @ c

    def fd_gradient(v):
        return np.gradient(v, theta, edge_order=2)[:, None] * e_theta

    def neighbors():
        i = np.arange(size - 1)
        return i, i + 1, np.diff(theta)

    ops = dict(analyze=analyze, synthesize=synthesize, gradient=gradient,
               divergence=divergence, evaluate=evaluate, fd_gradient=fd_gradient,
               neighbors=neighbors)
    return SphereGrid(n, "axisym", resolution, band_limit, max_band, _frozen(nodes), _frozen(weights),
                      _frozen(degrees), _frozen(np.zeros(size, dtype=int)), (_frozen(e_theta),), ops)


def polar_angles(grid: SphereGrid) -> np.ndarray:
    """Polar angle of each node measured from ``e_{n+1}``."""
    return np.arccos(np.clip(grid.nodes[:, grid.axis], -1.0, 1.0))


# ---------------------------------------------------------------------------
# fields
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ScalarField:
    """Nodal samples on a grid, optionally with their spectral coefficients."""

    grid: SphereGrid
    values: np.ndarray
    coeffs: np.ndarray | None = None

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.shape != (self.grid.size,):
            raise GridError(f"field has {values.shape} samples, grid has {self.grid.size} nodes")
        object.__setattr__(self, "values", _frozen(values.copy()))
        if self.coeffs is not None:
            object.__setattr__(self, "coeffs", _frozen(np.asarray(self.coeffs, dtype=float).copy()))

    @classmethod
    def from_values(cls, grid: SphereGrid, values) -> "ScalarField":
        values = np.asarray(values, dtype=float)
        coeffs = grid.analyze(values)
        # roundoff-level coefficients only feed noise into derivatives
        coeffs[np.abs(coeffs) < ROUNDOFF_FLOOR * np.max(np.abs(coeffs), initial=0.0)] = 0.0
        return cls(grid, values, coeffs)

    @classmethod
    def from_coeffs(cls, grid: SphereGrid, coeffs) -> "ScalarField":
        coeffs = np.asarray(coeffs, dtype=float)
        return cls(grid, grid.synthesize(coeffs), coeffs)

    @classmethod
    def from_function(cls, grid: SphereGrid, func: Callable[[np.ndarray], np.ndarray]) -> "ScalarField":
        return cls.from_values(grid, func(grid.nodes))

    @classmethod
    def constant(cls, grid: SphereGrid, value: float) -> "ScalarField":
        coeffs = np.zeros(grid.n_coeffs)
        coeffs[0] = float(value) * math.sqrt(sphere_area(grid.dim))
        return cls(grid, np.full(grid.size, float(value)), coeffs)

    def _other(self, other):
        if isinstance(other, ScalarField):
            if other.grid != self.grid:
                raise GridMismatchError("fields live on different grids")
            return other.values, other.coeffs
        return float(other), None

    def __add__(self, other):
        v, c = self._other(other)
        if isinstance(other, ScalarField):
            coeffs = None if self.coeffs is None or c is None else self.coeffs + c
            return ScalarField(self.grid, self.values + v, coeffs)
        return ScalarField.from_values(self.grid, self.values + v)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-1.0) * other

    def __mul__(self, scalar):
        if isinstance(scalar, ScalarField):
            v, _ = self._other(scalar)
            return ScalarField.from_values(self.grid, self.values * v)
        s = float(scalar)
        return ScalarField(self.grid, s * self.values, None if self.coeffs is None else s * self.coeffs)

    __rmul__ = __mul__

    def __neg__(self):
        return -1.0 * self

    def integral(self) -> float:
        return self.grid.integrate(self.values)

    def gradient(self, method: str = "auto") -> np.ndarray:
        """Tangential gradient at the nodes.

        Spectral when coefficients are present, finite differences otherwise
        (or when ``method="fd"``).
        """
        if method == "fd" or (method == "auto" and self.coeffs is None):
            return self.grid.finite_difference_gradient(self.values)
        if self.coeffs is None:
            raise GridError("spectral gradient requested for a field without coefficients")
        return self.grid.gradient(self.coeffs)

    def laplacian(self) -> "ScalarField":
        coeffs = self.coeffs if self.coeffs is not None else self.grid.analyze(self.values)
        return ScalarField.from_coeffs(self.grid, self.grid.laplacian_coeffs(coeffs))

    def sup(self) -> float:
        return float(np.max(np.abs(self.values)))


def divergence(grid: SphereGrid, vectors: np.ndarray) -> ScalarField:
    """Divergence of a tangent vector field given at the nodes."""
    return ScalarField.from_coeffs(grid, grid.weak_divergence(vectors))


def norm(u: ScalarField, kind: str, p: float | None = None, alpha: float | None = None) -> float:
    """Norms of a field on S^n.

    ``kind`` is one of ``L1``, ``L2``, ``Lp`` (needs ``p``), ``C0``/``sup``,
    ``C1``, ``W11``, ``W12``, ``holder`` (seminorm of the values) and
    ``C1alpha`` (``C1`` plus the Hoelder seminorm of the gradient).  Hoelder
    seminorms use the largest difference quotient between adjacent nodes.
    """
    grid, v = u.grid, u.values
    kind = kind.lower()
    if kind == "l1":
        return grid.integrate(np.abs(v))
    if kind == "l2":
        return math.sqrt(grid.integrate(v * v))
    if kind == "lp":
        if p is None or p < 1:
            raise ValueError("Lp norm needs p >= 1")
        return grid.integrate(np.abs(v) ** p) ** (1.0 / p)
    if kind in ("c0", "sup"):
        return float(np.max(np.abs(v)))
    grad = u.gradient()
    gnorm = np.linalg.norm(grad, axis=1)
    if kind == "c1":
        return float(np.max(np.abs(v)) + np.max(gnorm))
    if kind == "w11":
        return grid.integrate(np.abs(v)) + grid.integrate(gnorm)
    if kind == "w12":
        return math.sqrt(grid.integrate(v * v) + grid.integrate(gnorm**2))
    if kind in ("holder", "c1alpha"):
        if alpha is None or not 0 < alpha <= 1:
            raise ValueError("Hoelder norms need 0 < alpha <= 1")
        i, j, dist = grid.neighbor_pairs()
        if kind == "holder":
            return float(np.max(np.abs(v[i] - v[j]) / dist**alpha))
        jump = np.linalg.norm(grad[i] - grad[j], axis=1)
        return float(np.max(np.abs(v)) + np.max(gnorm) + np.max(jump / dist**alpha))
    raise ValueError(f"unknown norm {kind!r}")
