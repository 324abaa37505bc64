"""A one-parameter family of dimpled balls with mean curvature at most n.

The unit ball is pushed in near the north pole: on ``r0 <= r <= 1`` the
upper boundary is the sphere ``phi0(r) = sqrt(1 - r^2)``; on
``r1 <= r <= r0`` it is ``phi0 - t h`` where ``h`` solves a linear ODE that
keeps the mean curvature below ``n (1 + t)``; inside ``r1`` a spherical
bowl closes the dimple with matching slope.  Scaling by ``1 + t`` then
gives a set whose mean curvature is at most ``n`` while its sup-distance
to the unit sphere decays only like a power of ``t`` (or ``t log(1/t)``
in dimension two).

All functionals are evaluated on the profile itself with adaptive
quadrature and written in cancellation-free form, so the family can be
pushed to very small ``t``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import mpmath
import numpy as np
from scipy import integrate

from .axisym import AxisymProfile, graph_profile
from .sphere_core import ScalarField, SphereGrid, polar_angles, sphere_area


class WindowError(ValueError):
    """Parameters outside the admissible window."""


@dataclass(frozen=True)
class SharpParams:
    n: int
    K: float
    r0: float
    sigma: float
    t: float

    def __post_init__(self):
        n, K, r0, sigma, t = self.n, self.K, self.r0, self.sigma, self.t
        if n < 2:
            raise WindowError("the dimple family needs n >= 2")
        if not (t > 0 and r0 > 0 and K > 0):
            raise WindowError("t, r0 and K must be positive")
        if not t / r0 < sigma:
            raise WindowError(f"need t / r0 < sigma (t / r0 = {t / r0:.3e}, sigma = {sigma:.3e})")
        if not sigma < 1.0 / K**2:
            raise WindowError(f"need sigma < 1 / K^2 = {1.0 / K**2:.3e}")
        if not r0 < 1.0 / K:
            raise WindowError(f"need r0 < 1 / K = {1.0 / K:.3e}")

    @property
    def r1(self) -> float:
        n = self.n
        return (self.t / self.sigma) ** (1.0 / (n - 1)) * self.r0 ** (n / (n - 1))

    def as_dict(self) -> dict:
        return {"n": self.n, "K": self.K, "r0": self.r0, "sigma": self.sigma, "t": self.t, "r1": self.r1}


# ---------------------------------------------------------------------------
# the correction profile h
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class HProfile:
    """Correction ``h`` on ``[r1, r0]`` with ``h(r0) = h'(r0) = 0``.

    ``h'`` is the closed-form solution of
    ``(1-r^2)^{3/2} h'' + h' (-3 r sqrt(1-r^2) + (n-1)(1-r^2)^{3/2} / r) = rhs(r)``
    with ``rhs = n - (n+5) t K^2 r0^{2n} / r^{2n-2} - (n+1) t^2 K^3 r0^{3n} / r^{3n-2}``;
    ``h`` itself is its adaptive-quadrature integral.
    """

    params: SharpParams

    def source(self, r):
        """The integrating-factor right-hand side ``r^{n-1} rhs(r)``."""
        p = self.params
        n, t, K, r0 = p.n, p.t, p.K, p.r0
        return (n * r ** (n - 1) - (n + 5) * t * K**2 * r0 ** (2 * n) * r ** (1 - n)
                - (n + 1) * t**2 * K**3 * r0 ** (3 * n) * r ** (1 - 2 * n))

    def primitive(self, r):
        """``F(r) = int_r^{r0} source``, so that ``r^{n-1} (1-r^2)^{3/2} h' = -F``."""
        p = self.params
        n, t, K, r0 = p.n, p.t, p.K, p.r0
        r = np.asarray(r, dtype=float)
        third = (n + 1) / (2 * n - 2) * t**2 * K**3 * (r0 ** (3 * n) * r ** (2 - 2 * n) - r0 ** (n + 2))
        if n == 2:
            second = 7 * t * K**2 * r0**4 * np.log(r0 / r)
        else:
            second = (n + 5) / (n - 2) * t * K**2 * (r0 ** (2 * n) * r ** (2 - n) - r0 ** (n + 2))
        return r0**n - r**n - second - third

    def dh(self, r):
        r = np.asarray(r, dtype=float)
        n = self.params.n
        return -(1 - r * r) ** -1.5 * r ** (1 - n) * self.primitive(r)

    def d2h(self, r):
        r = np.asarray(r, dtype=float)
        n = self.params.n
        weight = (1 - r * r) ** -1.5 * r ** (1 - n)
        log_slope = 3 * r / (1 - r * r) + (1 - n) / r
        return -weight * (self.primitive(r) * log_slope - self.source(r))

    def h(self, r: float) -> float:
        r0 = self.params.r0
        if r >= r0:
            return 0.0
        # integrate -h' in log(r) to cope with the r^{1-n} growth near r1; next to r0 the
        # closed form for h' is a cancelling difference, so floor the error at its roundoff
        noise = 1e-15 * r0 * (r0 - r)
        val, _ = integrate.quad(lambda x: -float(self.dh(math.exp(x))) * math.exp(x),
                                math.log(r), math.log(r0), epsabs=noise, epsrel=1e-13, limit=400)
        return val

    # exact-arithmetic versions for the curvature check
    def dh_mp(self, r):
        p = self.params
        n, t, K, r0 = p.n, mpmath.mpf(p.t), mpmath.mpf(p.K), mpmath.mpf(p.r0)
        third = mpmath.mpf(n + 1) / (2 * n - 2) * t**2 * K**3 * (r0 ** (3 * n) * r ** (2 - 2 * n) - r0 ** (n + 2))
        if n == 2:
            second = 7 * t * K**2 * r0**4 * mpmath.log(r0 / r)
        else:
            second = mpmath.mpf(n + 5) / (n - 2) * t * K**2 * (r0 ** (2 * n) * r ** (2 - n) - r0 ** (n + 2))
        prim = r0**n - r**n - second - third
        src = (n * r ** (n - 1) - (n + 5) * t * K**2 * r0 ** (2 * n) * r ** (1 - n)
               - (n + 1) * t**2 * K**3 * r0 ** (3 * n) * r ** (1 - 2 * n))
        weight = (1 - r * r) ** mpmath.mpf(-1.5) * r ** (1 - n)
        d1 = -weight * prim
        d2 = -weight * (prim * (3 * r / (1 - r * r) + mpmath.mpf(1 - n) / r) - src)
        return d1, d2


def build_h(params: SharpParams) -> HProfile:
    return HProfile(params)


@dataclass(frozen=True)
class HValidation:
    checks: dict
    worst: dict

    @property
    def ok(self) -> bool:
        return all(self.checks[k] for k in REQUIRED_CHECKS)

    def as_dict(self) -> dict:
        return {"ok": self.ok, "checks": dict(self.checks), "worst": dict(self.worst)}


REQUIRED_CHECKS = ("slope_at_r1", "slope_small", "slope_bounds", "convexity", "curvature", "curvature_exact")


def curvature_excess_mp(hp: HProfile, radii, dps: int = 40) -> float:
    """``max (H - n (1+t))`` over ``radii`` in ``(r1, r0)``, in extended precision."""
    p = hp.params
    worst = -mpmath.inf
    with mpmath.workdps(dps):
        t = mpmath.mpf(p.t)
        bound = p.n * (1 + t)
        for rr in radii:
            r = mpmath.mpf(float(rr))
            d1, d2 = hp.dh_mp(r)
            root = mpmath.sqrt(1 - r * r)
            slope = -r / root - t * d1
            curv = -1 / root**3 - t * d2
            g = 1 + slope * slope
            h_val = -curv / g ** mpmath.mpf(1.5) - (p.n - 1) * slope / (r * mpmath.sqrt(g))
            worst = max(worst, h_val - bound)
        return float(worst)


def profile_curvature(params: SharpParams, hp: HProfile, r) -> np.ndarray:
    """Mean curvature of the upper boundary ``z = phi(r)`` on ``[r1, r0]``."""
    t, n = params.t, params.n
    r = np.asarray(r, dtype=float)
    root = np.sqrt(1 - r * r)
    slope = -r / root - t * hp.dh(r)
    curv = -1 / root**3 - t * hp.d2h(r)
    g = 1 + slope * slope
    return -curv / g**1.5 - (n - 1) * slope / (r * np.sqrt(g))


def validate_h(hp: HProfile, samples: int = 10000, exact_samples: int = 10000) -> HValidation:
    """Check the slope, convexity and curvature properties of ``h``."""
    p = hp.params
    n, t, K, r0, r1, sigma = p.n, p.t, p.K, p.r0, p.r1, p.sigma
    r = np.geomspace(r1, r0, samples + 2)[1:-1]
    d1, d2 = hp.dh(r), hp.d2h(r)
    slope_r1 = abs(float(hp.dh(r1)))
    upper = -(1 - r / r0) * r0**n / (2 * r ** (n - 1))
    lower = -(1 - r * r) ** -1.5 * r0**n / r ** (n - 1)
    curvature = profile_curvature(p, hp, r) - n * (1 + t)
    scale = n * (1 + t)
    exact_r = np.geomspace(r1, r0, exact_samples + 2)[1:-1]
    exact = curvature_excess_mp(hp, exact_r)
    h_r1 = hp.h(r1)
    checks = {
        "slope_at_r1": t * slope_r1 <= 1.0 / K,
        "slope_small": t * float(np.max(np.abs(d1))) <= 3 * sigma,
        "slope_bounds": bool(np.all(lower <= d1 * (1 + 1e-12)) and np.all(d1 < upper)),
        "convexity": bool(np.all(d2 > 0) and np.all(d2 <= K * r0**n / r**n)),
        "curvature": float(np.max(curvature)) <= 1e-12 * scale,
        "curvature_exact": exact <= 0.0,
        "h_nonnegative": h_r1 >= 0.0 and bool(np.all(d1 <= 0)),
        "h_at_most_one": h_r1 <= 1.0,
    }
    worst = {
        "t_slope_r1": t * slope_r1,
        "slope_bound_1_over_K": 1.0 / K,
        "three_sigma": 3 * sigma,
        "lower_slack": float(np.min(d1 - lower)),
        "upper_slack": float(np.min(upper - d1)),
        "convexity_ratio": float(np.max(d2 * r**n / (K * r0**n))),
        "min_d2h": float(np.min(d2)),
        "curvature_excess_float": float(np.max(curvature)),
        "curvature_excess_exact": exact,
        "h_r1": h_r1,
    }
    return HValidation(checks, worst)


# ---------------------------------------------------------------------------
# the dimpled set
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SharpFamilySet:
    """``Omega_t = (1 + t) Omega*`` with cancellation-free functionals."""

    params: SharpParams
    hp: HProfile
    h_r1: float
    mu: float
    validation: HValidation | None = None
    _cache: dict = field(default_factory=dict, repr=False)

    # -- profile of Omega* -------------------------------------------------
    @property
    def bowl_radius(self) -> float:
        r1, mu = self.params.r1, self.mu
        return r1 * math.sqrt(1 + 1 / mu**2)

    def _bowl_offset(self, r):
        """``r1/mu - sqrt(rho^2 - r^2)`` written without cancellation."""
        r1, mu = self.params.r1, self.mu
        rho2 = self.bowl_radius**2
        return (r * r - r1 * r1) / (r1 / mu + np.sqrt(rho2 - r * r))

    def phi(self, r):
        p = self.params
        r = np.asarray(r, dtype=float)
        phi0 = np.sqrt(1 - r * r)
        out = phi0.copy()
        mid = (r >= p.r1) & (r < p.r0)
        out[mid] = phi0[mid] - p.t * np.array([self.hp.h(x) for x in r[mid]])
        cap = r < p.r1
        out[cap] = math.sqrt(1 - p.r1**2) - p.t * self.h_r1 + self._bowl_offset(r[cap])
        return out

    def dphi(self, r):
        p = self.params
        r = np.asarray(r, dtype=float)
        out = -r / np.sqrt(1 - r * r)
        mid = (r >= p.r1) & (r < p.r0)
        out[mid] -= p.t * self.hp.dh(r[mid])
        cap = r < p.r1
        out[cap] = r[cap] / np.sqrt(self.bowl_radius**2 - r[cap] ** 2)
        return out

    def d2phi(self, r):
        p = self.params
        r = np.asarray(r, dtype=float)
        out = -(1 - r * r) ** -1.5
        mid = (r >= p.r1) & (r < p.r0)
        out[mid] -= p.t * self.hp.d2h(r[mid])
        cap = r < p.r1
        rho2 = self.bowl_radius**2
        out[cap] = rho2 / (rho2 - r[cap] ** 2) ** 1.5
        return out

    def profile(self) -> AxisymProfile:
        """Upper boundary of ``Omega*`` as a graph over ``[0, r0]``."""
        p = self.params
        return graph_profile(p.n, self.phi, self.dphi, self.d2phi, p.r0, (p.r1,), "dimple")

    # -- radial description of Omega_t ----------------------------------------
    def _radial_pieces(self, r: float):
        """``(q, dq)`` with ``|point|^2 = 1 + q`` and ``dq = d/dr |point|^2 / 2``."""
        p = self.params
        t = p.t
        if r >= p.r0:
            return 0.0, 0.0
        if r >= p.r1:
            h = self.hp.h(r)
            dh = float(self.hp.dh(r))
            phi0 = math.sqrt(1 - r * r)
            dphi0 = -r / phi0
            q = -2 * t * phi0 * h + t * t * h * h
            dq = -t * (h * dphi0 + phi0 * dh) + t * t * h * dh
            return q, dq
        r1 = p.r1
        extra = -t * self.h_r1 + float(self._bowl_offset(np.array([r]))[0])
        base = math.sqrt(1 - r1 * r1)
        q = (r * r - r1 * r1) + 2 * base * extra + extra * extra
        phi = base + extra
        slope = r / math.sqrt(self.bowl_radius**2 - r * r)
        return q, r + phi * slope

    def u_at(self, r: float) -> float:
        """Normal-graph height ``u`` in the direction of the profile point at ``r``."""
        t = self.params.t
        q, _ = self._radial_pieces(r)
        return t + (1 + t) * math.expm1(0.5 * math.log1p(q))

    # -- functionals ---------------------------------------------------------
    def _integrate(self, func, log_annulus=True) -> float:
        p = self.params
        total, _ = integrate.quad(func, 0.0, p.r1, epsabs=0.0, epsrel=1e-12, limit=400)
        if log_annulus:
            val, _ = integrate.quad(lambda x: func(math.exp(x)) * math.exp(x),
                                    math.log(p.r1), math.log(p.r0), epsabs=0.0, epsrel=1e-12, limit=400)
        else:
            val, _ = integrate.quad(func, p.r1, p.r0, epsabs=0.0, epsrel=1e-12, limit=400)
        return total + val

    def star_perimeter_excess(self) -> float:
        """``P(Omega*) - P(B_1)``."""
        if "dp" in self._cache:
            return self._cache["dp"]
        p = self.params
        n, t = p.n, p.t
        omega = sphere_area(n - 1)

        def integrand(r):
            phi0_slope = -r / math.sqrt(1 - r * r)
            if r >= p.r1:
                diff = -t * float(self.hp.dh(r))
                slope = phi0_slope + diff
                gap = diff * (slope + phi0_slope) / (math.sqrt(1 + slope**2) + math.sqrt(1 + phi0_slope**2))
            else:
                slope = r / math.sqrt(self.bowl_radius**2 - r * r)
                gap = math.sqrt(1 + slope**2) - math.sqrt(1 + phi0_slope**2)
            return gap * r ** (n - 1)

        self._cache["dp"] = omega * self._integrate(integrand)
        return self._cache["dp"]

    def delta(self) -> float:
        n, t = self.params.n, self.params.t
        dp = self.star_perimeter_excess()
        return math.expm1(n * math.log1p(t)) * (sphere_area(n) + dp) + dp

    def u_sup(self) -> float:
        t = self.params.t
        return max(t, -self.u_at(0.0))

    def u_plus_sup(self) -> float:
        return self.params.t

    def _sphere_integrals(self) -> dict:
        """Integrals over S^n of |u|, u, u^2, |grad u| and |grad u|^2."""
        if "sphere" in self._cache:
            return self._cache["sphere"]
        p = self.params
        n, t = p.n, p.t
        omega = sphere_area(n - 1)
        theta0 = math.asin(p.r0)
        cap_area = omega * integrate.quad(lambda s: math.sin(s) ** (n - 1), 0.0, theta0,
                                          epsabs=0.0, epsrel=1e-13)[0]
        outside = sphere_area(n) - cap_area

        def pieces(r):
            q, dq = self._radial_pieces(r)
            phi = float(self.phi(np.array([r]))[0])
            slope = float(self.dphi(np.array([r]))[0])
            norm2 = r * r + phi * phi
            sin_theta = r / math.sqrt(norm2)
            dtheta = (phi - r * slope) / norm2
            u = t + (1 + t) * math.expm1(0.5 * math.log1p(q))
            drho = (1 + t) * dq / math.sqrt(norm2)
            jac = sin_theta ** (n - 1)
            grad = abs(drho) / dtheta
            return u, grad, jac, dtheta

        out = {}
        specs = {
            "abs_u": lambda u, g: abs(u),
            "u": lambda u, g: u,
            "u2": lambda u, g: u * u,
            "grad": lambda u, g: g,
            "grad2": lambda u, g: g * g,
        }
        for key, fn in specs.items():
            def integrand(r, fn=fn):
                u, g, jac, dtheta = pieces(r)
                return fn(u, g) * jac * dtheta
            out[key] = omega * self._integrate(integrand)
        def symdiff(r):
            u, g, jac, dtheta = pieces(r)
            return abs(math.expm1((n + 1) * math.log1p(u))) * jac * dtheta
        out["symdiff"] = omega * self._integrate(symdiff) / (n + 1)
        out["symdiff"] += math.expm1((n + 1) * math.log1p(t)) * outside / (n + 1)
        out["abs_u"] += t * outside
        out["u"] += t * outside
        out["u2"] += t * t * outside
        self._cache["sphere"] = out
        return out

    def u_l1(self) -> float:
        return self._sphere_integrals()["abs_u"]

    def u_mean_integral(self) -> float:
        return self._sphere_integrals()["u"]

    def u_w11(self) -> float:
        s = self._sphere_integrals()
        return s["abs_u"] + s["grad"]

    def u_w12(self) -> float:
        s = self._sphere_integrals()
        return math.sqrt(s["u2"] + s["grad2"])

    def symmetric_difference(self) -> float:
        """``|Omega_t symdiff B_1|`` with both sets centered at the origin."""
        return self._sphere_integrals()["symdiff"]

    def barycenter_offset(self) -> float:
        """Polar component of ``int_{boundary} y`` (the other components vanish)."""
        if "bary" in self._cache:
            return self._cache["bary"]
        p = self.params
        n, t = p.n, p.t

        def integrand(r):
            phi0 = math.sqrt(1 - r * r)
            phi0_slope = -r / phi0
            if r >= p.r1:
                diff = -t * float(self.hp.dh(r))
                slope = phi0_slope + diff
                gap = diff * (slope + phi0_slope) / (math.sqrt(1 + slope**2) + math.sqrt(1 + phi0_slope**2))
                lift = -t * self.hp.h(r)
            else:
                slope = r / math.sqrt(self.bowl_radius**2 - r * r)
                gap = math.sqrt(1 + slope**2) - math.sqrt(1 + phi0_slope**2)
                lift = float(self.phi(np.array([r]))[0]) - phi0
            # phi0 sqrt(1 + phi0'^2) = 1 on the sphere
            return (lift * math.sqrt(1 + slope**2) + phi0 * gap) * r ** (n - 1)

        val = math.exp((n + 1) * math.log1p(t)) * sphere_area(n - 1) * self._integrate(integrand)
        self._cache["bary"] = val
        return val

    def diagnostics(self) -> dict:
        p = self.params
        approx = p.sigma - (p.n + 1) / (2 * p.n - 2) * p.K**3 * p.sigma**3
        return {"mu": self.mu, "mu_expansion": approx, "bowl_radius": self.bowl_radius,
                "h_r1": self.h_r1, "r1": p.r1}

    def functionals(self) -> dict:
        return {
            "delta": self.delta(),
            "star_perimeter_excess": self.star_perimeter_excess(),
            "u_sup": self.u_sup(),
            "u_plus_sup": self.u_plus_sup(),
            "u_l1": self.u_l1(),
            "u_integral": self.u_mean_integral(),
            "u_w11": self.u_w11(),
            "u_w12": self.u_w12(),
        }

    # -- sampling on a grid ----------------------------------------------------
    def to_graph(self, grid: SphereGrid) -> ScalarField:
        """Sample ``u`` at the nodes of an axisymmetric grid."""
        from scipy.optimize import brentq

        if grid.mode != "axisym" or grid.dim != self.params.n:
            raise ValueError("sampling needs an axisymmetric grid of matching dimension")
        p = self.params
        theta0 = math.asin(p.r0)

        def polar(r):
            return math.atan2(r, float(self.phi(np.array([r]))[0]))

        values = np.full(grid.size, p.t)
        for i, th in enumerate(polar_angles(grid)):
            if th < theta0:
                r = brentq(lambda x: polar(x) - th, 0.0, p.r0, xtol=1e-15)
                values[i] = self.u_at(r)
        return ScalarField.from_values(grid, values)


def build_set(params: SharpParams, validate: bool = True, samples: int = 10000) -> SharpFamilySet:
    hp = build_h(params)
    r1 = params.r1
    h_r1 = hp.h(r1)
    mu = -r1 / math.sqrt(1 - r1 * r1) - params.t * float(hp.dh(r1))
    if mu <= 0:
        raise WindowError("bowl slope at r1 is not positive; dimple cannot be closed")
    report = validate_h(hp, samples, samples) if validate else None
    return SharpFamilySet(params, hp, h_r1, mu, report)


def auto_K(n: int, r0: float, sigma: float, t: float, start: float = 16.0, samples: int = 10000):
    """Smallest ``K = start * 2^j`` for which the profile checks pass."""
    K = start
    last_error = None
    while True:
        try:
            params = SharpParams(n, K, r0, sigma, t)
        except WindowError as exc:
            raise WindowError(f"no admissible K found (stopped at K = {K:g}: {exc})") from last_error
        report = validate_h(build_h(params), samples, samples)
        if report.ok:
            return K, report
        last_error = RuntimeError(str(report.as_dict()))
        K *= 2


def t_decades(spec: str) -> np.ndarray:
    """Parse ``lo:hi:count`` into log-spaced values."""
    try:
        lo, hi, count = spec.split(":")
        lo, hi, count = float(lo), float(hi), int(count)
    except ValueError as exc:
        raise ValueError(f"bad decade spec {spec!r}; expected lo:hi:count") from exc
    if not 0 < lo < hi or count < 2:
        raise ValueError("decade spec needs 0 < lo < hi and count >= 2")
    return np.geomspace(lo, hi, count)


@dataclass(frozen=True)
class SweepRow:
    t: float
    delta: float
    u_sup: float
    u_w11: float
    u_plus: float
    valid: bool

    def as_dict(self) -> dict:
        return {"t": self.t, "delta": self.delta, "u_sup": self.u_sup,
                "u_w11": self.u_w11, "u_plus": self.u_plus, "valid": self.valid}


def sweep(n: int, K: float, r0: float, sigma: float, ts, samples: int = 10000) -> list[SweepRow]:
    rows = []
    for t in ts:
        s = build_set(SharpParams(n, K, r0, sigma, float(t)), samples=samples)
        rows.append(SweepRow(float(t), s.delta(), s.u_sup(), s.u_w11(), s.u_plus_sup(), s.validation.ok))
    return rows


def loglog_slope(xs, ys) -> float:
    slope, _ = np.polyfit(np.log(np.asarray(xs)), np.log(np.asarray(ys)), 1)
    return float(slope)
