"""Surfaces of revolution, planar regions, convex envelopes and the
perimeter-deficit splitting over the envelope.

A rotationally symmetric hypersurface in R^{n+1} is stored through its
meridian ``tau -> (r(tau), z(tau))`` running from the north pole to the
south pole.  Reflecting the meridian across the axis gives a closed planar
curve; convex envelopes of the solid of revolution are revolutions of the
planar envelope of that curve, so the envelope machinery below works on
closed planar curves only and the revolution enters through measure and
curvature weights.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import integrate, optimize

from .sphere_core import sphere_area

Evaluator = Callable[[np.ndarray], tuple]


class ProfileError(ValueError):
    """Malformed or unsupported profile."""


def _lower_sphere_area(n: int) -> float:
    """Measure of S^{n-1}; the 'sphere' S^0 is two points."""
    return 2.0 if n == 1 else sphere_area(n - 1)


# ---------------------------------------------------------------------------
# meridian profiles
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class AxisymProfile:
    """Meridian of a hypersurface of revolution about the ``e_{n+1}`` axis.

    ``evaluate(tau)`` returns ``(r, z, r', z', r'', z'')``.  For closed
    profiles tau runs over ``tau_range`` from the north pole (r = 0) to the
    south pole.  Graph profiles describe ``z = phi(r)`` with ``tau = r``.
    """

    n: int
    evaluate: Evaluator = field(repr=False)
    tau_range: tuple[float, float]
    closed: bool = True
    breakpoints: tuple[float, ...] = ()
    label: str = "profile"

    def sample(self, count: int) -> np.ndarray:
        a, b = self.tau_range
        return np.linspace(a, b, count)

    def scaled(self, factor: float) -> "AxisymProfile":
        f = float(factor)

        def evaluate(tau):
            return tuple(f * q for q in self.evaluate(tau))

        return AxisymProfile(self.n, evaluate, self.tau_range, self.closed, self.breakpoints,
                             f"{self.label}*{f:g}")

    def pieces(self) -> list[tuple[float, float]]:
        a, b = self.tau_range
        cuts = [a] + sorted(t for t in self.breakpoints if a < t < b) + [b]
        return list(zip(cuts[:-1], cuts[1:]))


def radial_profile(n: int, rho, drho, d2rho, label: str = "radial") -> AxisymProfile:
    """Star-shaped closed profile with polar radius ``rho(theta)``."""

    def evaluate(theta):
        theta = np.asarray(theta, dtype=float)
        s, c = np.sin(theta), np.cos(theta)
        p, dp, ddp = rho(theta), drho(theta), d2rho(theta)
        r = p * s
        z = p * c
        dr = dp * s + p * c
        dz = dp * c - p * s
        ddr = ddp * s + 2 * dp * c - p * s
        ddz = ddp * c - 2 * dp * s - p * c
        return r, z, dr, dz, ddr, ddz

    return AxisymProfile(n, evaluate, (0.0, math.pi), True, (), label)


def sphere_profile(n: int, radius: float = 1.0) -> AxisymProfile:
    radius = float(radius)
    if radius <= 0:
        raise ProfileError("sphere radius must be positive")
    return radial_profile(n, lambda t: radius + 0 * t, lambda t: 0 * t, lambda t: 0 * t,
                          f"sphere_radius({radius:g})")


def dented_sphere(n: int, depth: float, width: float) -> AxisymProfile:
    """Unit sphere with a smooth polar dent ``1 - depth exp(-(1 - cos theta) / width^2)``."""
    depth, width = float(depth), float(width)
    if not 0 < depth < 0.9 or width <= 0:
        raise ProfileError("dent needs 0 < depth < 0.9 and width > 0")
    w2 = width * width

    def bump(t):
        return np.exp(-(1 - np.cos(t)) / w2)

    def rho(t):
        return 1 - depth * bump(t)

    def drho(t):
        return depth * bump(t) * np.sin(t) / w2

    def d2rho(t):
        q1 = np.sin(t) / w2
        return depth * bump(t) * (np.cos(t) / w2 - q1 * q1)

    return radial_profile(n, rho, drho, d2rho, f"dented_sphere({depth:g},{width:g})")


def graph_profile(n: int, phi, dphi, d2phi, r_max: float, breakpoints=(), label="graph") -> AxisymProfile:
    """Open profile ``z = phi(r)`` for ``0 <= r <= r_max``."""

    def evaluate(r):
        r = np.asarray(r, dtype=float)
        return r, phi(r), np.ones_like(r), dphi(r), np.zeros_like(r), d2phi(r)

    return AxisymProfile(n, evaluate, (0.0, float(r_max)), False, tuple(breakpoints), label)


def sampled_profile(n: int, r, z, label: str = "samples") -> AxisymProfile:
    """Closed profile from meridian samples equally spaced in the parameter.

    The first and last samples must lie on the axis.  The samples are
    reflected across the axis and interpolated by a trigonometric series.
    """
    r = np.asarray(r, dtype=float)
    z = np.asarray(z, dtype=float)
    if r.ndim != 1 or r.shape != z.shape or r.size < 9:
        raise ProfileError("profile needs matching 1-D arrays with at least 9 samples")
    if abs(r[0]) > 1e-12 or abs(r[-1]) > 1e-12 or np.any(r[1:-1] <= 0):
        raise ProfileError("meridian must start and end on the axis with r > 0 between")
    full_r = np.concatenate([r, -r[-2:0:-1]])
    full_z = np.concatenate([z, z[-2:0:-1]])
    curve = fourier_curve(full_r, full_z)

    def evaluate(tau):
        return curve.evaluate(np.asarray(tau, dtype=float))

    return AxisymProfile(n, evaluate, (0.0, math.pi), True, (), label)


_REGISTRY_PATTERN = re.compile(r"^\s*([a-z_]+)\s*(?:\((.*)\))?\s*$")


def registry_profile(n: int, name: str) -> AxisymProfile:
    """Profiles by name: ``sphere``, ``sphere_radius(r)``, ``dented_sphere(depth,width)``."""
    match = _REGISTRY_PATTERN.match(name)
    if not match:
        raise ProfileError(f"cannot parse profile name {name!r}")
    key, args = match.group(1), match.group(2)
    try:
        values = [float(a) for a in args.split(",")] if args else []
    except ValueError as exc:
        raise ProfileError(f"bad profile arguments in {name!r}") from exc
    if key == "sphere" and not values:
        return sphere_profile(n)
    if key == "sphere_radius" and len(values) == 1:
        return sphere_profile(n, values[0])
    if key == "dented_sphere" and len(values) == 2:
        return dented_sphere(n, *values)
    raise ProfileError(f"unknown profile {name!r}")


# ---------------------------------------------------------------------------
# curvature and integrals of profiles
# ---------------------------------------------------------------------------

def _principal(n, r, z, dr, dz, ddr, ddz):
    speed = np.hypot(dr, dz)
    k_meridian = (dz * ddr - dr * ddz) / speed**3
    with np.errstate(divide="ignore", invalid="ignore"):
        k_parallel = np.where(np.abs(r) > 1e-12, -dz / (speed * r), k_meridian)
    return k_meridian, k_parallel, speed


def revolution_mean_curvature(profile: AxisymProfile, tau) -> np.ndarray:
    """Mean curvature (sum of principal curvatures, outer normal) at parameters ``tau``."""
    k1, k2, _ = _principal(profile.n, *profile.evaluate(np.asarray(tau, dtype=float)))
    return k1 + (profile.n - 1) * k2


def revolution_gauss_curvature(profile: AxisymProfile, tau) -> np.ndarray:
    k1, k2, _ = _principal(profile.n, *profile.evaluate(np.asarray(tau, dtype=float)))
    return k1 * k2 ** (profile.n - 1)


def _quad(f, profile: AxisymProfile) -> tuple[float, float]:
    total, err = 0.0, 0.0
    for a, b in profile.pieces():
        val, e = integrate.quad(lambda t: float(f(np.array([t]))[0]), a, b,
                                epsabs=0.0, epsrel=1e-13, limit=400)
        total += val
        err += e
    return total, err


@dataclass(frozen=True)
class RevolutionFunctionals:
    perimeter: float
    volume: float | None
    diameter: float | None
    error_estimate: float


def revolution_functionals(profile: AxisymProfile, diameter_samples: int = 1500) -> RevolutionFunctionals:
    n = profile.n
    omega = _lower_sphere_area(n)

    def area_density(t):
        r, z, dr, dz, *_ = profile.evaluate(t)
        return omega * np.abs(r) ** (n - 1) * np.hypot(dr, dz)

    per, err = _quad(area_density, profile)
    if not profile.closed:
        return RevolutionFunctionals(per, None, None, err)

    def volume_density(t):
        r, z, dr, dz, *_ = profile.evaluate(t)
        return omega / n * np.abs(r) ** n * (-dz)

    vol, err_v = _quad(volume_density, profile)
    r, z, *_ = profile.evaluate(profile.sample(diameter_samples))
    # a point at radius r_a and one at r_b on the opposite side of the axis
    diam = float(np.sqrt(np.max((r[:, None] + r[None, :]) ** 2 + (z[:, None] - z[None, :]) ** 2)))
    return RevolutionFunctionals(per, vol, diam, err + err_v)


def sup_mean_curvature(profile: AxisymProfile, samples: int = 20001) -> float:
    tau = profile.sample(samples)
    h = revolution_mean_curvature(profile, tau)
    k = int(np.argmax(h))
    lo, hi = tau[max(k - 1, 0)], tau[min(k + 1, tau.size - 1)]
    res = optimize.minimize_scalar(lambda t: -revolution_mean_curvature(profile, np.array([t]))[0],
                                   bounds=(lo, hi), method="bounded", options={"xatol": 1e-13})
    return max(float(h[k]), float(-res.fun))


def enforce_profile_curvature(profile: AxisymProfile) -> tuple[AxisymProfile, float]:
    """Scale a closed profile so that its mean curvature stays below ``n``."""
    scale = max(sup_mean_curvature(profile) / profile.n, 1.0)
    return (profile if scale == 1.0 else profile.scaled(scale)), scale


# ---------------------------------------------------------------------------
# closed planar curves
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ClosedCurve:
    """Closed planar curve ``tau -> (x, y)`` with period ``2 pi``.

    ``evaluate`` returns ``(x, y, x', y', x'', y'')``.
    """

    evaluate: Evaluator = field(repr=False)
    label: str = "curve"

    def points(self, count: int) -> tuple[np.ndarray, np.ndarray]:
        tau = 2 * np.pi * np.arange(count) / count
        x, y, *_ = self.evaluate(tau)
        return x, y

    def length(self, count: int = 4096) -> float:
        tau = 2 * np.pi * np.arange(count) / count
        _, _, dx, dy, *_ = self.evaluate(tau)
        return float(np.sum(np.hypot(dx, dy)) * 2 * np.pi / count)

    def signed_area(self, count: int = 4096) -> float:
        tau = 2 * np.pi * np.arange(count) / count
        x, y, dx, dy, *_ = self.evaluate(tau)
        return float(0.5 * np.sum(x * dy - y * dx) * 2 * np.pi / count)

    def reversed(self) -> "ClosedCurve":
        def evaluate(tau):
            x, y, dx, dy, ddx, ddy = self.evaluate(-np.asarray(tau, dtype=float))
            return x, y, -dx, -dy, ddx, ddy

        return ClosedCurve(evaluate, self.label)

    def counterclockwise(self) -> "ClosedCurve":
        return self if self.signed_area(512) > 0 else self.reversed()


def circle(radius: float, center=(0.0, 0.0)) -> ClosedCurve:
    radius = float(radius)
    cx, cy = (float(c) for c in center)

    def evaluate(tau):
        tau = np.asarray(tau, dtype=float)
        c, s = np.cos(tau), np.sin(tau)
        return cx + radius * c, cy + radius * s, -radius * s, radius * c, -radius * c, -radius * s

    return ClosedCurve(evaluate, f"circle({radius:g})")


def fourier_curve(x, y, label: str = "samples") -> ClosedCurve:
    """Trigonometric interpolant through samples equally spaced in the parameter."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    m = x.size
    if m < 8 or y.shape != x.shape:
        raise ProfileError("closed curves need at least 8 matching samples")
    coef = np.fft.fft(x + 1j * y) / m
    k = np.fft.fftfreq(m, 1.0 / m)
    if m % 2 == 0:
        # split the Nyquist term symmetrically so the interpolant is real-consistent
        nyq = m // 2
        coef = np.append(coef, coef[nyq] / 2)
        coef[nyq] /= 2
        k = np.append(k, nyq)
        k[m // 2] = -nyq

    def evaluate(tau):
        tau = np.atleast_1d(np.asarray(tau, dtype=float))
        out = np.empty((3, tau.size), dtype=complex)
        for start in range(0, tau.size, 512):
            phase = np.exp(1j * np.outer(tau[start:start + 512], k))
            out[0, start:start + 512] = phase @ coef
            out[1, start:start + 512] = phase @ (1j * k * coef)
            out[2, start:start + 512] = phase @ (-(k * k) * coef)
        return (out[0].real, out[0].imag, out[1].real, out[1].imag, out[2].real, out[2].imag)

    return ClosedCurve(evaluate, label)


def polygon_curve(points) -> ClosedCurve:
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ProfileError("curve points must be an (m, 2) array")
    return fourier_curve(pts[:, 0], pts[:, 1])


def reflected_meridian(profile: AxisymProfile) -> ClosedCurve:
    """Counterclockwise closed curve: left copy top-to-bottom, then the
    meridian itself bottom-to-top on ``tau`` in ``[pi, 2 pi]``."""
    if not profile.closed:
        raise ProfileError("convex envelopes need a closed profile")
    a, b = profile.tau_range
    stretch = (b - a) / math.pi

    def evaluate(tau):
        tau = np.mod(np.asarray(tau, dtype=float), 2 * np.pi)
        left = tau <= np.pi
        s = np.where(left, a + stretch * tau, a + stretch * (2 * np.pi - tau))
        r, z, dr, dz, ddr, ddz = profile.evaluate(s)
        sign = np.where(left, 1.0, -1.0)
        x = np.where(left, -r, r)
        dx = -stretch * dr
        dy = sign * stretch * dz
        ddx = -sign * stretch**2 * ddr
        ddy = stretch**2 * ddz
        return x, z, dx, dy, ddx, ddy

    return ClosedCurve(evaluate, f"reflected {profile.label}")


# ---------------------------------------------------------------------------
# convex envelope
# ---------------------------------------------------------------------------

def convex_hull_indices(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Indices of the strict convex hull vertices, counterclockwise (monotone chain)."""
    order = np.lexsort((y, x))
    pts = np.stack([x, y], axis=1)

    def cross(o, a, b):
        return (pts[a, 0] - pts[o, 0]) * (pts[b, 1] - pts[o, 1]) - (pts[a, 1] - pts[o, 1]) * (pts[b, 0] - pts[o, 0])

    lower: list[int] = []
    for i in order:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], i) <= 0:
            lower.pop()
        lower.append(int(i))
    upper: list[int] = []
    for i in order[::-1]:
        while len(upper) >= 2 and cross(upper[-2], upper[-1], i) <= 0:
            upper.pop()
        upper.append(int(i))
    return np.array(lower[:-1] + upper[:-1])


def _refine_bitangent(curve: ClosedCurve, ta: float, tb: float, h: float) -> tuple[float, float]:
    """Solve for the exact common tangent line near the sampled bridge ends."""

    def equations(p):
        x, y, dx, dy, *_ = curve.evaluate(np.array(p))
        ex, ey = x[1] - x[0], y[1] - y[0]
        return [dx[0] * ey - dy[0] * ex, dx[1] * ey - dy[1] * ex]

    sol = optimize.root(equations, [ta, tb], method="hybr", options={"xtol": 1e-13})
    converged = np.max(np.abs(equations(sol.x))) < 1e-11
    if converged and abs(sol.x[0] - ta) < 2 * h and abs(sol.x[1] - tb) < 2 * h:
        return float(sol.x[0]), float(sol.x[1])
    return ta, tb


@dataclass(frozen=True, eq=False)
class Envelope:
    """Convex envelope of a closed curve sampled at ``count`` parameters.

    ``arcs`` are the parameter intervals (possibly extending past ``2 pi``)
    along which the curve lies on the envelope; ``bridges`` are the straight
    segments joining consecutive arcs.  ``contact_mask`` marks samples on
    the envelope.
    """

    curve: ClosedCurve
    count: int
    arcs: list[tuple[float, float]]
    bridges: list[tuple[float, float]]
    contact_mask: np.ndarray


def planar_envelope(curve: ClosedCurve, count: int = 2048) -> Envelope:
    tau = 2 * np.pi * np.arange(count) / count
    x, y, *_ = curve.evaluate(tau)
    hull = convex_hull_indices(x, y)
    # hull order follows the curve order for a counterclockwise simple curve
    start = int(np.argmin(hull))
    hull = np.roll(hull, -start)
    h = 2 * np.pi / count
    bridges = []
    for i, j in zip(hull, np.roll(hull, -1)):
        gap = (j - i) % count
        if gap > 1:
            ta, tb = tau[i], tau[i] + gap * h
            bridges.append(_refine_bitangent(curve, ta, tb, h))
    mask = np.zeros(count, dtype=bool)
    if not bridges:
        return Envelope(curve, count, [(0.0, 2 * np.pi)], [], ~mask)
    arcs = []
    for k, (_, end_prev) in enumerate(bridges):
        nxt = bridges[(k + 1) % len(bridges)][0]
        while nxt < end_prev:
            nxt += 2 * np.pi
        arcs.append((end_prev, nxt))
    for a, b in arcs:
        inside = (np.mod(tau - a, 2 * np.pi) <= (b - a))
        mask |= inside
    return Envelope(curve, count, arcs, bridges, mask)


def _arc_nodes(a: float, b: float, count: int) -> np.ndarray:
    """Sample parameters strictly inside (a, b) plus the exact end points."""
    h = 2 * np.pi / count
    k0 = math.floor(a / h) + 1
    k1 = math.ceil(b / h) - 1
    inner = h * np.arange(k0, k1 + 1)
    inner = inner[(inner > a + 1e-14) & (inner < b - 1e-14)]
    return np.concatenate([[a], inner, [b]])


_GAUSS2 = np.array([-1.0, 1.0]) / math.sqrt(3.0)


def _panel_rule(edges: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Two-point Gauss rule on every panel between consecutive parameters."""
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * np.diff(edges)
    nodes = (mid[:, None] + half[:, None] * _GAUSS2[None, :]).ravel()
    weights = np.repeat(half, 2)
    return nodes, weights


def _clip(arcs, lo, hi):
    out = []
    for a, b in arcs:
        for shift in (-2 * np.pi, 0.0, 2 * np.pi):
            aa, bb = max(a + shift, lo), min(b + shift, hi)
            if bb > aa:
                out.append((aa, bb))
    return out


@dataclass(frozen=True)
class AlmgrenTerms:
    """``delta = t1 + t2 + t3`` up to ``residual``.

    t1 is the boundary measure off the envelope, t2 the curvature-shortfall
    integral and t3 the gap between ``(H/n)^n`` and the Gauss curvature on
    the contact set.
    """

    t1: float
    t2: float
    t3: float
    delta: float
    residual: float
    gauss_total: float
    contact_measure: float
    scale: float = 1.0

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in ("t1", "t2", "t3", "delta", "residual",
                                               "gauss_total", "contact_measure", "scale")}


@dataclass(frozen=True)
class _ContactIntegrals:
    measure: float
    shortfall: float
    gap: float
    gauss: float
    amgm_violation: float


def _contact_integrals(curve: ClosedCurve, arcs, count, n, weight_kind) -> _ContactIntegrals:
    tot = np.zeros(4)
    worst = 0.0
    omega = _lower_sphere_area(n)
    for a, b in arcs:
        t, wts = _panel_rule(_arc_nodes(a, b, count))
        x, y, dx, dy, ddx, ddy = curve.evaluate(t)
        speed = np.hypot(dx, dy)
        kappa = (dx * ddy - dy * ddx) / speed**3
        if weight_kind == "planar":
            dens = speed
            h, gauss = kappa, kappa
        else:
            with np.errstate(divide="ignore", invalid="ignore"):
                k2 = np.where(np.abs(x) > 1e-12, dy / (speed * x), kappa)
            dens = omega * np.abs(x) ** (n - 1) * speed
            h = kappa + (n - 1) * k2
            gauss = kappa * k2 ** (n - 1)
        hn = (h / n) ** n
        worst = max(worst, float(np.max(gauss - hn)))
        vals = np.stack([dens, (1 - hn) * dens, (hn - gauss) * dens, gauss * dens])
        tot += vals @ wts
    return _ContactIntegrals(*tot, worst)


@dataclass(frozen=True, eq=False)
class EnvelopeResult:
    envelope: Envelope
    contact_measure: float
    gauss_total: float
    amgm_violation: float
    hull_perimeter: float
    hull_volume: float


def _segment_integral(curve, bridges, func):
    total = 0.0
    for ta, tb in bridges:
        xa, ya, *_ = curve.evaluate(np.array([ta]))
        xb, yb, *_ = curve.evaluate(np.array([tb]))
        total += func(float(xa[0]), float(ya[0]), float(xb[0]), float(yb[0]))
    return total


def envelope_of_profile(profile: AxisymProfile, count: int = 2048) -> EnvelopeResult:
    """Convex envelope of a closed surface of revolution (right half of the reflected meridian)."""
    n = profile.n
    curve = reflected_meridian(profile)
    env = planar_envelope(curve, count)
    half = _clip(env.arcs, np.pi, 2 * np.pi)
    ints = _contact_integrals(curve, half, count, n, "revolution")
    omega = _lower_sphere_area(n)
    right = [(a, b) for a, b in env.bridges]

    def frustum_area(xa, ya, xb, yb):
        # only the part with x >= 0 counts
        if xa < 0 and xb < 0:
            return 0.0
        if xa < 0:
            s = -xa / (xb - xa)
            xa, ya = 0.0, ya + s * (yb - ya)
        if xb < 0:
            s = -xb / (xa - xb)
            xb, yb = 0.0, yb + s * (ya - yb)
        length = math.hypot(xb - xa, yb - ya)
        return omega * length * (xb**n - xa**n) / (n * (xb - xa)) if abs(xb - xa) > 1e-15 else omega * length * xa ** (n - 1)

    def frustum_volume(xa, ya, xb, yb):
        if xa < 0 and xb < 0:
            return 0.0
        if xa < 0:
            s = -xa / (xb - xa)
            xa, ya = 0.0, ya + s * (yb - ya)
        if xb < 0:
            s = -xb / (xa - xb)
            xb, yb = 0.0, yb + s * (ya - yb)
        # int omega/n x^n dy along the straight segment
        return omega / n * (yb - ya) * _mean_power(xa, xb, n)

    per = ints.measure + _segment_integral(curve, right, frustum_area)
    vol_contact = 0.0
    for a, b in half:
        t, wts = _panel_rule(_arc_nodes(a, b, count))
        x, y, dx, dy, *_ = curve.evaluate(t)
        vol_contact += (omega / n * np.abs(x) ** n * dy) @ wts
    # the right half runs bottom to top, so +dy integrates the solid
    vol = vol_contact + _segment_integral(curve, right, frustum_volume)
    return EnvelopeResult(env, ints.measure, ints.gauss, ints.amgm_violation, per, abs(vol))


def _mean_power(xa, xb, n):
    if abs(xb - xa) < 1e-15:
        return xa**n
    return (xb ** (n + 1) - xa ** (n + 1)) / ((n + 1) * (xb - xa))


def almgren_profile(profile: AxisymProfile, count: int = 2048, enforce: bool = True) -> AlmgrenTerms:
    """Perimeter deficit of a surface of revolution split over its convex envelope."""
    scale = 1.0
    if enforce:
        profile, scale = enforce_profile_curvature(profile)
    n = profile.n
    per = revolution_functionals(profile).perimeter
    delta = per - sphere_area(n)
    curve = reflected_meridian(profile)
    env = planar_envelope(curve, count)
    ints = _contact_integrals(curve, _clip(env.arcs, np.pi, 2 * np.pi), count, n, "revolution")
    t1 = per - ints.measure
    t2, t3 = ints.shortfall, ints.gap
    return AlmgrenTerms(t1, t2, t3, delta, delta - (t1 + t2 + t3), ints.gauss, ints.measure, scale)


# ---------------------------------------------------------------------------
# planar regions
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class PlanarRegion:
    """Bounded planar domain: outer boundary curve minus interior holes."""

    outer: ClosedCurve
    holes: tuple[ClosedCurve, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "outer", self.outer.counterclockwise())
        object.__setattr__(self, "holes", tuple(h.counterclockwise() for h in self.holes))
        _validate_topology(self)

    def perimeter(self) -> float:
        return self.outer.length() + sum(h.length() for h in self.holes)

    def area(self) -> float:
        return self.outer.signed_area() - sum(h.signed_area() for h in self.holes)


def _validate_topology(region: PlanarRegion, count: int = 1024):
    from shapely.geometry import Polygon

    outer = np.stack(region.outer.points(count), axis=1)
    holes = [np.stack(h.points(count), axis=1) for h in region.holes]
    poly = Polygon(outer, holes)
    if not poly.is_valid:
        raise ProfileError("holes must be disjoint and strictly inside the outer curve")


def almgren_planar(region: PlanarRegion, count: int = 2048) -> AlmgrenTerms:
    """Perimeter deficit of a planar region split over its convex envelope."""
    curve = region.outer
    env = planar_envelope(curve, count)
    ints = _contact_integrals(curve, env.arcs, count, 1, "planar")
    per = region.perimeter()
    delta = per - 2 * np.pi
    t1 = per - ints.measure
    return AlmgrenTerms(t1, ints.shortfall, ints.gap, delta, delta - (t1 + ints.shortfall + ints.gap),
                        ints.gauss, ints.measure, 1.0)


@dataclass(frozen=True)
class PlanarStructure:
    delta: float
    hole_perimeter: float
    hole_area: float

    @property
    def perimeter_ratio(self) -> float:
        return self.hole_perimeter / self.delta

    @property
    def area_ratio(self) -> float:
        return self.hole_area / self.delta**2

    def as_dict(self) -> dict:
        return {"delta": self.delta, "hole_perimeter": self.hole_perimeter,
                "hole_area": self.hole_area, "perimeter_ratio": self.perimeter_ratio,
                "area_ratio": self.area_ratio}


def planar_structure(region: PlanarRegion) -> PlanarStructure:
    """Perimeter deficit against the total length and area of the holes."""
    hole_len = sum(h.length() for h in region.holes)
    hole_area = sum(h.signed_area() for h in region.holes)
    delta = region.perimeter() - 2 * np.pi
    if delta <= 0:
        raise ProfileError("region has no perimeter excess")
    return PlanarStructure(delta, hole_len, hole_area)
