"""Both sides of the stability inequalities, evaluated on concrete sets.

Every harness checks the hypotheses of the estimate it evaluates and
raises :class:`HypothesisError` instead of reporting a meaningless ratio.
The unknown constants are replaced by empirical maxima over seeded
families (see :func:`constant_sweep`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import graph_geometry as gg
from . import sharp_family as sf
from .harmonics import DegenerateInputError
from .sphere_core import ScalarField, make_grid, norm, sphere_area

# scale inside the n = 2 logarithm; keeps log(C / delta) >= 1 on admissible sets
SHARP_LOG_CONSTANT = math.e * sphere_area(2)
ZERO = 1e-12

ESTIMATES = (
    "sharp_barycenter", "sharp_barycenter_lower", "sharp_L1", "sharp_c0_plus", "sharp_c0",
    "sharp_w12", "symdiff_L1", "main", "alex_L2", "alex_C0_Lp", "alex_C1alpha",
)


class HypothesisError(ValueError):
    """An input violates a hypothesis of the estimate; ``name`` says which."""

    def __init__(self, name: str, detail: str):
        super().__init__(f"{name}: {detail}")
        self.name = name


@dataclass(frozen=True)
class InequalityRecord:
    estimate_id: str
    lhs: float
    rhs_raw: float
    family_tag: str = ""
    params: dict = field(default_factory=dict)

    @property
    def degenerate(self) -> bool:
        return self.rhs_raw <= ZERO

    @property
    def ratio(self) -> float:
        if self.degenerate:
            return math.nan
        return self.lhs / self.rhs_raw

    def as_dict(self) -> dict:
        ratio = self.ratio
        return {
            "estimate_id": self.estimate_id,
            "lhs": self.lhs,
            "rhs_raw": self.rhs_raw,
            "ratio": None if math.isnan(ratio) else ratio,
            "degenerate": self.degenerate,
            "family_tag": self.family_tag,
            "params": dict(self.params),
        }


# ---------------------------------------------------------------------------
# hypotheses
# ---------------------------------------------------------------------------

def _require_centered(s: gg.NormalGraphSet, tol: float = 1e-9):
    offset = float(np.linalg.norm(gg.barycenter(s)))
    if offset > tol:
        raise HypothesisError("zero_barycenter", f"|int x| = {offset:.3e} > {tol:g}; recenter first")


def _require_curvature(s: gg.NormalGraphSet, h=None, tol: float = 1e-8):
    h = gg.mean_curvature(s) if h is None else h
    top = float(np.max(h.values))
    if top > s.dim + tol:
        raise HypothesisError("mean_curvature_le_n", f"sup H = {top:.12g} exceeds n = {s.dim}")


def _require_c1(s: gg.NormalGraphSet, bound: float = 0.1):
    size = norm(s.u, "C1")
    if size > bound:
        raise HypothesisError("small_C1", f"||u||_C1 = {size:.4g} > {bound:g}")


def check_exponent(n: int, p: float):
    ok = p >= 2 if n <= 3 else p > n / 2
    if not ok:
        raise HypothesisError("exponent_range", f"p = {p:g} not admissible for n = {n}")


def _c0_rate(n: int, delta: float) -> float:
    if n == 1:
        return delta
    if n == 2:
        return delta * math.log(SHARP_LOG_CONSTANT / delta) if delta > 0 else 0.0
    return delta ** (1.0 / (n - 1))


# ---------------------------------------------------------------------------
# harnesses on grid sets
# ---------------------------------------------------------------------------

def _sharp_records(n, integral, delta, w11, u_plus, u_sup, w12, l1, symdiff, tag, params):
    rec = lambda key, lhs, rhs: InequalityRecord(key, float(lhs), float(rhs), tag, params)
    return [
        rec("sharp_barycenter", integral, delta),
        rec("sharp_barycenter_lower", delta, integral),
        rec("sharp_L1", w11, delta),
        rec("sharp_c0_plus", u_plus, delta),
        rec("sharp_c0", u_sup, _c0_rate(n, delta)),
        rec("sharp_w12", w12, math.sqrt(u_sup * delta + delta * delta)),
        rec("symdiff_L1", symdiff, l1),
    ]


def verify_sharp_u(s: gg.NormalGraphSet, tag: str = "", params: dict | None = None) -> list[InequalityRecord]:
    """Records for the normal-perturbation estimates on a centered set with ``H <= n``."""
    _require_centered(s)
    _require_curvature(s)
    _require_c1(s)
    n, u = s.dim, s.u
    delta = gg.perimeter_deficit(s)
    return _sharp_records(
        n, u.integral(), delta, norm(u, "W11"), max(float(np.max(u.values)), 0.0), norm(u, "C0"),
        norm(u, "W12"), norm(u, "L1"), gg.symmetric_difference(s, np.zeros(n + 1), 1.0),
        tag, dict(params or {}))


def main_lhs(s: gg.NormalGraphSet) -> tuple[float, np.ndarray]:
    """``min_x |Omega symdiff B_1(x)| + inf{eps : Omega in B_{1+eps}(x)}``."""
    def objective(c):
        return gg.symmetric_difference(s, c, 1.0) + gg.outer_inclusion_gap(s, c)
    return gg._multistart(objective, s, 1.0)


def verify_main(s: gg.NormalGraphSet, tag: str = "", params: dict | None = None) -> InequalityRecord:
    _require_curvature(s)
    lhs, center = main_lhs(s)
    info = dict(params or {})
    info["center"] = [float(c) for c in center]
    return InequalityRecord("main", lhs, gg.perimeter_deficit(s), tag, info)


def verify_alex(s: gg.NormalGraphSet, p: float = 2.0, alpha: float = 0.5, K: float = 1.0,
                tag: str = "", params: dict | None = None) -> list[InequalityRecord]:
    """Records for the almost-constant-mean-curvature estimates."""
    n = s.dim
    check_exponent(n, p)
    if not 0 < alpha < 1:
        raise HypothesisError("holder_exponent", f"alpha = {alpha:g} not in (0, 1)")
    _require_centered(s)
    _require_c1(s)
    u = s.u
    holder = norm(u, "C1alpha", alpha=alpha)
    if holder > K:
        raise HypothesisError("holder_bound", f"||u||_C1alpha = {holder:.4g} > K = {K:g}")
    h = gg.mean_curvature(s)
    area = gg.area_element(s)
    gap = np.abs(h.values - n)
    l2 = math.sqrt(s.grid.integrate(gap**2 * area))
    lp = s.grid.integrate(gap**p * area) ** (1.0 / p)
    info = dict(params or {})
    info.update(p=p, alpha=alpha, holder_surrogate="largest difference quotient between adjacent nodes")
    return [
        InequalityRecord("alex_L2", norm(u, "W12"), l2, tag, info),
        InequalityRecord("alex_C0_Lp", norm(u, "C0"), lp, tag, info),
        InequalityRecord("alex_C1alpha", holder, gg.cmc_deficit(s, h), tag, info),
    ]


# ---------------------------------------------------------------------------
# harness on the exact sharp family
# ---------------------------------------------------------------------------

def sharp_family_records(fam: sf.SharpFamilySet, tag: str = "sharp") -> list[InequalityRecord]:
    """Records from the profile integrals of a dimpled ball.

    The family is not recentered; its barycenter offset is reported in
    ``params``.  The ``main`` record uses the origin as center, which
    bounds the minimum over centers from above.
    """
    if fam.validation is not None and not fam.validation.ok:
        raise HypothesisError("mean_curvature_le_n", "profile checks failed")
    p = fam.params
    delta = fam.delta()
    integrals = fam._sphere_integrals()
    info = p.as_dict()
    info["barycenter_offset"] = fam.barycenter_offset()
    records = _sharp_records(
        p.n, fam.u_mean_integral(), delta, fam.u_w11(), fam.u_plus_sup(), fam.u_sup(), fam.u_w12(),
        integrals["abs_u"], fam.symmetric_difference(), tag, info)
    main_info = dict(info, center=[0.0] * (p.n + 1))
    records.append(InequalityRecord("main", fam.symmetric_difference() + p.t, delta, tag, main_info))
    return records


# ---------------------------------------------------------------------------
# families
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Member:
    tag: str
    params: dict
    subject: object  # NormalGraphSet or SharpFamilySet


def _grid_for(n: int, resolution: int | None = None):
    return make_grid(n, resolution, "full" if n <= 2 else "axisym")


def scaled_ball_family(n: int = 2, members: int = 10, lo: float = 1e-3, hi: float = 1e-1,
                       resolution: int | None = None) -> list[Member]:
    grid = _grid_for(n, resolution)
    return [Member("scaled_ball", {"n": n, "t": float(t)}, gg.build_set(ScalarField.constant(grid, float(t))))
            for t in np.geomspace(lo, hi, members)]


def sharp_family_members(n: int = 3, members: int = 10, K: float = 16.0, r0: float = 0.06,
                         sigma: float = 3.5e-3, lo: float | None = None, hi: float | None = None,
                         samples: int = 2000) -> list[Member]:
    if lo is None:
        lo, hi = (1e-12, 1e-10) if n >= 3 else (1e-8, 1e-6)
    out = []
    for t in np.geomspace(lo, hi, members):
        fam = sf.build_set(sf.SharpParams(n, K, r0, sigma, float(t)), samples=samples)
        out.append(Member("sharp", fam.params.as_dict(), fam))
    return out


def band_limited_family(n: int = 2, members: int = 10, seed: int = 0, amplitude: float = 0.05,
                        band: int = 6, curvature_cap: bool = False, resolution: int | None = None) -> list[Member]:
    """Random band-limited perturbations, recentered, with ``||u||_C1`` at most ``amplitude``.

    With ``curvature_cap`` each set is also scaled so that ``H <= n``
    (scaling about the origin keeps the barycenter at zero).
    """
    grid = _grid_for(n, resolution or (64 if n == 1 else 32 if n == 2 else 64))
    rng = np.random.default_rng(seed)
    out = []
    for idx in range(members):
        c = rng.standard_normal(grid.n_coeffs) * ((grid.degrees >= 2) & (grid.degrees <= band))
        c *= (1.0 + grid.degrees) ** -1.0
        u = ScalarField.from_coeffs(grid, c)
        target = 0.5 * amplitude
        while True:
            s, _ = gg.recenter(gg.build_set(u * (target / norm(u, "C1"))))
            if curvature_cap:
                # scaling about the origin keeps the barycenter at zero but adds to ||u||_C1
                s, _ = gg.enforce_curvature_bound(s)
            if norm(s.u, "C1") <= amplitude:
                break
            target *= 0.5
        out.append(Member("band_limited", {"n": n, "seed": seed, "index": idx, "band": band}, s))
    return out


def ellipsoid_family(n: int = 2, eccentricities=(0.05, 0.1, 0.2), resolution: int | None = None) -> list[Member]:
    """Ellipsoids with semi-axes ``1`` and ``sqrt(1 - e^2)`` along the polar axis, as radial graphs."""
    grid = _grid_for(n, resolution)
    out = []
    for e in eccentricities:
        b = math.sqrt(1 - e * e)
        z = grid.nodes[:, grid.axis]
        rho = 1.0 / np.sqrt((1 - z * z) + (z / b) ** 2)
        s = gg.build_set(ScalarField.from_values(grid, rho - 1.0))
        out.append(Member("ellipsoid", {"n": n, "eccentricity": float(e)}, s))
    return out


FAMILIES = {
    "scaled_ball": scaled_ball_family,
    "sharp": sharp_family_members,
    "band_limited": band_limited_family,
    "ellipsoid": ellipsoid_family,
}


def parse_family(spec: str) -> tuple[str, dict]:
    """``name:key=value,key=value`` into a generator name and keyword arguments."""
    name, _, rest = spec.partition(":")
    if name not in FAMILIES:
        raise ValueError(f"unknown family {name!r}; choose from {sorted(FAMILIES)}")
    kwargs = {}
    for item in filter(None, rest.split(",")):
        key, eq, value = item.partition("=")
        if not eq:
            raise ValueError(f"bad family option {item!r}")
        try:
            kwargs[key.strip()] = int(value)
        except ValueError:
            try:
                kwargs[key.strip()] = float(value)
            except ValueError:
                kwargs[key.strip()] = value.strip().lower() in ("1", "true", "yes")
    return name, kwargs


def family(spec: str) -> list[Member]:
    name, kwargs = parse_family(spec)
    return FAMILIES[name](**kwargs)


def records_for(member: Member, estimate_id: str, p: float = 2.0, alpha: float = 0.5) -> InequalityRecord:
    if estimate_id not in ESTIMATES:
        raise ValueError(f"unknown estimate {estimate_id!r}")
    subject = member.subject
    if isinstance(subject, sf.SharpFamilySet):
        if estimate_id.startswith("alex"):
            raise HypothesisError("estimate_family", "the sharp family is evaluated from its profile only")
        recs = sharp_family_records(subject, member.tag)
    elif estimate_id == "main":
        return verify_main(subject, member.tag, member.params)
    elif estimate_id.startswith("alex"):
        recs = verify_alex(subject, p=p, alpha=alpha, tag=member.tag, params=member.params)
    else:
        recs = verify_sharp_u(subject, member.tag, member.params)
    return next(r for r in recs if r.estimate_id == estimate_id)


@dataclass(frozen=True)
class SweepTable:
    estimate_id: str
    records: list

    @property
    def ratios(self) -> np.ndarray:
        return np.array([r.ratio for r in self.records])

    @property
    def max_ratio(self) -> float:
        return float(np.max(self.ratios))

    @property
    def min_ratio(self) -> float:
        return float(np.min(self.ratios))


def constant_sweep(members: list[Member], estimate_id: str, p: float = 2.0, alpha: float = 0.5,
                   minimum: int = 10) -> tuple[float, SweepTable]:
    """Empirical constant ``max lhs / rhs_raw`` over a family."""
    if not members:
        raise ValueError("empty family")
    if len(members) < minimum:
        raise ValueError(f"constant sweeps need at least {minimum} members, got {len(members)}")
    records = [records_for(m, estimate_id, p, alpha) for m in members]
    bad = [r for r in records if r.degenerate]
    if bad:
        raise DegenerateInputError(f"{len(bad)} degenerate member(s) for {estimate_id}")
    table = SweepTable(estimate_id, records)
    return table.max_ratio, table
