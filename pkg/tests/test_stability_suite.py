import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import isostab.graph_geometry as gg
from isostab import stability_suite as ss
from isostab.harmonics import DegenerateInputError
from isostab.sphere_core import ScalarField, ball_volume, make_grid, norm, sphere_area

S2 = make_grid(2, 32)


def record(recs, key):
    return next(r for r in recs if r.estimate_id == key)


@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("t", [1e-3, 1e-2])
def test_scaled_ball_closed_forms(n, t):
    s = gg.build_set(ScalarField.constant(ss._grid_for(n), t))
    recs = ss.verify_sharp_u(s)
    bary = record(recs, "sharp_barycenter")
    assert bary.ratio == pytest.approx(t / ((1 + t) ** n - 1), rel=1e-10)
    assert record(recs, "sharp_c0_plus").lhs == pytest.approx(t, rel=1e-12)
    assert record(recs, "symdiff_L1").lhs == pytest.approx(ball_volume(n) * ((1 + t) ** (n + 1) - 1), rel=1e-10)


def test_main_on_scaled_ball():
    t = 1e-3
    s = gg.build_set(ScalarField.constant(S2, t))
    rec = ss.verify_main(s)
    expected = ball_volume(2) * ((1 + t) ** 3 - 1) + t
    assert rec.lhs == pytest.approx(expected, rel=1e-6)
    limit = (ball_volume(2) * 3 + 1) / (2 * sphere_area(2))
    assert rec.ratio == pytest.approx(limit, rel=1e-2)


def test_degenerate_member():
    s = gg.build_set(ScalarField.constant(S2, 0.0))
    bary = record(ss.verify_sharp_u(s), "sharp_barycenter")
    assert bary.degenerate
    assert math.isnan(bary.ratio)
    assert bary.as_dict()["ratio"] is None
    members = [ss.Member("ball", {}, s)] * 10
    with pytest.raises(DegenerateInputError):
        ss.constant_sweep(members, "sharp_barycenter")


def test_gating():
    off = gg.build_set(ScalarField.from_values(S2, 0.01 * S2.nodes[:, 0]))
    with pytest.raises(ss.HypothesisError) as err:
        ss.verify_sharp_u(off)
    assert err.value.name == "zero_barycenter"
    with pytest.raises(ss.HypothesisError) as err:
        ss.verify_sharp_u(gg.build_set(ScalarField.constant(S2, -0.05)))
    assert err.value.name == "mean_curvature_le_n"
    z = S2.nodes[:, 2]
    steep = gg.build_set(ScalarField.from_values(S2, 0.2 * (3 * z**2 - 1) / 2))
    with pytest.raises(ss.HypothesisError) as err:
        ss.verify_alex(steep)
    assert err.value.name == "small_C1"
    ball = gg.build_set(ScalarField.constant(S2, 0.01))
    with pytest.raises(ss.HypothesisError) as err:
        ss.verify_alex(ball, p=1.5)
    assert err.value.name == "exponent_range"
    with pytest.raises(ss.HypothesisError) as err:
        ss.verify_alex(ball, alpha=1.2)
    assert err.value.name == "holder_exponent"


@pytest.mark.parametrize("n,p,ok", [(2, 2, True), (3, 2, True), (2, 1.9, False), (5, 2.5, False), (5, 2.6, True)])
def test_exponent_ranges(n, p, ok):
    if ok:
        ss.check_exponent(n, p)
    else:
        with pytest.raises(ss.HypothesisError):
            ss.check_exponent(n, p)


def test_c0_rates():
    assert ss._c0_rate(1, 0.01) == 0.01
    assert ss._c0_rate(2, 0.01) == pytest.approx(0.01 * math.log(math.e * 4 * math.pi / 0.01))
    assert ss._c0_rate(3, 1e-4) == pytest.approx(1e-2)


@settings(max_examples=5)
@given(st.integers(0, 1000))
def test_capped_band_limited_members_satisfy_hypotheses(seed):
    for m in ss.band_limited_family(2, members=2, seed=seed, curvature_cap=True):
        s = m.subject
        assert norm(s.u, "C1") <= 0.05
        assert np.max(gg.mean_curvature(s).values) <= 2 + 1e-8
        assert np.linalg.norm(gg.barycenter(s)) <= 1e-9
        # H <= n with zero barycenter forces a perimeter excess
        assert s.u.integral() > 0
        bary = ss.records_for(m, "sharp_barycenter")
        assert bary.ratio > 0


def test_alex_records_on_ellipsoids():
    members = ss.ellipsoid_family(2, (0.05, 0.1))
    for m in members:
        recs = ss.verify_alex(m.subject)
        assert [r.estimate_id for r in recs] == ["alex_L2", "alex_C0_Lp", "alex_C1alpha"]
        assert all(r.ratio > 0 for r in recs)


def test_sharp_family_records():
    (member,) = ss.sharp_family_members(3, members=1, lo=1e-12, hi=1e-12, samples=500)
    recs = ss.sharp_family_records(member.subject)
    assert record(recs, "sharp_barycenter").ratio == pytest.approx(1 / 3, rel=1e-3)
    assert record(recs, "main").params["center"] == [0.0] * 4
    with pytest.raises(ss.HypothesisError):
        ss.records_for(member, "alex_L2")


def test_parse_family():
    assert ss.parse_family("band_limited:n=1,seed=3,amplitude=0.02,curvature_cap=true") == (
        "band_limited", {"n": 1, "seed": 3, "amplitude": 0.02, "curvature_cap": True})
    with pytest.raises(ValueError):
        ss.parse_family("torus")
    with pytest.raises(ValueError):
        ss.parse_family("scaled_ball:n")


def test_sweep_requires_members():
    members = ss.scaled_ball_family(1, members=5)
    with pytest.raises(ValueError):
        ss.constant_sweep(members, "sharp_L1")
    with pytest.raises(ValueError):
        ss.records_for(members[0], "nonsense")
    const, table = ss.constant_sweep(ss.scaled_ball_family(1, members=10), "sharp_L1")
    assert const == table.max_ratio >= table.min_ratio > 0
