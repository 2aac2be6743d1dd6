import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from relayic import ChannelParams, PowerSplit, etw_split
from relayic.asymptotics import DEFAULT_TEMPLATE, scaled_channel
from relayic.gaussmi import build_model, mi_term_set
from relayic.audit import AuditRegime, draw_channel, run_audit
from relayic.errors import EmptyRegion, RegimeViolation, RelayICError, WynerZivInfeasible
from relayic.model import max_admissible_r0
from relayic.regions import (
    NORMALS,
    RatePolytope,
    cf_rates_order2,
    cf_region_order1,
    constant_gap,
    hk_ghf_region,
    hk_ghf_union_regions,
    hk_polytope,
    max_weighted_sum,
    max_weighted_sum_union,
    no_relay_hk_region,
    outer_bound_region,
    project_split_rates,
    relay_rate_needed,
    sum_rate,
    vertices,
)
from relayic.strategies import (
    quantizer_cf_order1,
    quantizer_cf_order2,
    quantizer_ghf_tin,
    quantizer_ghf_weak,
    small_noise,
    tin_baseline,
    tin_cf_rates,
)

from tests.oracles import mp_conditional_mi


def curves(g2=0.5, power=10.0, r0=1.0):
    return ChannelParams(h11=1, h21=0.5, h12=0.5, h22=1, g1=0.5, g2=g2, P1=power, P2=power, N=1, R0=r0)


def poly(*bounds):
    return RatePolytope.from_bounds(bounds)


def half_log2(x):
    return 0.5 * math.log2(x)


# ----- polytope plumbing ---------------------------------------------------


def test_from_bounds_keeps_tightest_bound_per_normal():
    p = poly((1, 1, 3.0), (1, 1, 2.0), (1, 0, 1.5))
    assert p.as_dict() == {(1, 0): 1.5, (1, 1): 2.0}
    assert p.bound(2, 1) is None


def test_from_bounds_rejects_bad_input():
    with pytest.raises(RelayICError):
        poly((3, 1, 1.0))
    with pytest.raises(RelayICError):
        poly((1, 1, math.inf))


def test_json_round_trip():
    p = hk_ghf_region(curves(), etw_split(curves()), 1.0)
    assert RatePolytope.from_json(p.to_json()) == p
    with pytest.raises(RelayICError):
        RatePolytope.from_json('{"constraints": [{"c1": 1}]}')


def test_max_weighted_sum_examples():
    assert max_weighted_sum(poly((1, 1, 2.0)), 1, 1)[0] == pytest.approx(2.0)
    value, vertex = max_weighted_sum(poly((1, 0, 1.0), (0, 1, 1.0), (1, 1, 1.5)), 1, 1)
    assert value == pytest.approx(1.5)
    assert vertex == pytest.approx((1.0, 0.5))
    assert max_weighted_sum(poly((1, 0, 1.0), (0, 1, 1.0)), 2, 1) == (3.0, (1.0, 1.0))


def test_max_weighted_sum_errors():
    with pytest.raises(EmptyRegion):
        max_weighted_sum(poly((1, 1, -0.5)), 1, 1)
    with pytest.raises(RelayICError):
        max_weighted_sum(poly((1, 1, 1.0)), 0, 0)
    with pytest.raises(RelayICError):
        max_weighted_sum(poly((1, 0, 1.0)), 0, 1)


def test_vertices_of_a_box_with_corner_cut():
    pts = vertices(poly((1, 0, 1.0), (0, 1, 1.0), (1, 1, 1.5)))
    assert pts == pytest.approx([(0, 0), (0, 1), (0.5, 1), (1, 0), (1, 0.5)])


def test_max_weighted_sum_matches_grid_search():
    p = hk_ghf_region(curves(), etw_split(curves()), quantizer_ghf_weak(curves(), etw_split(curves())).q)
    step = 1e-4
    r1 = np.arange(0, p.bound(1, 0) + step, step)
    r2_max = np.full_like(r1, np.inf)
    for c1, c2, b in p.constraints:
        if c2:
            r2_max = np.minimum(r2_max, (b - c1 * r1) / c2)
        else:
            r2_max = np.where(c1 * r1 <= b, r2_max, -np.inf)
    r2_grid = np.floor(r2_max / step) * step
    feasible = r2_grid >= 0
    brute = float(np.max((r1 + r2_grid)[feasible]))
    assert sum_rate(p) == pytest.approx(brute, abs=2e-4)


def test_constant_gap_examples():
    inner = poly((1, 0, 2.0), (0, 1, 2.0), (1, 1, 3.0))
    report = constant_gap(inner, inner)
    assert report.delta == 0 and report.contained
    shifted = constant_gap(poly((1, 1, 4.0)), poly((1, 1, 3.0)))
    assert shifted.delta == pytest.approx(0.5)
    assert shifted.perConstraintGap == {(1, 1): pytest.approx(1.0)}
    assert not constant_gap(poly((1, 1, 2.0)), poly((1, 1, 3.0))).contained


def test_project_split_rates_box():
    upper = [((1, 0, 0, 0), 1.0), ((0, 1, 0, 0), 0.5), ((0, 0, 1, 0), 1.0), ((0, 0, 0, 1), 2.0)]
    p = project_split_rates(upper)
    assert p.as_dict() == pytest.approx({(1, 0): 1.5, (0, 1): 3.0, (1, 1): 4.5, (2, 1): 6.0, (1, 2): 7.5})


# ----- region builders -----------------------------------------------------


def test_no_relay_parallel_channels():
    p = curves().with_(h12=0.0, h21=0.0)
    region = no_relay_hk_region(p, etw_split(p))
    assert sum_rate(region) == pytest.approx(2 * half_log2(11), abs=1e-12)


def test_no_relay_all_private_split_is_interference_as_noise():
    p = curves()
    region = no_relay_hk_region(p, PowerSplit.full_private(p))
    r1, r2 = tin_baseline(p)
    assert region.bound(1, 0) == pytest.approx(r1, abs=1e-12)
    assert region.contains(r1, r2)
    assert sum_rate(region) >= r1 + r2 - 1e-12


def test_hk_degenerates_without_relay():
    p = curves()
    split = etw_split(p)
    base = no_relay_hk_region(p, split).as_dict()
    zero = hk_ghf_region(p.with_(R0=0.0), split, 1.0).as_dict()
    coarse = hk_ghf_region(p, split, 1e12).as_dict()
    for n in NORMALS:
        assert zero[n] == pytest.approx(base[n], abs=1e-9)
        assert coarse[n] == pytest.approx(base[n], abs=1e-6)


def test_hk_reference_bounds_frozen():
    # Rebuild the user-1 bound from determinant-based high-precision terms.
    p = curves()
    split = etw_split(p)
    region = hk_ghf_region(p, split, quantizer_ghf_weak(p, split).q)
    m = build_model(p, split, quantizer_ghf_weak(p, split).q)
    r0 = p.R0

    def clip(x):
        return min(r0, x)

    d1 = mp_conditional_mi(m, ["Y1"], ["X1"], ["W2"])
    dd1 = clip(mp_conditional_mi(m, ["Yhat"], ["Yr"], ["Y1", "W2"]))
    delta1 = clip(mp_conditional_mi(m, ["Yhat"], ["Yr"], ["Y1", "X1", "W2"]))
    assert region.bound(1, 0) == pytest.approx(d1 + dd1 - delta1, abs=1e-9)
    assert region.bound(0, 1) == pytest.approx(region.bound(1, 0), abs=1e-12)


def test_outer_bound_examples():
    p = curves(power=100).with_(g1=0.0, g2=0.0)
    outer = outer_bound_region(p)
    assert outer.bound(1, 0) == pytest.approx(half_log2(101))
    q = curves(power=100).with_(g1=1.0, g2=0.0)
    k1 = outer_bound_region(q).bound(1, 0) - half_log2(101)
    assert k1 == pytest.approx(half_log2(201 / 101)) and k1 < 0.5
    with pytest.raises(RegimeViolation):
        outer_bound_region(curves().with_(h21=2.0))


def test_outer_bound_pairing_flag():
    p = ChannelParams(h11=1, h21=0.1, h12=0.8, h22=1, g1=0.5, g2=0.5, P1=1e4, P2=1e4, N=1, R0=1)
    default = outer_bound_region(p).as_dict()
    alternate = outer_bound_region(p, alternate_pairing=True).as_dict()
    assert default[(1, 0)] == alternate[(1, 0)]
    assert default[(2, 1)] != pytest.approx(alternate[(2, 1)])
    sym = curves(power=100)
    assert outer_bound_region(sym).as_dict() == outer_bound_region(sym, alternate_pairing=True).as_dict()


def test_time_sharing_union():
    p = curves()
    split = etw_split(p)
    q = quantizer_ghf_weak(p, split).q
    members = hk_ghf_union_regions(p, split, q)
    assert members[0] == hk_ghf_region(p, split, q)
    assert max_weighted_sum_union(members, 1, 1)[0] >= sum_rate(members[0]) - 1e-12


def test_cf_order1_symmetric_matches_hk():
    p = curves()
    split = etw_split(p)
    q = quantizer_cf_order1(p, split).q
    assert sum_rate(cf_region_order1(p, split, q)) == pytest.approx(sum_rate(hk_ghf_region(p, split, q)), abs=1e-9)


def test_cf_order1_useless_quantizer_and_infeasible_quantizer():
    p = curves()
    split = etw_split(p)
    coarse = cf_region_order1(p, split, 1e12).as_dict()
    base = no_relay_hk_region(p, split).as_dict()
    for n in NORMALS:
        assert coarse[n] == pytest.approx(base[n], abs=1e-6)
    with pytest.raises(WynerZivInfeasible):
        cf_region_order1(p, split, 1e-6)
    with pytest.raises(WynerZivInfeasible):
        cf_rates_order2(p, split, 1e-6)


def test_cf_order1_asymmetric_falls_short_of_ghf():
    p = small_noise(curves(g2=0.1))
    split = etw_split(p)
    cf = sum_rate(cf_region_order1(p, split, quantizer_cf_order1(p, split).q))
    ghf = sum_rate(hk_ghf_region(p, split, quantizer_ghf_tin(p).q))
    assert cf < ghf - 0.1


def test_cf_order2_degenerations():
    p = curves(g2=0.1)
    split = PowerSplit.full_private(p)
    q = quantizer_cf_order2(p, split).q
    r1, r2 = tin_baseline(p)
    plain = cf_rates_order2(p, split, q)
    assert plain.bound(1, 0) == pytest.approx(r1, abs=1e-12)
    assert plain.bound(0, 1) == pytest.approx(r2, abs=1e-12)
    helped = cf_rates_order2(p, split, q, private_uses_relay=True)
    cf = tin_cf_rates(p, q)
    assert helped.bound(1, 0) == pytest.approx(cf.r1, abs=1e-9)
    assert helped.bound(0, 1) == pytest.approx(cf.r2, abs=1e-9)


def test_cf_order2_coarse_quantizer_stays_inside_no_relay_region():
    p = curves(r0=5.0)
    split = etw_split(p)
    successive = cf_rates_order2(p, split, 1e12)
    base = no_relay_hk_region(p, split)
    assert all(base.contains(r1, r2) for r1, r2 in vertices(successive))


def test_cf_order2_beats_order1_at_intermediate_interference():
    p = scaled_channel(DEFAULT_TEMPLATE, 0.55, 0.2, 1e8)
    split = etw_split(p)
    two = sum_rate(cf_rates_order2(p, split, quantizer_cf_order2(p, split).q))
    one = sum_rate(cf_region_order1(p, split, quantizer_cf_order1(p, split).q))
    assert two > one + 1.0


def test_relay_rate_needed_orders():
    p = curves(g2=0.1)
    split = etw_split(p)
    plain = relay_rate_needed(p, split, 0.5, common=False)
    common = relay_rate_needed(p, split, 0.5, common=True)
    assert common[0] <= plain[0] + 1e-12 and common[1] <= plain[1] + 1e-12


# ----- properties ----------------------------------------------------------

weak_channels = st.builds(
    ChannelParams,
    h11=st.floats(0.5, 3),
    h21=st.floats(-1, 1),
    h12=st.floats(-1, 1),
    h22=st.floats(0.5, 3),
    g1=st.floats(-2, 2),
    g2=st.floats(-2, 2),
    P1=st.floats(1, 1e4),
    P2=st.floats(1, 1e4),
    N=st.just(1.0),
    R0=st.floats(0, 3),
)


@settings(max_examples=80, deadline=None)
@given(weak_channels, st.floats(0.01, 100), st.floats(0.01, 2))
def test_hk_region_grows_with_relay_rate(p, q, extra):
    split = etw_split(p)
    low = hk_ghf_region(p, split, q).as_dict()
    high = hk_ghf_region(p.with_(R0=p.R0 + extra), split, q).as_dict()
    for n in NORMALS:
        assert high[n] >= low[n] - 1e-9


@settings(max_examples=60, deadline=None)
@given(weak_channels.filter(lambda p: p.R0 > 0.05))
def test_cf_order1_inside_hk_with_same_quantizer(p):
    split = etw_split(p)
    q = quantizer_cf_order1(p, split).q
    cf = cf_region_order1(p, split, q)
    hk = hk_ghf_region(p, split, q)
    assert all(hk.contains(r1, r2) for r1, r2 in vertices(cf))


def test_containment_chain_on_audit_sample():
    result = run_audit(seed=11, count=100)
    assert len(result.samples) == 100
    assert result.passed
    assert all(s.contained for s in result.samples)


def test_aligned_relay_has_no_admissible_rate():
    rng = np.random.default_rng(3)
    for _ in range(20):
        p = draw_channel(rng, AuditRegime(aligned_relay=True))
        assert not max_admissible_r0(p) > 0


def test_terms_without_relay_give_the_no_relay_region():
    p = curves()
    split = etw_split(p)
    stripped = hk_polytope(mi_term_set(p, split, 0.3).without_relay()).as_dict()
    base = no_relay_hk_region(p, split).as_dict()
    assert stripped == pytest.approx(base, abs=1e-12)
