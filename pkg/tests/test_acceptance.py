"""Acceptance criteria 1-9, each at its stated tolerance.

Every test records one PASS/FAIL line in ``RESULTS``; ``conftest.py`` prints
them at the end of the pytest run.  Running this file directly prints the
same lines without pytest.
"""

from __future__ import annotations

import math
import sys
import time
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

from relayic import ChannelParams, etw_split
from relayic.asymptotics import DEFAULT_TEMPLATE, gdof_slope_check, ghf_sym_sum_gdof, regime_map
from relayic.audit import GAP_BOUND, LOSS_BOUND, run_audit
from relayic.detchannel import verify_example1, verify_example2
from relayic.gaussmi import build_model, conditional_mi, mi_term_set
from relayic.regions import hk_ghf_region, no_relay_hk_region
from relayic.strategies import (
    af_rates,
    quantizer_cf_tin,
    quantizer_ghf_tin,
    tin_cf_rates,
    tin_ghf_rates,
)

if __name__ == "__main__":
    sys.path.insert(0, str(Path(__file__).resolve().parents[1]))

from tests.random_models import random_channel, random_small_model, split_groups

RESULTS: dict[int, str] = {}
AUDIT_SEED = 0
AUDIT_COUNT = 1000


def record(number: int, ok: bool, detail: str) -> None:
    RESULTS[number] = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
    print(RESULTS[number])
    assert ok, RESULTS[number]


@pytest.fixture(scope="module")
def audit():
    start = time.perf_counter()
    result = run_audit(AUDIT_SEED, AUDIT_COUNT)
    return result, time.perf_counter() - start


def test_criterion_1_constant_gap(audit):
    result, seconds = audit
    s = result.summary()
    ok = (
        s["admissible"] == AUDIT_COUNT
        and not s["violations"]["gap"]
        and not s["violations"]["containment"]
        and seconds < 60
    )
    record(
        1,
        ok,
        f"{s['admissible']} channels, max gap {s['maxDelta']:.5f} <= {GAP_BOUND:.5f}, "
        f"{len(s['violations']['gap'])} gap violations, {seconds:.1f} s",
    )


def test_criterion_2_quantization_loss(audit):
    result, _ = audit
    s = result.summary()
    ok = s["admissible"] == AUDIT_COUNT and not s["violations"]["quantizationLoss"]
    record(
        2,
        ok,
        f"max loss {s['maxQuantizationLoss']:.5f} <= {LOSS_BOUND:.5f}, "
        f"{len(s['violations']['quantizationLoss'])} violations",
    )


def test_criterion_3_relay_gain(audit):
    result, _ = audit
    s = result.summary()
    ok = s["admissible"] == AUDIT_COUNT and not s["violations"]["relayGain"]
    record(
        3,
        ok,
        f"smallest margin over R0 - 1/2 log2 3 is {s['minRelayGainMargin']:.5f}, "
        f"{len(s['violations']['relayGain'])} violations",
    )


def curves_channel(g2: float, snr_db: float = 60.0) -> ChannelParams:
    power = 10 ** (snr_db / 10)
    return ChannelParams(h11=1, h21=0.5, h12=0.5, h22=1, g1=0.5, g2=g2, P1=power, P2=power, N=1, R0=1)


def test_criterion_4_fixed_snr_curves():
    notes = []
    p = curves_channel(0.5)
    ghf = tin_ghf_rates(p, quantizer_ghf_tin(p).q)
    cf = tin_cf_rates(p, quantizer_cf_tin(p).q)
    ok_a = abs(ghf.sum_improvement - cf.sum_improvement) <= 1e-6 and abs(ghf.sum_improvement - 2) <= 0.05
    notes.append(f"(a) ghf {ghf.sum_improvement:.5f} cf {cf.sum_improvement:.5f}")

    p = curves_channel(0.1)
    ghf = tin_ghf_rates(p, quantizer_ghf_tin(p).q)
    cf = tin_cf_rates(p, quantizer_cf_tin(p).q)
    expected_user1 = 1 - 0.5 * math.log2(3)
    ok_b = (
        abs(ghf.sum_improvement - 2) <= 0.05
        and abs(cf.improvement1 - expected_user1) <= 0.02
        and abs(cf.improvement2 - 1) <= 0.02
    )
    notes.append(f"(b) ghf {ghf.sum_improvement:.5f} cf users {cf.improvement1:.5f}, {cf.improvement2:.5f}")

    worst = -math.inf
    for g2 in (0.5, 0.1):
        for snr_db in range(0, 61, 5):
            af = af_rates(curves_channel(g2, snr_db))
            worst = max(worst, af.improvement1, af.improvement2)
    ok_c = worst < 1.0
    notes.append(f"(c) largest AF improvement {worst:.5f} < 1")
    record(4, ok_a and ok_b and ok_c, "; ".join(notes))


def test_criterion_5_gdof_slopes():
    notes = []
    ok = True
    for alpha, rho in ((0.4, 0.3), (0.5, 0.25), (0.6, 0.1)):
        slope, predicted, passed = gdof_slope_check(DEFAULT_TEMPLATE, alpha, rho, [1e8, 1e12], "ghf", tol=0.05)
        assert predicted == ghf_sym_sum_gdof(alpha, rho)
        ok &= passed
        notes.append(f"ghf({alpha},{rho}) {slope:.4f} vs {predicted:.4f}")
    slope, predicted, passed = gdof_slope_check(
        DEFAULT_TEMPLATE, 0.6, 0.1, [1e8, 1e12], "cf1", gain_only=True, tol=0.02
    )
    ok &= passed and predicted == 0.0
    notes.append(f"cf1 gain slope (0.6,0.1) {slope:.4f}")
    record(5, ok, "; ".join(notes))


def exact_label(a1: Fraction, a2: Fraction) -> str:
    if not (0 < a1 < 1 and 0 < a2 < 1):
        return "outside"
    s1, s2 = a1 + 2 * a2 - 2, 2 * a1 + a2 - 2
    if s1 < 0 and s2 < 0:
        return "gain-2"
    if s1 > 0 or s2 > 0:
        return "gain-1"
    return "boundary"


def test_criterion_6_regime_map():
    grid = [k / 100 for k in range(101)]
    labels = regime_map(grid, grid)
    mismatches = [
        (a1, a2)
        for a1, a2, label in labels
        if label != exact_label(Fraction(round(a1 * 100), 100), Fraction(round(a2 * 100), 100))
    ]
    on_lines = sum(1 for *_, label in labels if label == "boundary")
    record(6, not mismatches and len(labels) == 101 * 101, f"{len(labels)} grid points, {on_lines} on the dividing lines, {len(mismatches)} mismatches")


def test_criterion_7_deterministic_examples():
    start = time.perf_counter()
    first = verify_example1()
    second = verify_example2()
    seconds = time.perf_counter() - start
    ok = (
        first["pass"]
        and tuple(first["relayRates"]) == (2, 3)
        and tuple(first["baseline"]) == (1, 2)
        and first["baselineOnFrontier"]
        and second["pass"]
        and tuple(second["gain"]) == (1, 1)
        and seconds < 10
    )
    record(
        7,
        ok,
        f"example 1 {tuple(first['relayRates'])} over {tuple(first['baseline'])}; "
        f"example 2 {tuple(second['relayRates'])} over {tuple(second['baseline'])}; {seconds:.2f} s",
    )


def test_criterion_8_information_engine():
    rng = np.random.default_rng(2024)
    tol = 1e-9
    worst = 0.0
    for _ in range(1000):
        model = random_small_model(rng)
        a, b, b2, c = split_groups(model, rng)
        whole = conditional_mi(model, a, b + b2, c)
        parts = conditional_mi(model, a, b, c) + conditional_mi(model, a, b2, c + b)
        worst = max(worst, abs(whole - parts), abs(conditional_mi(model, a, b, c) - conditional_mi(model, b, a, c)))

        params = random_channel(rng)
        split = etw_split(params)
        q = float(10 ** rng.uniform(-2, 2))
        m = build_model(params, split, q)
        for x, y, w in (("X1", "Y1", "W2"), ("X2", "Y2", "W1")):
            joint = conditional_mi(m, x, [y, "Yhat"], w)
            decomposed = (
                conditional_mi(m, x, y, w)
                + conditional_mi(m, "Yhat", "Yr", [y, w])
                - conditional_mi(m, "Yhat", "Yr", [y, x, w])
            )
            worst = max(worst, abs(joint - decomposed))
        t = mi_term_set(params, split, q)
        for u in (t.user1, t.user2):
            g = u.relay_gain
            worst = max(
                worst,
                g.private - g.private_cross,
                g.private_cross - g.joint,
                g.own - g.joint,
                -min(g.private, g.own, u.quantization_loss),
                max(g.joint, u.quantization_loss) - params.R0,
            )
    identities_ok = worst <= tol

    names = ["Y1", "Y2", "Yr", "Yhat"]
    n = 1_000_000
    worst_z = 0.0
    for seed in range(20):
        rng = np.random.default_rng(seed)
        params = random_channel(rng)
        model = build_model(params, etw_split(params), float(10 ** rng.uniform(-2, 2)))
        x = model.sample(rng, n, names)
        empirical = x.T @ x / n
        cov = model.covariance(names)
        se = np.sqrt((np.outer(np.diag(cov), np.diag(cov)) + cov**2) / n)
        worst_z = max(worst_z, float(np.max(np.abs(empirical - cov) / se)))
    mc_ok = worst_z <= 3.0
    record(
        8,
        identities_ok and mc_ok,
        f"largest identity/ordering violation {worst:.2e} over 1000 models; "
        f"largest Monte Carlo deviation {worst_z:.2f} standard errors over 20 models",
    )


def test_criterion_9_degeneration():
    rng = np.random.default_rng(99)
    channels = [curves_channel(0.1, 10)] + [random_channel(rng) for _ in range(50)]
    worst_zero = worst_coarse = 0.0
    for params in channels:
        split = etw_split(params)
        base = no_relay_hk_region(params, split).as_dict()
        zero = hk_ghf_region(params.with_(R0=0.0), split, 1.0).as_dict()
        coarse = hk_ghf_region(params, split, 1e12).as_dict()
        for normal, b in base.items():
            worst_zero = max(worst_zero, abs(zero[normal] - b))
            worst_coarse = max(worst_coarse, abs(coarse[normal] - b))
    record(
        9,
        worst_zero <= 1e-9 and worst_coarse <= 1e-6,
        f"R0=0 deviation {worst_zero:.2e}; q=1e12 deviation {worst_coarse:.2e}",
    )


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
