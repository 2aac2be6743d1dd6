"""Randomized audit of the constant-gap guarantee for weak interference."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .gaussmi import mi_term_set
from .model import ChannelParams, etw_split, max_admissible_r0
from .regions import constant_gap, hk_polytope, no_relay_hk_region, outer_bound_region, vertices
from .strategies import quantizer_ghf_weak

GAP_BOUND = 0.5 * math.log2(15)
LOSS_BOUND = 0.5 * math.log2(5 / 2)
GAIN_SLACK = 0.5 * math.log2(3)
AUDIT_TOL = 1e-6
TERM_TOL = 1e-9
# Draw at most this many candidates per requested admissible channel.
DRAWS_PER_SAMPLE = 100


@dataclass(frozen=True)
class AuditRegime:
    """Sampling ranges; exponents are drawn uniformly, so gains are log-uniform.

    ``aligned_relay`` makes the relay see the users in the same ratio as
    receiver 1, which leaves no admissible relay rate.
    """

    snr_db_min: float = 10.0
    snr_db_max: float = 60.0
    aligned_relay: bool = False

    @classmethod
    def from_dict(cls, data: dict) -> "AuditRegime":
        allowed = {"snr_db_min", "snr_db_max", "aligned_relay"}
        unknown = set(data) - allowed
        if unknown:
            raise ValueError(f"unknown regime field(s): {', '.join(sorted(unknown))}")
        regime = cls(**data)
        if not regime.snr_db_min <= regime.snr_db_max:
            raise ValueError("snr_db_min must not exceed snr_db_max")
        return regime


@dataclass
class AuditSample:
    params: ChannelParams
    max_r0: float
    gap: float
    loss1: float
    loss2: float
    min_gain_margin: float
    contained: bool


@dataclass
class AuditResult:
    seed: int
    requested: int
    draws: int = 0
    samples: list[AuditSample] = field(default_factory=list)

    @property
    def skipped(self) -> int:
        return self.draws - len(self.samples)

    def gap_violations(self) -> list[int]:
        return [i for i, s in enumerate(self.samples) if s.gap > GAP_BOUND + AUDIT_TOL]

    def loss_violations(self) -> list[int]:
        return [i for i, s in enumerate(self.samples) if max(s.loss1, s.loss2) > LOSS_BOUND + TERM_TOL]

    def gain_violations(self) -> list[int]:
        return [i for i, s in enumerate(self.samples) if s.min_gain_margin < -TERM_TOL]

    def containment_violations(self) -> list[int]:
        return [i for i, s in enumerate(self.samples) if not s.contained]

    @property
    def passed(self) -> bool:
        return not (
            self.gap_violations() or self.loss_violations() or self.gain_violations() or self.containment_violations()
        )

    def summary(self, bins: int = 20) -> dict:
        gaps = [s.gap for s in self.samples]
        counts, edges = np.histogram(gaps, bins=bins, range=(0.0, GAP_BOUND)) if gaps else ([], [])
        return {
            "seed": self.seed,
            "requested": self.requested,
            "draws": self.draws,
            "admissible": len(self.samples),
            "skipped": self.skipped,
            "gapBound": GAP_BOUND,
            "maxDelta": max(gaps) if gaps else None,
            "maxQuantizationLoss": max((max(s.loss1, s.loss2) for s in self.samples), default=None),
            "minRelayGainMargin": min((s.min_gain_margin for s in self.samples), default=None),
            "violations": {
                "gap": self.gap_violations(),
                "quantizationLoss": self.loss_violations(),
                "relayGain": self.gain_violations(),
                "containment": self.containment_violations(),
            },
            "histogram": {"edges": [float(e) for e in edges], "counts": [int(c) for c in counts]},
            "pass": self.passed,
        }


def draw_channel(rng: np.random.Generator, regime: AuditRegime) -> ChannelParams:
    """Weak-interference channel with equal direct SNRs and weaker relay links, R0 = 0."""
    snr = 10 ** (rng.uniform(regime.snr_db_min, regime.snr_db_max) / 10)
    a1, a2, b1, b2 = rng.uniform(0.0, 1.0, size=4)
    signs = rng.choice([-1.0, 1.0], size=4)
    h11 = h22 = math.sqrt(snr)
    h21 = signs[0] * snr ** (a1 / 2)
    h12 = signs[1] * snr ** (a2 / 2)
    g1 = signs[2] * snr ** (b1 / 2)
    g2 = signs[3] * snr ** (b2 / 2)
    if regime.aligned_relay:
        g2 = g1 * h21 / h11
    return ChannelParams(h11=h11, h21=h21, h12=h12, h22=h22, g1=g1, g2=g2, P1=1.0, P2=1.0, N=1.0)


def audit_channel(params: ChannelParams, max_r0: float) -> AuditSample:
    split = etw_split(params)
    q = quantizer_ghf_weak(params, split).q
    terms = mi_term_set(params, split, q)
    inner = hk_polytope(terms)
    outer = outer_bound_region(params)
    report = constant_gap(outer, inner)
    base = no_relay_hk_region(params, split)
    contained = report.contained and all(inner.contains(r1, r2) for r1, r2 in vertices(base))
    floor = params.R0 - GAIN_SLACK
    gains = [u.relay_gain for u in (terms.user1, terms.user2)]
    margin = min(min(g.private_cross, g.joint) for g in gains) - floor
    return AuditSample(
        params=params,
        max_r0=max_r0,
        gap=report.delta,
        loss1=terms.user1.quantization_loss,
        loss2=terms.user2.quantization_loss,
        min_gain_margin=margin,
        contained=contained,
    )


def run_audit(seed: int, count: int, regime: AuditRegime | None = None) -> AuditResult:
    """Audit ``count`` admissible channels, drawing at most 100 candidates per channel.

    A candidate is skipped when no positive relay rate is admissible for it;
    otherwise ``R0`` is drawn uniformly from ``(0, max admissible]``.
    """
    regime = regime or AuditRegime()
    rng = np.random.default_rng(seed)
    result = AuditResult(seed=seed, requested=count)
    while len(result.samples) < count and result.draws < DRAWS_PER_SAMPLE * count:
        result.draws += 1
        params = draw_channel(rng, regime)
        max_r0 = max_admissible_r0(params)
        u = rng.uniform()
        if not max_r0 > 0:
            continue
        params = params.with_(R0=max_r0 * (1.0 - u))
        result.samples.append(audit_channel(params, max_r0))
    return result
