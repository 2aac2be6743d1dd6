"""Quantizer choices and rate evaluators that treat interference as noise.

Here each user sends a single message at full power; the rate-splitting
regions live in :mod:`relayic.regions`.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .errors import InvalidR0, RelayICError, WynerZivInfeasible
from .gaussmi import build_model, conditional_mi, conditional_variance
from .model import ChannelParams, PowerSplit

WZ_TOL = 1e-9
# Noise variance used for high-SNR limits, relative to the smaller power.
SMALL_NOISE_SCALE = 1e-9


class QuantizerKind(enum.Enum):
    GHF_WEAK = "ghf_weak"
    CF_ORDER1 = "cf_order1"
    CF_ORDER2 = "cf_order2"
    GHF_COMMON_MIN = "ghf_common_min"
    GHF_TIN_MIN = "ghf_tin_min"
    CF_TIN_MAX = "cf_tin_max"
    EXPLICIT = "explicit"


@dataclass(frozen=True)
class QuantizerChoice:
    kind: QuantizerKind
    q: float

    def __post_init__(self) -> None:
        if not (self.q > 0):
            raise RelayICError(f"quantizer variance must be positive, got {self.q!r}")


@dataclass(frozen=True)
class TinRates:
    r1: float
    r2: float
    r1Baseline: float
    r2Baseline: float

    @property
    def improvement1(self) -> float:
        return self.r1 - self.r1Baseline

    @property
    def improvement2(self) -> float:
        return self.r2 - self.r2Baseline

    @property
    def sum_rate(self) -> float:
        return self.r1 + self.r2

    @property
    def sum_improvement(self) -> float:
        return self.improvement1 + self.improvement2


def small_noise(params: ChannelParams, scale: float = SMALL_NOISE_SCALE) -> ChannelParams:
    """The same channel with a tiny noise variance, standing in for the N -> 0 limit."""
    return params.with_(N=scale * min(params.P1, params.P2))


def _wz_denominator(params: ChannelParams) -> float:
    if params.R0 <= 0:
        raise InvalidR0("a Wyner-Ziv quantizer needs a positive relay rate")
    return 2.0 ** (2.0 * params.R0) - 1.0


def quantizer_ghf_weak(params: ChannelParams, split: PowerSplit) -> QuantizerChoice:
    """Quantize just above the level at which private signals reach the relay."""
    q = max(params.N, params.g1**2 * split.pv1, params.g2**2 * split.pv2)
    return QuantizerChoice(QuantizerKind.GHF_WEAK, q)


def _relay_variances(params: ChannelParams, split: PowerSplit, common: bool) -> tuple[float, float]:
    model = build_model(params, split, 0.0)
    if common:
        return (
            conditional_variance(model, "Yr", ["Y1", "W1"]),
            conditional_variance(model, "Yr", ["Y2", "W2"]),
        )
    return conditional_variance(model, "Yr", "Y1"), conditional_variance(model, "Yr", "Y2")


def quantizer_cf_order1(params: ChannelParams, split: PowerSplit) -> QuantizerChoice:
    """Finest quantizer both receivers can reconstruct from their own output."""
    den = _wz_denominator(params)
    return QuantizerChoice(QuantizerKind.CF_ORDER1, max(_relay_variances(params, split, False)) / den)


def quantizer_cf_order2(params: ChannelParams, split: PowerSplit) -> QuantizerChoice:
    """Finest quantizer both receivers can reconstruct after their own common message."""
    den = _wz_denominator(params)
    return QuantizerChoice(QuantizerKind.CF_ORDER2, max(_relay_variances(params, split, True)) / den)


def candidate_quantizers(params: ChannelParams, split: PowerSplit) -> list[QuantizerChoice]:
    """Min and max over the two receivers, with and without own common message known."""
    den = _wz_denominator(params)
    common = _relay_variances(params, split, True)
    plain = _relay_variances(params, split, False)
    return [
        QuantizerChoice(QuantizerKind.GHF_COMMON_MIN, min(common) / den),
        QuantizerChoice(QuantizerKind.CF_ORDER2, max(common) / den),
        QuantizerChoice(QuantizerKind.GHF_TIN_MIN, min(plain) / den),
        QuantizerChoice(QuantizerKind.CF_ORDER1, max(plain) / den),
    ]


def relay_residual_limits(params: ChannelParams) -> tuple[float, float]:
    """High-SNR limits of ``var(Yr | Y1)`` and ``var(Yr | Y2)`` at full power."""
    p = params
    prod = p.P1 * p.P2
    a = (p.g1 * p.h21 - p.g2 * p.h11) ** 2 * prod / (p.h11**2 * p.P1 + p.h21**2 * p.P2)
    b = (p.g1 * p.h22 - p.g2 * p.h12) ** 2 * prod / (p.h12**2 * p.P1 + p.h22**2 * p.P2)
    return a, b


def quantizer_ghf_tin(params: ChannelParams, asymptotic: bool = False) -> QuantizerChoice:
    """Quantizer meeting the tighter receiver's relay-rate constraint with equality.

    With ``asymptotic`` the high-SNR residual variances are used instead of
    the exact ones at the given noise level.
    """
    den = _wz_denominator(params)
    if asymptotic:
        v = relay_residual_limits(params)
    else:
        v = _relay_variances(params, PowerSplit.full_private(params), False)
    return QuantizerChoice(QuantizerKind.GHF_TIN_MIN, min(v) / den)


def quantizer_cf_tin(params: ChannelParams, asymptotic: bool = False) -> QuantizerChoice:
    """Quantizer that both receivers can reconstruct, at full power."""
    den = _wz_denominator(params)
    if asymptotic:
        v = relay_residual_limits(params)
    else:
        v = _relay_variances(params, PowerSplit.full_private(params), False)
    return QuantizerChoice(QuantizerKind.CF_TIN_MAX, max(v) / den)


def _tin_model(params: ChannelParams, q: float, af_lambda: float | None = None):
    return build_model(params, PowerSplit.full_private(params), q, af_lambda)


def tin_baseline(params: ChannelParams) -> tuple[float, float]:
    model = _tin_model(params, 1.0)
    return conditional_mi(model, "X1", "Y1"), conditional_mi(model, "X2", "Y2")


def _check_q(q: float) -> None:
    if not (q > 0 and math.isfinite(q)):
        raise RelayICError(f"quantizer variance must be positive and finite, got {q!r}")


def tin_ghf_rates(params: ChannelParams, q: float) -> TinRates:
    """Hash-and-forward rates: each receiver list-decodes the relay bin jointly."""
    _check_q(q)
    model = _tin_model(params, q)
    r0 = params.R0
    rates = []
    base = []
    for x, y in (("X1", "Y1"), ("X2", "Y2")):
        direct = conditional_mi(model, x, y)
        gain = min(r0, conditional_mi(model, "Yhat", "Yr", y))
        loss = min(r0, conditional_mi(model, "Yhat", "Yr", [x, y]))
        rates.append(direct + gain - loss)
        base.append(direct)
    return TinRates(rates[0], rates[1], base[0], base[1])


def wyner_ziv_rates(params: ChannelParams, q: float) -> tuple[float, float]:
    """``I(Yhat; Yr | Y_i)`` for both receivers: the relay rate each one needs."""
    model = _tin_model(params, q)
    return conditional_mi(model, "Yhat", "Yr", "Y1"), conditional_mi(model, "Yhat", "Yr", "Y2")


def tin_cf_rates(params: ChannelParams, q: float) -> TinRates:
    """Compress-and-forward rates: both receivers first rebuild the quantized observation."""
    _check_q(q)
    need = max(wyner_ziv_rates(params, q))
    if params.R0 < need - WZ_TOL:
        raise WynerZivInfeasible(f"relay rate {params.R0} below the required {need}")
    model = _tin_model(params, q)
    r1 = conditional_mi(model, "X1", ["Y1", "Yhat"])
    r2 = conditional_mi(model, "X2", ["Y2", "Yhat"])
    b1 = conditional_mi(model, "X1", "Y1")
    b2 = conditional_mi(model, "X2", "Y2")
    return TinRates(r1, r2, b1, b2)


def r_delta(params: ChannelParams, q: float) -> float:
    """Mismatch between the relay rates the two receivers need for the same quantizer."""
    _check_q(q)
    w1, w2 = wyner_ziv_rates(params, q)
    return abs(w1 - w2)


def af_gain(params: ChannelParams) -> float:
    """Relay amplification that uses the analog power a rate-``R0`` link supports."""
    p = params
    power = 2.0 ** (2.0 * p.R0) - 1.0
    return math.sqrt(power / (p.g1**2 * p.P1 + p.g2**2 * p.P2 + p.N))


def af_rates(params: ChannelParams) -> TinRates:
    """Amplify-and-forward rates over a unit-noise analog relay link."""
    lam = af_gain(params)
    model = _tin_model(params, 1.0, af_lambda=lam)
    r1 = conditional_mi(model, "X1", ["Y1", "YrAF1"])
    r2 = conditional_mi(model, "X2", ["Y2", "YrAF2"])
    b1 = conditional_mi(model, "X1", "Y1")
    b2 = conditional_mi(model, "X2", "Y2")
    return TinRates(r1, r2, b1, b2)
