"""Channel parameters and the quantities derived from them, up to the relay-rate cap.

All logarithms are base 2 and every rate is in bits per channel use.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, fields, replace
from typing import Any, Mapping

from .errors import DegenerateChannel, InvalidR0, RelayICError

CONFIG_KEYS = ("h11", "h21", "h12", "h22", "g1", "g2", "P1", "P2", "N", "R0")


@dataclass(frozen=True)
class ChannelParams:
    """Real two-user interference channel with a relay link of rate ``R0``.

    ``h_ij`` is the gain from transmitter i to receiver j and ``g_i`` the gain
    from transmitter i to the relay.
    """

    h11: float
    h21: float
    h12: float
    h22: float
    g1: float
    g2: float
    P1: float
    P2: float
    N: float
    R0: float = 0.0

    def __post_init__(self) -> None:
        for f in fields(self):
            value = getattr(self, f.name)
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                raise RelayICError(f"{f.name} must be a real number, got {value!r}")
            if not math.isfinite(value):
                raise RelayICError(f"{f.name} must be finite, got {value!r}")
        if self.P1 <= 0 or self.P2 <= 0:
            raise RelayICError("transmit powers must be positive")
        if self.N <= 0:
            raise RelayICError("noise variance must be positive")
        if self.R0 < 0:
            raise InvalidR0(f"relay rate must be nonnegative, got {self.R0}")

    def with_(self, **changes: float) -> "ChannelParams":
        return replace(self, **changes)

    def to_dict(self) -> dict[str, float]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "ChannelParams":
        unknown = set(data) - set(CONFIG_KEYS)
        if unknown:
            raise RelayICError(f"unknown channel field(s): {', '.join(sorted(unknown))}")
        missing = [k for k in CONFIG_KEYS[:-1] if k not in data]
        if missing:
            raise RelayICError(f"missing channel field(s): {', '.join(missing)}")
        values = {}
        for key in CONFIG_KEYS:
            if key not in data:
                continue
            raw = data[key]
            if not isinstance(raw, (int, float)) or isinstance(raw, bool):
                raise RelayICError(f"field {key!r} must be a number, got {raw!r}")
            values[key] = float(raw)
        return cls(**values)

    @classmethod
    def from_json(cls, text: str) -> "ChannelParams":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class LinkBudget:
    """Linear SNR/INR ratios and their exponents relative to the direct SNR.

    An exponent is ``None`` when the direct SNR is at most 1 or the ratio it
    measures is zero.
    """

    snr1: float
    snr2: float
    inr1: float
    inr2: float
    snrR1: float
    snrR2: float
    alpha1: float | None
    alpha2: float | None
    beta1: float | None
    beta2: float | None


@dataclass(frozen=True)
class PowerSplit:
    """Private (``pv``) and common (``pw``) power of each transmitter."""

    pv1: float
    pw1: float
    pv2: float
    pw2: float

    def __post_init__(self) -> None:
        for f in fields(self):
            if getattr(self, f.name) < 0:
                raise RelayICError(f"{f.name} must be nonnegative")

    @classmethod
    def full_private(cls, params: ChannelParams) -> "PowerSplit":
        """All power on the private message: no common part at all."""
        return cls(pv1=params.P1, pw1=0.0, pv2=params.P2, pw2=0.0)


def _exponent(ratio: float, snr: float) -> float | None:
    if snr <= 1.0 or ratio <= 0.0:
        return None
    return math.log2(ratio) / math.log2(snr)


def link_budget(params: ChannelParams) -> LinkBudget:
    p = params
    snr1 = p.P1 * p.h11**2 / p.N
    snr2 = p.P2 * p.h22**2 / p.N
    inr1 = p.P2 * p.h21**2 / p.N
    inr2 = p.P1 * p.h12**2 / p.N
    snr_r1 = p.P1 * p.g1**2 / p.N
    snr_r2 = p.P2 * p.g2**2 / p.N
    return LinkBudget(
        snr1=snr1,
        snr2=snr2,
        inr1=inr1,
        inr2=inr2,
        snrR1=snr_r1,
        snrR2=snr_r2,
        alpha1=_exponent(inr1, snr1),
        alpha2=_exponent(inr2, snr2),
        beta1=_exponent(snr_r1, snr1),
        beta2=_exponent(snr_r2, snr2),
    )


def etw_split(params: ChannelParams) -> PowerSplit:
    """Put each private signal at the noise floor of the unintended receiver.

    The private power is capped at the total power, so a user whose
    interference is already below the noise floor sends everything privately.
    """
    p = params
    cross1, cross2 = p.h12**2, p.h21**2
    pv1 = p.P1 if cross1 == 0 else min(p.P1, p.N / cross1)
    pv2 = p.P2 if cross2 == 0 else min(p.P2, p.N / cross2)
    return PowerSplit(pv1=pv1, pw1=p.P1 - pv1, pv2=pv2, pw2=p.P2 - pv2)


def theta_params(params: ChannelParams) -> tuple[float, float, float]:
    """Squared misalignment between the relay view and each direct link.

    Returns ``(theta1, theta2, min(theta1, theta2))``; a zero value means the
    relay observes user 1 and user 2 in the same ratio as one receiver does.
    """
    p = params
    if p.h11 == 0 or p.h22 == 0:
        raise DegenerateChannel("direct gains h11 and h22 must be nonzero")
    scale = p.h11 * p.h22
    theta1 = ((p.g1 * p.h21 - p.g2 * p.h11) / scale) ** 2
    theta2 = ((p.g2 * p.h12 - p.g1 * p.h22) / scale) ** 2
    return theta1, theta2, min(theta1, theta2)


def _log2(x: float) -> float:
    if x <= 0:
        return -math.inf
    if math.isinf(x):
        return math.inf
    return math.log2(x)


def _log2_ratio(num: float, den: float) -> float:
    if num <= 0:
        return -math.inf
    if den <= 0:
        return math.inf
    return math.log2(num) - math.log2(den)


def r0_admissible_terms(params: ChannelParams) -> list[float]:
    """The six logarithmic terms whose minimum, halved, caps the relay rate.

    ``SNR`` is the smaller of the two direct SNRs (the guarantee assumes they
    are equal).
    """
    lb = link_budget(params)
    _, _, theta = theta_params(params)
    snr = min(lb.snr1, lb.snr2)
    log_snr = _log2(snr)
    log_theta = _log2(theta)
    return [
        log_snr + log_theta,
        log_snr + _log2_ratio(lb.inr2, lb.snrR1) + log_theta,
        log_snr + _log2_ratio(lb.inr1, lb.snrR2) + log_theta,
        _log2_ratio(snr, lb.inr1) + _log2_ratio(snr, lb.inr2) + log_theta,
        _log2_ratio(snr, lb.inr1) + _log2_ratio(snr, lb.snrR1) + log_theta,
        _log2_ratio(snr, lb.inr2) + _log2_ratio(snr, lb.snrR2) + log_theta,
    ]


def max_admissible_r0(params: ChannelParams) -> float:
    terms = r0_admissible_terms(params)
    if any(math.isnan(t) for t in terms):
        return -math.inf
    return 0.5 * min(terms)


def r0_admissible(params: ChannelParams) -> tuple[bool, float]:
    """Whether ``params.R0`` lies under the relay-rate cap, and the cap itself.

    ``R0 = 0`` is accepted whenever the cap is nonnegative.
    """
    max_r0 = max_admissible_r0(params)
    if params.R0 == 0:
        return max_r0 >= 0, max_r0
    return params.R0 <= max_r0, max_r0
