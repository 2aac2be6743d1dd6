"""High-SNR sum-rate exponents (GDoF) and their finite-SNR verification.

Cross links scale as ``INR_i = SNR**alpha_i`` and the relay rate as
``R0 = rho/2 * log2(SNR)``.  Every exponent ``d`` is a sum rate in units of
``1/2 * log2(SNR)``, so a point-to-point link has ``d = 1`` and the
interference-free pair ``d = 2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

from .errors import DomainError, RelayICError
from .model import ChannelParams, etw_split
from .regions import (
    cf_rates_order2,
    cf_region_order1,
    hk_ghf_region,
    no_relay_hk_region,
    sum_rate,
)
from .strategies import quantizer_cf_order1, quantizer_cf_order2, quantizer_ghf_weak

BOUNDARY_TOL = 1e-12
SLOPE_TOL = 0.05


def _pos(x: float) -> float:
    return max(x, 0.0)


def _check_alpha(*alphas: float) -> None:
    for a in alphas:
        if not 0.0 < a < 1.0:
            raise DomainError(f"interference exponent must lie in (0, 1), got {a!r}")


def _check_rho(rho: float) -> None:
    if not rho >= 0.0:
        raise DomainError(f"relay exponent must be nonnegative, got {rho!r}")


@dataclass(frozen=True)
class GdofPoint:
    alpha1: float
    alpha2: float
    rho: float
    d: float


def ghf_sum_gdof(alpha1: float, alpha2: float, rho: float) -> float:
    """Sum-rate exponent of rate splitting with hash-and-forward at the relay."""
    _check_alpha(alpha1, alpha2)
    _check_rho(rho)
    m = min(rho, alpha1, alpha2)
    return min(
        (2 - alpha1) + m,
        (2 - alpha2) + m,
        max(alpha1 + alpha2, 2 - alpha1 - alpha2) + 2 * min(rho, alpha1, alpha2, 1 - alpha1, 1 - alpha2),
    )


def ghf_sym_sum_gdof(alpha: float, rho: float) -> float:
    _check_alpha(alpha)
    _check_rho(rho)
    return min(
        (2 - alpha) + min(rho, alpha),
        2 * max(alpha, 1 - alpha) + 2 * min(rho, alpha, 1 - alpha),
    )


def cf_order1_sym_sum_gdof(alpha: float, rho: float) -> float:
    """Compress-and-forward where the relay signal is rebuilt before any message."""
    _check_alpha(alpha)
    _check_rho(rho)
    return min(
        (2 - alpha) + min(rho, alpha),
        2 * max(alpha, 1 - alpha) + 2 * _pos(rho + 1 - max(1.0, 2 * alpha)) - 2 * _pos(rho - alpha),
    )


def cf_order2_sym_sum_gdof(alpha: float, rho: float) -> float:
    """Compress-and-forward where the relay signal is rebuilt after the own common message."""
    _check_alpha(alpha)
    _check_rho(rho)
    return min(
        4 * (1 - alpha),
        2 * max(alpha, 1 - alpha) + 2 * rho - 2 * _pos(rho - min(alpha, 1 - alpha)),
    )


def rho_limit(alpha1: float, alpha2: float) -> float:
    """Largest relay exponent covered by the constant-gap guarantee as the relay view nears full strength."""
    _check_alpha(alpha1, alpha2)
    return min(alpha1, alpha2, 1 - alpha1, 1 - alpha2)


def regime_label(alpha1: float, alpha2: float) -> str:
    """``gain-2`` where each relayed bit adds two bits of sum rate, else ``gain-1``.

    Points on either dividing line (within 1e-12) are ``boundary``; points
    outside the open unit square are ``outside``.
    """
    if not (0.0 < alpha1 < 1.0 and 0.0 < alpha2 < 1.0):
        return "outside"
    s1 = alpha1 + 2 * alpha2 - 2
    s2 = 2 * alpha1 + alpha2 - 2
    if abs(s1) <= BOUNDARY_TOL or abs(s2) <= BOUNDARY_TOL:
        if s1 <= BOUNDARY_TOL and s2 <= BOUNDARY_TOL:
            return "boundary"
        return "gain-1"
    return "gain-2" if s1 < 0 and s2 < 0 else "gain-1"


def regime_map(alpha1_values: Sequence[float], alpha2_values: Sequence[float]) -> list[tuple[float, float, str]]:
    """Row-major labels over the grid (``alpha1`` varies slowest)."""
    return [(a1, a2, regime_label(a1, a2)) for a1 in alpha1_values for a2 in alpha2_values]


SYM_FORMULAS: dict[str, Callable[[float, float], float]] = {
    "ghf": ghf_sym_sum_gdof,
    "cf1": cf_order1_sym_sum_gdof,
    "cf2": cf_order2_sym_sum_gdof,
}


def gdof_map_rows(alphas: Sequence[float], rho: float) -> list[dict[str, float | str]]:
    """Symmetric GDoF of every strategy plus the hash-and-forward gain per relayed bit."""
    rows: list[dict[str, float | str]] = []
    for a1 in alphas:
        for a2 in alphas:
            if a1 == a2:
                d_ghf = ghf_sym_sum_gdof(a1, rho)
                d_cf1 = cf_order1_sym_sum_gdof(a1, rho)
                d_cf2 = cf_order2_sym_sum_gdof(a1, rho)
            else:
                # The compress-and-forward exponents are only known for symmetric channels.
                d_ghf = ghf_sum_gdof(a1, a2, rho)
                d_cf1 = d_cf2 = math.nan
            base = ghf_sum_gdof(a1, a2, 0.0)
            gain = (d_ghf - base) / rho if rho > 0 else math.nan
            rows.append(
                {
                    "alpha1": a1,
                    "alpha2": a2,
                    "rho": rho,
                    "d_ghf": d_ghf,
                    "d_cf1": d_cf1,
                    "d_cf2": d_cf2,
                    "gain_per_bit": gain,
                    "label": regime_label(a1, a2),
                }
            )
    return rows


DEFAULT_TEMPLATE = ChannelParams(h11=1.0, h21=1.0, h12=1.0, h22=1.0, g1=0.9, g2=0.9, P1=1.0, P2=1.0, N=1.0)


def scaled_channel(template: ChannelParams, alpha: float, rho: float, snr: float) -> ChannelParams:
    """Rescale ``template`` so each direct SNR is ``snr`` and each INR is ``snr**alpha``.

    The template supplies the direct and relay gains along with the noise
    level.  Powers are chosen to hit the target SNR, so relay SNRs grow with
    ``snr`` at the template's relay-to-direct gain ratio.  ``R0`` becomes
    ``rho/2 * log2(snr)``.
    """
    t = template
    if t.h11 == 0 or t.h22 == 0:
        raise RelayICError("template needs nonzero direct gains")
    p1 = snr * t.N / t.h11**2
    p2 = snr * t.N / t.h22**2
    cross = snr ** ((alpha - 1) / 2)
    return t.with_(
        h21=t.h11 * cross * math.sqrt(p1 / p2),
        h12=t.h22 * cross * math.sqrt(p2 / p1),
        P1=p1,
        P2=p2,
        R0=0.5 * rho * math.log2(snr),
    )


def finite_snr_sum_rate(params: ChannelParams, strategy: str) -> float:
    """Sum rate of a strategy with its standard power split and quantizer."""
    split = etw_split(params)
    if strategy == "baseline" or (params.R0 == 0 and strategy in ("cf1", "cf2")):
        return sum_rate(no_relay_hk_region(params, split))
    if strategy == "ghf":
        return sum_rate(hk_ghf_region(params, split, quantizer_ghf_weak(params, split).q))
    if strategy == "cf1":
        return sum_rate(cf_region_order1(params, split, quantizer_cf_order1(params, split).q))
    if strategy == "cf2":
        return sum_rate(cf_rates_order2(params, split, quantizer_cf_order2(params, split).q))
    raise RelayICError(f"unknown strategy {strategy!r}")


def gdof_slope_check(
    template: ChannelParams,
    alpha: float,
    rho: float,
    snr_list: Sequence[float],
    strategy: str = "ghf",
    gain_only: bool = False,
    tol: float = SLOPE_TOL,
) -> tuple[float, float, bool]:
    """Compare the finite-SNR growth of a sum rate with its predicted exponent.

    The slope is the change in sum rate between the smallest and largest SNR
    divided by the change in ``1/2 * log2(SNR)``.  With ``gain_only`` the
    no-relay sum rate is subtracted first and the prediction is the relay's
    contribution to the exponent.
    """
    if strategy not in SYM_FORMULAS:
        raise RelayICError(f"unknown strategy {strategy!r}")
    if len(snr_list) < 2 or list(snr_list) != sorted(snr_list) or snr_list[0] < 1e6:
        raise RelayICError("need at least two ascending SNR values, all at least 1e6")
    formula = SYM_FORMULAS[strategy]
    predicted = formula(alpha, rho)
    if gain_only:
        predicted -= formula(alpha, 0.0)

    def value(snr: float) -> float:
        params = scaled_channel(template, alpha, rho, snr)
        rate = finite_snr_sum_rate(params, strategy)
        if gain_only:
            rate -= finite_snr_sum_rate(params, "baseline")
        return rate

    lo, hi = snr_list[0], snr_list[-1]
    slope = (value(hi) - value(lo)) / (0.5 * math.log2(hi) - 0.5 * math.log2(lo))
    return slope, predicted, abs(slope - predicted) <= tol
