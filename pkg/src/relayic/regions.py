"""Two-dimensional rate polytopes and the achievable and outer regions built from them."""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import EmptyRegion, RegimeViolation, RelayICError, WynerZivInfeasible
from .gaussmi import DecodingTerms, MITermSet, build_model, conditional_mi, hk_terms, mi_term_set
from .model import ChannelParams, PowerSplit, link_budget

NORMALS: tuple[tuple[int, int], ...] = ((1, 0), (0, 1), (1, 1), (2, 1), (1, 2))
FEASIBILITY_TOL = 1e-12
CONTAINMENT_TOL = 1e-9
WZ_TOL = 1e-9


@dataclass(frozen=True)
class RatePolytope:
    """``{(R1, R2) >= 0 : c1*R1 + c2*R2 <= b}`` with at most one bound per normal."""

    constraints: tuple[tuple[int, int, float], ...]

    @classmethod
    def from_bounds(cls, bounds: Iterable[tuple[int, int, float]]) -> "RatePolytope":
        best: dict[tuple[int, int], float] = {}
        for c1, c2, b in bounds:
            normal = (int(c1), int(c2))
            if normal not in NORMALS:
                raise RelayICError(f"normal {normal} is not in the supported family")
            b = float(b)
            if not math.isfinite(b):
                raise RelayICError(f"bound for normal {normal} is not finite")
            best[normal] = min(b, best.get(normal, math.inf))
        return cls(tuple((c1, c2, best[(c1, c2)]) for c1, c2 in NORMALS if (c1, c2) in best))

    def bound(self, c1: int, c2: int) -> float | None:
        for n1, n2, b in self.constraints:
            if (n1, n2) == (c1, c2):
                return b
        return None

    def as_dict(self) -> dict[tuple[int, int], float]:
        return {(c1, c2): b for c1, c2, b in self.constraints}

    def contains(self, r1: float, r2: float, tol: float = CONTAINMENT_TOL) -> bool:
        if r1 < -tol or r2 < -tol:
            return False
        return all(c1 * r1 + c2 * r2 <= b + tol for c1, c2, b in self.constraints)

    def to_json(self) -> str:
        return json.dumps({"constraints": [{"c1": c1, "c2": c2, "b": b} for c1, c2, b in self.constraints]})

    @classmethod
    def from_json(cls, text: str) -> "RatePolytope":
        data = json.loads(text)
        try:
            return cls.from_bounds((c["c1"], c["c2"], c["b"]) for c in data["constraints"])
        except (KeyError, TypeError) as exc:
            raise RelayICError(f"malformed polytope JSON: {exc}") from None


@dataclass(frozen=True)
class GapReport:
    perConstraintGap: dict[tuple[int, int], float]
    delta: float
    contained: bool


def vertices(poly: RatePolytope) -> list[tuple[float, float]]:
    """Corner points of the polytope, including those on the axes."""
    if any(b < -FEASIBILITY_TOL for _, _, b in poly.constraints):
        raise EmptyRegion("some bound is negative, so not even the origin is feasible")
    lines = [(float(c1), float(c2), b) for c1, c2, b in poly.constraints]
    lines += [(1.0, 0.0, 0.0), (0.0, 1.0, 0.0)]  # the axes R1 = 0 and R2 = 0
    points: set[tuple[float, float]] = set()
    for (a1, a2, b), (c1, c2, d) in itertools.combinations(lines, 2):
        det = a1 * c2 - a2 * c1
        if det == 0:
            continue
        r1 = (b * c2 - a2 * d) / det
        r2 = (a1 * d - b * c1) / det
        scale = 1.0 + abs(r1) + abs(r2)
        r1 = 0.0 if abs(r1) <= FEASIBILITY_TOL * scale else r1
        r2 = 0.0 if abs(r2) <= FEASIBILITY_TOL * scale else r2
        if poly.contains(r1, r2, FEASIBILITY_TOL * scale):
            points.add((r1, r2))
    return sorted(points)


def max_weighted_sum(poly: RatePolytope, w1: float, w2: float) -> tuple[float, tuple[float, float]]:
    """Maximize ``w1*R1 + w2*R2``; ties go to the lexicographically largest vertex."""
    if w1 < 0 or w2 < 0 or (w1 == 0 and w2 == 0):
        raise RelayICError("weights must be nonnegative and not both zero")
    bounded1 = any(c1 > 0 for c1, _, _ in poly.constraints)
    bounded2 = any(c2 > 0 for _, c2, _ in poly.constraints)
    if (w1 > 0 and not bounded1) or (w2 > 0 and not bounded2):
        raise RelayICError("objective is unbounded over this polytope")
    pts = vertices(poly)
    values = [w1 * r1 + w2 * r2 for r1, r2 in pts]
    best = max(values)
    tol = FEASIBILITY_TOL * max(1.0, abs(best))
    vertex = max(p for p, v in zip(pts, values) if v >= best - tol)
    return best, vertex


def sum_rate(poly: RatePolytope) -> float:
    return max_weighted_sum(poly, 1.0, 1.0)[0]


def constant_gap(outer: RatePolytope, inner: RatePolytope) -> GapReport:
    """Bound-by-bound distance between two polytopes over their shared normals."""
    ob, ib = outer.as_dict(), inner.as_dict()
    gaps = {n: ob[n] - ib[n] for n in NORMALS if n in ob and n in ib}
    delta = max((g / (n[0] + n[1]) for n, g in gaps.items()), default=0.0)
    contained = all(outer.contains(r1, r2) for r1, r2 in vertices(inner))
    return GapReport(perConstraintGap=gaps, delta=delta, contained=contained)


def hk_polytope(t: MITermSet) -> RatePolytope:
    """The seven rate-splitting bounds with relay gains and quantization losses."""
    return _plain_hk(t.user1.net(), t.user2.net())


def hk_ghf_region(params: ChannelParams, split: PowerSplit, q: float) -> RatePolytope:
    """Rate splitting at the sources with hash-and-forward at the relay, for one split."""
    return hk_polytope(mi_term_set(params, split, q))


def time_sharing_splits(params: ChannelParams, split: PowerSplit) -> list[PowerSplit]:
    """The split itself, then the same split with user 1's or user 2's common part removed."""
    return [
        split,
        PowerSplit(pv1=params.P1, pw1=0.0, pv2=split.pv2, pw2=split.pw2),
        PowerSplit(pv1=split.pv1, pw1=split.pw1, pv2=params.P2, pw2=0.0),
    ]


def hk_ghf_union_regions(params: ChannelParams, split: PowerSplit, q: float) -> list[RatePolytope]:
    """One achievable polytope per split of :func:`time_sharing_splits`.

    Their union (and its convex hull) is achievable; the polytope built from
    the largest bound per normal is not, so the members are kept separate.
    """
    return [hk_ghf_region(params, s, q) for s in time_sharing_splits(params, split)]


def max_weighted_sum_union(polys: Sequence[RatePolytope], w1: float, w2: float) -> tuple[float, tuple[float, float]]:
    """Best weighted sum over a union (equivalently its convex hull) of polytopes."""
    results = [max_weighted_sum(p, w1, w2) for p in polys]
    best = max(v for v, _ in results)
    tol = FEASIBILITY_TOL * max(1.0, abs(best))
    return best, max(vx for v, vx in results if v >= best - tol)


def no_relay_hk_region(params: ChannelParams, split: PowerSplit) -> RatePolytope:
    model = build_model(params, split, 1.0)
    return _plain_hk(hk_terms(model, 1, ["Y1"]), hk_terms(model, 2, ["Y2"]))


def _plain_hk(u1: DecodingTerms, u2: DecodingTerms) -> RatePolytope:
    return RatePolytope.from_bounds(
        [
            (1, 0, u1.own),
            (0, 1, u2.own),
            (1, 1, u1.private + u2.joint),
            (1, 1, u1.joint + u2.private),
            (1, 1, u1.private_cross + u2.private_cross),
            (2, 1, u1.private + u1.joint + u2.private_cross),
            (1, 2, u1.private_cross + u2.private + u2.joint),
        ]
    )


def outer_bound_region(params: ChannelParams, alternate_pairing: bool = False) -> RatePolytope:
    """Genie-aided outer bound for weak interference.

    ``alternate_pairing`` swaps which interference level enters each sum
    bound, reproducing a second published form of the same bound.
    """
    lb = link_budget(params)
    if not (lb.inr1 < lb.snr1 and lb.inr2 < lb.snr2):
        raise RegimeViolation("the outer bound needs INR_i < SNR_i for both users")
    s1, s2, i1, i2 = lb.snr1, lb.snr2, lb.inr1, lb.inr2
    r0 = params.R0

    def c(x: float) -> float:
        return 0.5 * math.log2(x)

    k1 = c((1 + s1 + lb.snrR1) / (1 + s1))
    k2 = c((1 + s2 + lb.snrR2) / (1 + s2))
    if alternate_pairing:
        # Every INR trades places except in the two ratio terms of the weighted bounds.
        i1, i2 = i2, i1
    bounds = [
        (1, 0, c(1 + s1) + k1),
        (0, 1, c(1 + s2) + k2),
        (1, 1, c(1 + s1) + c(1 + s2 / (1 + i2)) + r0 + k1),
        (1, 1, c(1 + s2) + c(1 + s1 / (1 + i1)) + r0 + k2),
        (1, 1, c(1 + i1 + s1 / (1 + i2)) + c(1 + i2 + s2 / (1 + i1)) + 2 * r0),
        (2, 1, c(1 + s1 + i1) + c(1 + i2 + s2 / (1 + i1)) + c((1 + s1) / (1 + lb.inr2)) + 2 * r0 + k1),
        (1, 2, c(1 + s2 + i2) + c(1 + i1 + s1 / (1 + i2)) + c((1 + s2) / (1 + lb.inr1)) + 2 * r0 + k2),
    ]
    return RatePolytope.from_bounds(bounds)


def relay_rate_needed(params: ChannelParams, split: PowerSplit, q: float, common: bool) -> tuple[float, float]:
    """Relay rate each receiver needs to rebuild the quantized observation.

    With ``common`` the receiver already knows its own common message.
    """
    model = build_model(params, split, q)
    s1 = ["Y1", "W1"] if common else ["Y1"]
    s2 = ["Y2", "W2"] if common else ["Y2"]
    return conditional_mi(model, "Yhat", "Yr", s1), conditional_mi(model, "Yhat", "Yr", s2)


def _check_wyner_ziv(params: ChannelParams, needed: tuple[float, float]) -> None:
    need = max(needed)
    if params.R0 < need - WZ_TOL:
        raise WynerZivInfeasible(f"relay rate {params.R0} below the required {need}")


def cf_region_order1(params: ChannelParams, split: PowerSplit, q: float) -> RatePolytope:
    """Compress-and-forward where each receiver rebuilds the relay signal first."""
    _check_wyner_ziv(params, relay_rate_needed(params, split, q, common=False))
    model = build_model(params, split, q)
    return _plain_hk(hk_terms(model, 1, ["Y1", "Yhat"]), hk_terms(model, 2, ["Y2", "Yhat"]))


def cf_rates_order2(
    params: ChannelParams,
    split: PowerSplit,
    q: float,
    private_uses_relay: bool = False,
) -> RatePolytope:
    """Compress-and-forward decoded after the receiver's own common message.

    Receiver 1 decodes W1, then the relay signal, then W2, then its private
    message, each step on its own; receiver 2 mirrors this.  By default the
    private message is decoded from the channel output alone;
    ``private_uses_relay`` lets it use the rebuilt relay signal as well.
    """
    _check_wyner_ziv(params, relay_rate_needed(params, split, q, common=True))
    m = build_model(params, split, q)
    relay1 = ["Y1", "Yhat"] if private_uses_relay else ["Y1"]
    relay2 = ["Y2", "Yhat"] if private_uses_relay else ["Y2"]
    # Split-rate variables are ordered (S1, T1, S2, T2): private then common.
    upper = [
        ((1, 0, 0, 0), conditional_mi(m, relay1, "X1", ["W1", "W2"])),
        ((0, 1, 0, 0), conditional_mi(m, "Y1", "W1")),
        ((0, 0, 0, 1), conditional_mi(m, ["Y1", "Yhat"], "W2", "W1")),
        ((0, 0, 1, 0), conditional_mi(m, relay2, "X2", ["W1", "W2"])),
        ((0, 0, 0, 1), conditional_mi(m, "Y2", "W2")),
        ((0, 1, 0, 0), conditional_mi(m, ["Y2", "Yhat"], "W1", "W2")),
    ]
    return project_split_rates(upper)


def project_split_rates(upper: Sequence[tuple[Sequence[float], float]]) -> RatePolytope:
    """Project ``{x >= 0 : a.x <= b}`` over (S1, T1, S2, T2) onto (S1+T1, S2+T2).

    Every vertex is found by solving each choice of four binding constraints;
    the bound per normal is the largest value any projected vertex reaches.
    """
    rows = [np.asarray(a, dtype=float) for a, _ in upper] + list(np.eye(4) * -1.0)
    rhs = [float(b) for _, b in upper] + [0.0] * 4
    a_mat = np.array(rows)
    b_vec = np.array(rhs)
    projected = []
    for combo in itertools.combinations(range(len(rows)), 4):
        sub = a_mat[list(combo)]
        if abs(np.linalg.det(sub)) < 1e-12:
            continue
        x = np.linalg.solve(sub, b_vec[list(combo)])
        if np.all(a_mat @ x <= b_vec + 1e-9 * (1 + np.abs(b_vec))):
            projected.append((x[0] + x[1], x[2] + x[3]))
    if not projected:
        raise EmptyRegion("split-rate constraints admit no nonnegative point")
    return RatePolytope.from_bounds((c1, c2, max(c1 * r1 + c2 * r2 for r1, r2 in projected)) for c1, c2 in NORMALS)
