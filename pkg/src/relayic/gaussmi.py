"""Mutual information between linear combinations of independent Gaussians.

A :class:`GaussianModel` lists independent zero-mean latent sources and the
observables built from them.  Every information quantity is computed from the
factor matrix ``F`` whose row for an observable holds
``coefficient * sqrt(variance)`` per latent, so the covariance is ``F F^T``.

Rather than forming covariance determinants, conditional entropies are read
off an orthogonalization of the rows of ``F``: the residual norm of each row
is the standard deviation of that observable given all observables placed
before it.  This keeps full double precision when signal and noise powers
differ by twelve orders of magnitude, and it makes linearly dependent or
zero-variance observables harmless (their residual is zero, so they carry no
entropy and are left out of the basis).
"""

from __future__ import annotations

import io
import math
from dataclasses import astuple, dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import RelayICError, SingularModel
from .model import ChannelParams, PowerSplit

# A residual below this fraction of the observable's own standard deviation
# means the observable is a deterministic function of what precedes it.
DEPENDENCE_TOL = 1e-11
NEGATIVE_MI_TOL = 1e-9


@dataclass(frozen=True)
class LatentSource:
    name: str
    variance: float


@dataclass(frozen=True)
class Observable:
    name: str
    coefficients: Mapping[str, float]


@dataclass(frozen=True)
class GaussianModel:
    latents: tuple[LatentSource, ...]
    observables: tuple[Observable, ...]
    _rows: dict[str, np.ndarray] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        names = [s.name for s in self.latents]
        if len(set(names)) != len(names):
            raise RelayICError("latent names must be unique")
        for s in self.latents:
            if not math.isfinite(s.variance) or s.variance < 0:
                raise RelayICError(f"latent {s.name!r} needs a finite nonnegative variance")
        index = {n: i for i, n in enumerate(names)}
        scale = np.sqrt(np.array([s.variance for s in self.latents], dtype=float))
        rows: dict[str, np.ndarray] = {}
        for obs in self.observables:
            if obs.name in rows:
                raise RelayICError(f"duplicate observable {obs.name!r}")
            row = np.zeros(len(names))
            for latent, coef in obs.coefficients.items():
                if latent not in index:
                    raise RelayICError(f"observable {obs.name!r} references unknown latent {latent!r}")
                row[index[latent]] += coef
            rows[obs.name] = row * scale
        object.__setattr__(self, "_rows", rows)

    @property
    def observable_names(self) -> list[str]:
        return [o.name for o in self.observables]

    def factor(self, names: Sequence[str]) -> np.ndarray:
        """Rows of the factor matrix for ``names`` (shape ``len(names) x latents``)."""
        try:
            return np.array([self._rows[n] for n in names]).reshape(len(names), len(self.latents))
        except KeyError as exc:
            raise RelayICError(f"unknown observable {exc.args[0]!r}") from None

    def covariance(self, names: Sequence[str] | None = None) -> np.ndarray:
        f = self.factor(self.observable_names if names is None else names)
        return f @ f.T

    def covariance_csv(self) -> str:
        """Full observable covariance as CSV, for debugging."""
        names = self.observable_names
        cov = self.covariance(names)
        buf = io.StringIO()
        buf.write("," + ",".join(names) + "\n")
        for name, row in zip(names, cov):
            buf.write(name + "," + ",".join(f"{v:.9g}" for v in row) + "\n")
        return buf.getvalue()

    def sample(self, rng: np.random.Generator, n: int, names: Sequence[str] | None = None) -> np.ndarray:
        """Draw ``n`` joint samples of the observables (shape ``n x len(names)``)."""
        f = self.factor(self.observable_names if names is None else names)
        z = rng.standard_normal((n, len(self.latents)))
        return z @ f.T


def _residual_std(model: GaussianModel, given: Sequence[str], targets: Sequence[str]) -> np.ndarray:
    """Std of each target given ``given`` and the targets listed before it.

    Columns are orthogonalized one at a time (Gram-Schmidt, applied twice for
    stability).  A column that is already determined by the previous ones is
    left out of the basis, which keeps rank-deficient conditioning sets from
    corrupting later residuals as a plain QR factorization would.
    """
    cols = model.factor(list(given) + list(targets))
    basis: list[np.ndarray] = []
    norms = np.zeros(cols.shape[0])
    for i, col in enumerate(cols):
        v = col.astype(float).copy()
        for _ in range(2):
            for u in basis:
                v -= (u @ v) * u
        r = float(np.linalg.norm(v))
        norms[i] = r
        if r > DEPENDENCE_TOL * float(np.linalg.norm(col)):
            basis.append(v / r)
    return norms[len(given):]


def _names(group: Iterable[str] | str) -> list[str]:
    return [group] if isinstance(group, str) else list(group)


def conditional_mi(
    model: GaussianModel,
    a: Iterable[str] | str,
    b: Iterable[str] | str,
    c: Iterable[str] | str = (),
) -> float:
    """``I(A; B | C)`` in bits."""
    a, b, c = _names(a), _names(b), _names(c)
    if not a or not b:
        raise RelayICError("both argument sets must be nonempty")
    if set(a) & set(b) or set(a) & set(c) or set(b) & set(c):
        raise RelayICError("argument and conditioning sets must be disjoint")
    # I(A;B|C) = h(T|C) - h(T|C,O) with T the smaller of the two sets.
    target, other = (a, b) if len(a) <= len(b) else (b, a)
    scale = np.linalg.norm(model.factor(target), axis=1)
    before = _residual_std(model, c, target)
    after = _residual_std(model, c + other, target)
    total = 0.0
    for s, r1, r2 in zip(scale, before, after):
        if s == 0 or r1 <= DEPENDENCE_TOL * s:
            continue
        if r2 <= DEPENDENCE_TOL * s:
            raise SingularModel("mutual information is infinite: target determined by the other set")
        total += math.log2(r1 / r2)
    if total < -NEGATIVE_MI_TOL:
        raise SingularModel(f"negative mutual information {total!r}")
    return max(total, 0.0)


def conditional_variance(model: GaussianModel, target: str, c: Iterable[str] | str = ()) -> float:
    c = _names(c)
    if target in c:
        raise RelayICError("target must not be in the conditioning set")
    scale = float(np.linalg.norm(model.factor([target])))
    (r,) = _residual_std(model, c, [target])
    if r <= DEPENDENCE_TOL * scale:
        return 0.0
    return float(r * r)


def build_model(
    params: ChannelParams,
    split: PowerSplit,
    q: float,
    af_lambda: float | None = None,
) -> GaussianModel:
    """Channel model with the relay's quantized observation ``Yhat = Yr + eta``.

    ``q`` is the variance of ``eta``.  With ``af_lambda`` the model also holds
    ``YrAF1`` and ``YrAF2``, the amplified relay observation seen through an
    independent unit-variance link noise at each receiver.
    """
    if not (q >= 0 and math.isfinite(q)):
        raise RelayICError(f"quantizer variance must be finite and nonnegative, got {q!r}")
    p = params
    latents = [
        LatentSource("W1", split.pw1),
        LatentSource("V1", split.pv1),
        LatentSource("W2", split.pw2),
        LatentSource("V2", split.pv2),
        LatentSource("Z1", p.N),
        LatentSource("Z2", p.N),
        LatentSource("Zr", p.N),
        LatentSource("eta", q),
    ]
    x1 = {"W1": 1.0, "V1": 1.0}
    x2 = {"W2": 1.0, "V2": 1.0}

    def mix(c1: float, c2: float, noise: str) -> dict[str, float]:
        out = {k: c1 * v for k, v in x1.items()}
        out.update({k: c2 * v for k, v in x2.items()})
        out[noise] = 1.0
        return out

    yr = mix(p.g1, p.g2, "Zr")
    observables = [
        Observable("W1", {"W1": 1.0}),
        Observable("V1", {"V1": 1.0}),
        Observable("X1", x1),
        Observable("W2", {"W2": 1.0}),
        Observable("V2", {"V2": 1.0}),
        Observable("X2", x2),
        Observable("Y1", mix(p.h11, p.h21, "Z1")),
        Observable("Y2", mix(p.h12, p.h22, "Z2")),
        Observable("Yr", yr),
        Observable("Yhat", {**yr, "eta": 1.0}),
    ]
    if af_lambda is not None:
        latents += [LatentSource("Zaf1", 1.0), LatentSource("Zaf2", 1.0)]
        scaled = {k: af_lambda * v for k, v in yr.items()}
        observables += [
            Observable("YrAF1", {**scaled, "Zaf1": 1.0}),
            Observable("YrAF2", {**scaled, "Zaf2": 1.0}),
        ]
    return GaussianModel(tuple(latents), tuple(observables))


@dataclass(frozen=True)
class DecodingTerms:
    """One receiver's information about four groups of messages, in bits.

    Each field is the information the receiver's observation carries about a
    message group, given the messages it already knows:

    - ``private``: its own private message, both common messages known.
    - ``own``: its whole own message, the other user's common message known.
    - ``private_cross``: its own private message plus the other user's
      common message, its own common message known.
    - ``joint``: its whole own message plus the other user's common message.
    """

    private: float
    own: float
    private_cross: float
    joint: float

    def shifted(self, gains: "DecodingTerms", loss: float) -> "DecodingTerms":
        """Add a relay gain per group and subtract the quantization loss."""
        return DecodingTerms(
            private=self.private + gains.private - loss,
            own=self.own + gains.own - loss,
            private_cross=self.private_cross + gains.private_cross - loss,
            joint=self.joint + gains.joint - loss,
        )


def hk_terms(model: GaussianModel, user: int, outputs: Sequence[str]) -> DecodingTerms:
    """Rate-splitting terms of one receiver.

    ``outputs`` is what the receiver observes (its channel output, possibly
    joined by the relay's quantized observation).
    """
    own_x, own_w, other_w = ("X1", "W1", "W2") if user == 1 else ("X2", "W2", "W1")
    return DecodingTerms(
        private=conditional_mi(model, outputs, own_x, [own_w, other_w]),
        own=conditional_mi(model, outputs, own_x, other_w),
        private_cross=conditional_mi(model, outputs, [own_x, other_w], own_w),
        joint=conditional_mi(model, outputs, [own_x, other_w]),
    )


def relay_terms(model: GaussianModel, user: int) -> tuple[DecodingTerms, float]:
    """Unclipped relay information for each message group, and the quantization loss.

    Every value is ``I(Yhat; Yr | S)``, where ``S`` is the receiver output
    plus what the receiver knows for that group.  The loss conditions on the
    output, the user's own input and the other user's common message.
    """
    y, own_x, own_w, other_w = ("Y1", "X1", "W1", "W2") if user == 1 else ("Y2", "X2", "W2", "W1")

    def rel(*given: str) -> float:
        return conditional_mi(model, "Yhat", "Yr", list(given))

    gains = DecodingTerms(
        private=rel(y, own_w, other_w),
        own=rel(y, other_w),
        private_cross=rel(y, own_w),
        joint=rel(y),
    )
    return gains, rel(y, own_x, other_w)


@dataclass(frozen=True)
class ReceiverTerms:
    """Channel terms, relay gains clipped at ``R0`` and the clipped quantization loss."""

    channel: DecodingTerms
    relay_gain: DecodingTerms
    quantization_loss: float

    def net(self) -> DecodingTerms:
        return self.channel.shifted(self.relay_gain, self.quantization_loss)


@dataclass(frozen=True)
class MITermSet:
    """Information terms of both receivers for one split and quantizer."""

    user1: ReceiverTerms
    user2: ReceiverTerms

    def without_relay(self) -> "MITermSet":
        zero = DecodingTerms(0.0, 0.0, 0.0, 0.0)
        return MITermSet(
            ReceiverTerms(self.user1.channel, zero, 0.0),
            ReceiverTerms(self.user2.channel, zero, 0.0),
        )


def mi_term_set(params: ChannelParams, split: PowerSplit, q: float) -> MITermSet:
    model = build_model(params, split, q)
    r0 = params.R0

    def receiver(user: int) -> ReceiverTerms:
        gains, loss = relay_terms(model, user)
        clipped = DecodingTerms(*(min(r0, v) for v in astuple(gains)))
        return ReceiverTerms(hk_terms(model, user, [f"Y{user}"]), clipped, min(r0, loss))

    return MITermSet(receiver(1), receiver(2))
