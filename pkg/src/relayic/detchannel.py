"""Linear deterministic interference channel with a digital relay, over GF(2).

Each transmitter sends a vector of bit levels, most significant first.  A
link of strength ``n`` delivers the top ``n`` levels of its input, shifted so
the input's top level lands ``n_max - n`` levels below the receiver's top,
where ``n_max`` is the strongest link into that receiver.  Signals add by XOR.
The relay sees its own such superposition and sends ``r0bits`` linear
functions of it to both receivers over an error-free link.

GF(2) vectors are Python ints: bit ``i`` is coordinate ``i``.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import asdict, dataclass, field
from importlib import resources
from typing import Iterator, Sequence

from .errors import DimensionMismatch, RelayICError, SearchBudgetExceeded

MAX_LEVELS = 32
DEFAULT_BUDGET = 5_000_000


@dataclass(frozen=True)
class DetChannelParams:
    n11: int
    n21: int
    n12: int
    n22: int
    nr1: int
    nr2: int
    r0bits: int = 0

    def __post_init__(self) -> None:
        for name, value in asdict(self).items():
            if not isinstance(value, int) or value < 0 or value > MAX_LEVELS:
                raise RelayICError(f"{name} must be an integer in [0, {MAX_LEVELS}], got {value!r}")

    @property
    def tx_levels(self) -> tuple[int, int]:
        """Number of levels each transmitter controls (its strongest outgoing link)."""
        return max(self.n11, self.n12, self.nr1), max(self.n22, self.n21, self.nr2)

    @property
    def rx_levels(self) -> tuple[int, int, int]:
        """Levels observed at each receiver, then at the relay."""
        return max(self.n11, self.n21), max(self.n12, self.n22), max(self.nr1, self.nr2)


@dataclass(frozen=True)
class DetScheme:
    """Encoders map message bits to transmit levels; ``relay_map`` maps relay levels to relay bits.

    ``enc1`` has one row per transmit level of user 1 and ``k1`` columns;
    ``relay_map`` has one row per relay bit and one column per relay level.
    """

    k1: int
    k2: int
    enc1: tuple[tuple[int, ...], ...]
    enc2: tuple[tuple[int, ...], ...]
    relay_map: tuple[tuple[int, ...], ...] = field(default_factory=tuple)

    @classmethod
    def from_lists(cls, k1: int, k2: int, enc1, enc2, relay_map=()) -> "DetScheme":
        return cls(k1, k2, _freeze(enc1), _freeze(enc2), _freeze(relay_map))


def _freeze(matrix) -> tuple[tuple[int, ...], ...]:
    return tuple(tuple(int(v) for v in row) for row in matrix)


def gf2_rank(rows: Sequence[int]) -> int:
    """Rank over GF(2) of vectors given as int bitmasks."""
    basis: list[int] = []
    for row in rows:
        for b in basis:
            row = min(row, row ^ b)
        if row:
            basis.append(row)
    return len(basis)


def _link_map(strength: int, tx_len: int, rx_len: int) -> list[int]:
    """For each receiver level, the bitmask of transmit levels landing on it."""
    out = [0] * rx_len
    for j in range(strength):
        out[j + rx_len - strength] |= 1 << j
    assert tx_len >= strength
    return out


def _columns_to_masks(matrix: Sequence[Sequence[int]], n_rows: int, n_cols: int, what: str) -> list[int]:
    if len(matrix) != n_rows or any(len(r) != n_cols for r in matrix):
        raise DimensionMismatch(f"{what} must be {n_rows}x{n_cols}")
    if any(v not in (0, 1) for r in matrix for v in r):
        raise DimensionMismatch(f"{what} entries must be 0 or 1")
    return [sum(matrix[i][c] << i for i in range(n_rows)) for c in range(n_cols)]


def _apply(link: list[int], vector: int) -> int:
    """Image of a transmit vector under a link, as a receiver-level bitmask."""
    out = 0
    for level, mask in enumerate(link):
        if bin(mask & vector).count("1") & 1:
            out |= 1 << level
    return out


class _Observation:
    """Linear map from (user-1 vector, user-2 vector) to what one node sees."""

    def __init__(self, params: DetChannelParams, node: int):
        l1, l2 = params.tx_levels
        rx = params.rx_levels[node]
        strengths = [(params.n11, params.n21), (params.n12, params.n22), (params.nr1, params.nr2)][node]
        self.maps = (_link_map(strengths[0], l1, rx), _link_map(strengths[1], l2, rx))
        self.size = rx

    def images(self, user: int, vectors: Sequence[int]) -> list[int]:
        return [_apply(self.maps[user], v) for v in vectors]


def _relay_images(relay_obs: _Observation, relay_rows: Sequence[int], user: int, vectors: Sequence[int]) -> list[int]:
    out = []
    for img in relay_obs.images(user, vectors):
        bits = 0
        for i, row in enumerate(relay_rows):
            if bin(row & img).count("1") & 1:
                bits |= 1 << i
        out.append(bits)
    return out


def _decodable(own: list[int], other: list[int]) -> bool:
    """Own message is recoverable iff its images are independent of everything else."""
    return gf2_rank(own + other) == len(own) + gf2_rank(other)


class _Evaluator:
    """Decodability of encoder column spaces for a fixed channel."""

    def __init__(self, params: DetChannelParams):
        self.params = params
        self.obs = [_Observation(params, node) for node in range(3)]
        self.rx_sizes = [self.obs[0].size, self.obs[1].size]

    def decodable(self, cols1: Sequence[int], cols2: Sequence[int], relay_rows: Sequence[int]) -> tuple[bool, bool]:
        result = []
        for node in (0, 1):
            shift = self.rx_sizes[node]
            per_user = []
            for user, cols in ((0, cols1), (1, cols2)):
                direct = self.obs[node].images(user, cols)
                relayed = _relay_images(self.obs[2], relay_rows, user, cols)
                per_user.append([d | (r << shift) for d, r in zip(direct, relayed)])
            own, other = per_user[node], per_user[1 - node]
            result.append(_decodable(own, other))
        return result[0], result[1]


def simulate(params: DetChannelParams, scheme: DetScheme) -> tuple[bool, bool]:
    """Whether each receiver can recover its own message bits under the scheme."""
    l1, l2 = params.tx_levels
    cols1 = _columns_to_masks(scheme.enc1, l1, scheme.k1, "enc1")
    cols2 = _columns_to_masks(scheme.enc2, l2, scheme.k2, "enc2")
    relay_rows = _relay_rows(params, scheme.relay_map)
    return _Evaluator(params).decodable(cols1, cols2, relay_rows)


def _relay_rows(params: DetChannelParams, relay_map: Sequence[Sequence[int]]) -> list[int]:
    lr = params.rx_levels[2]
    if len(relay_map) > params.r0bits:
        raise DimensionMismatch(f"relay map has {len(relay_map)} rows but only {params.r0bits} relay bits")
    rows = []
    for row in relay_map:
        if len(row) != lr or any(v not in (0, 1) for v in row):
            raise DimensionMismatch(f"relay map rows must be 0/1 vectors of length {lr}")
        rows.append(sum(v << i for i, v in enumerate(row)))
    return rows


def exhaustive_decodable(params: DetChannelParams, scheme: DetScheme) -> tuple[bool, bool]:
    """Decodability by listing every message pair (independent of the rank test)."""
    l1, l2 = params.tx_levels
    cols1 = _columns_to_masks(scheme.enc1, l1, scheme.k1, "enc1")
    cols2 = _columns_to_masks(scheme.enc2, l2, scheme.k2, "enc2")
    relay_rows = _relay_rows(params, scheme.relay_map)
    if scheme.k1 + scheme.k2 > 16:
        raise SearchBudgetExceeded("exhaustive check limited to 16 message bits")
    ev = _Evaluator(params)

    def encode(cols: Sequence[int], msg: int) -> int:
        x = 0
        for i, c in enumerate(cols):
            if msg >> i & 1:
                x ^= c
        return x

    seen: list[dict[int, int]] = [{}, {}]
    ok = [True, True]
    for m1 in range(1 << scheme.k1):
        x1 = encode(cols1, m1)
        for m2 in range(1 << scheme.k2):
            x2 = encode(cols2, m2)
            own_msgs = (m1, m2)
            relay_img = ev.obs[2].images(0, [x1])[0] ^ ev.obs[2].images(1, [x2])[0]
            relay_bits = sum((bin(r & relay_img).count("1") & 1) << i for i, r in enumerate(relay_rows))
            for node in (0, 1):
                y = ev.obs[node].images(0, [x1])[0] ^ ev.obs[node].images(1, [x2])[0]
                key = y | relay_bits << ev.rx_sizes[node]
                prev = seen[node].setdefault(key, own_msgs[node])
                if prev != own_msgs[node]:
                    ok[node] = False
    return ok[0], ok[1]


def subspaces(n: int, k: int) -> Iterator[list[int]]:
    """Every k-dimensional subspace of GF(2)^n, each once, as a reduced echelon basis."""
    if k == 0:
        yield []
        return
    for pivots in itertools.combinations(range(n), k):
        free = [[c for c in range(p + 1, n) if c not in pivots] for p in pivots]
        counts = [len(f) for f in free]
        for fill in itertools.product(*[range(1 << c) for c in counts]):
            basis = []
            for p, cols, bits in zip(pivots, free, fill):
                v = 1 << p
                for i, c in enumerate(cols):
                    if bits >> i & 1:
                        v |= 1 << c
                basis.append(v)
            yield basis


def _count_subspaces(n: int, k: int) -> int:
    num = den = 1
    for i in range(k):
        num *= (1 << n) - (1 << i)
        den *= (1 << k) - (1 << i)
    return num // den


def _relay_choices(params: DetChannelParams, relay_options: Sequence[Sequence[int]] | None) -> list[list[int]]:
    if relay_options is not None:
        return [list(r) for r in relay_options]
    lr = params.rx_levels[2]
    dims = range(min(params.r0bits, lr) + 1)
    # Only the row space of the relay map matters, and a larger one never hurts,
    # so the full-rank spaces of the largest usable dimension suffice.
    top = max(dims)
    return [basis for basis in subspaces(lr, top)]


def achievable(
    params: DetChannelParams,
    k1: int,
    k2: int,
    relay_options: Sequence[Sequence[int]] | None = None,
    budget: int = DEFAULT_BUDGET,
) -> tuple[list[int], list[int], list[int]] | None:
    """A witness ``(cols1, cols2, relay_rows)`` making ``(k1, k2)`` decodable, if any.

    ``relay_options`` restricts the relay to the listed row-bitmask lists.
    """
    l1, l2 = params.tx_levels
    if k1 > l1 or k2 > l2:
        return None
    relays = _relay_choices(params, relay_options)
    work = _count_subspaces(l1, k1) * _count_subspaces(l2, k2) * len(relays)
    if work > budget:
        raise SearchBudgetExceeded(f"search over {work} combinations exceeds the budget of {budget}")
    ev = _Evaluator(params)
    spaces2 = list(subspaces(l2, k2))
    for relay in relays:
        for cols1 in subspaces(l1, k1):
            for cols2 in spaces2:
                if ev.decodable(cols1, cols2, relay) == (True, True):
                    return cols1, cols2, relay
    return None


def brute_force_best(
    params: DetChannelParams,
    k_max: int | None = None,
    relay_options: Sequence[Sequence[int]] | None = None,
    budget: int = DEFAULT_BUDGET,
) -> list[tuple[int, int]]:
    """Pareto frontier of decodable ``(k1, k2)`` over all linear schemes.

    Encoders are searched by column space, since decodability depends on
    nothing else.  The search is exhaustive and therefore deterministic.
    """
    l1, l2 = params.tx_levels
    m1 = l1 if k_max is None else min(l1, k_max)
    m2 = l2 if k_max is None else min(l2, k_max)
    frontier: list[tuple[int, int]] = []
    k2_floor = -1
    # For each k1 (descending), the largest k2 that works; monotone in k1.
    for k1 in range(m1, -1, -1):
        best = None
        for k2 in range(m2, k2_floor, -1):
            if achievable(params, k1, k2, relay_options, budget) is not None:
                best = k2
                break
        if best is not None and best > k2_floor:
            frontier.append((k1, best))
            k2_floor = best
    return sorted(frontier)


def relay_row(levels: int, *picked: int) -> list[int]:
    """Relay map row that XORs the given relay levels (1-based, top first)."""
    row = [0] * levels
    for p in picked:
        row[p - 1] = 1
    return row


def identity(n: int) -> list[list[int]]:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def load_fixture(name: str) -> dict:
    try:
        text = resources.files("relayic").joinpath("fixtures", f"{name}.json").read_text()
    except FileNotFoundError:
        raise RelayICError(f"unknown fixture {name!r}") from None
    return json.loads(text)


def fixture_names() -> list[str]:
    folder = resources.files("relayic").joinpath("fixtures")
    return sorted(p.name[:-5] for p in folder.iterdir() if p.name.endswith(".json"))


def _fixture_parts(data: dict) -> tuple[DetChannelParams, DetScheme]:
    params = DetChannelParams(**data["params"])
    s = data["scheme"]
    scheme = DetScheme.from_lists(s["k1"], s["k2"], s["enc1"], s["enc2"], s["relay_map"])
    return params, scheme


def _gain_report(name: str, params: DetChannelParams, scheme: DetScheme, baseline: tuple[int, int]) -> dict:
    no_relay = DetChannelParams(**{**asdict(params), "r0bits": 0})
    frontier = brute_force_best(no_relay)
    decodable = simulate(params, scheme)
    cross_check = exhaustive_decodable(params, scheme)
    silent = DetScheme(scheme.k1, scheme.k2, scheme.enc1, scheme.enc2, ())
    without_relay = simulate(params, silent)
    rates = (scheme.k1, scheme.k2)
    dominated = any(f[0] >= rates[0] and f[1] >= rates[1] for f in frontier)
    return {
        "fixture": name,
        "relayRates": list(rates),
        "baseline": list(baseline),
        "noRelayFrontier": [list(f) for f in frontier],
        "decodable": list(decodable),
        "exhaustiveCheck": list(cross_check),
        "decodableWithoutRelay": list(without_relay),
        "gain": [rates[0] - baseline[0], rates[1] - baseline[1]],
        "baselineOnFrontier": tuple(baseline) in frontier,
        "beyondNoRelay": not dominated,
    }


def verify_example1(name: str = "fig1") -> dict:
    """The relay's top-level XOR lets both users send one more bit."""
    data = load_fixture(name)
    params, scheme = _fixture_parts(data)
    report = _gain_report(name, params, scheme, tuple(data["baseline"]))
    report["pass"] = (
        all(report["decodable"])
        and report["exhaustiveCheck"] == report["decodable"]
        and not all(report["decodableWithoutRelay"])
        and report["baselineOnFrontier"]
        and report["beyondNoRelay"]
        and report["gain"] == [1, 1]
    )
    return report


def verify_example2(name: str = "fig2") -> dict:
    """Forwarding the relay's second level gains one bit per user; its top level does not."""
    data = load_fixture(name)
    params, scheme = _fixture_parts(data)
    report = _gain_report(name, params, scheme, tuple(data["baseline"]))
    lr = params.rx_levels[2]
    top_level = [relay_row(lr, 1)]
    alt = DetScheme.from_lists(scheme.k1, scheme.k2, scheme.enc1, scheme.enc2, top_level)
    top_rows = _relay_rows(params, top_level)
    top_frontier = brute_force_best(params, relay_options=[top_rows])
    chosen_rows = _relay_rows(params, scheme.relay_map)
    chosen_frontier = brute_force_best(params, relay_options=[chosen_rows])
    report["topLevelRelayDecodable"] = list(simulate(params, alt))
    report["topLevelRelayFrontier"] = [list(f) for f in top_frontier]
    report["chosenRelayFrontier"] = [list(f) for f in chosen_frontier]
    top_reaches = any(f[0] >= scheme.k1 and f[1] >= scheme.k2 for f in top_frontier)
    report["pass"] = (
        all(report["decodable"])
        and report["exhaustiveCheck"] == report["decodable"]
        and report["baselineOnFrontier"]
        and report["gain"] == [1, 1]
        and not top_reaches
    )
    return report


VERIFIERS = {"fig1": verify_example1, "fig2": verify_example2}


def verify_fixture(name: str) -> dict:
    if name not in VERIFIERS:
        raise RelayICError(f"unknown fixture {name!r}; choose from {', '.join(sorted(VERIFIERS))}")
    return VERIFIERS[name](name)
