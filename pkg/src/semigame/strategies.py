"""Declarative strategies for Rei (restricted) and Norman (unrestricted).

A Rei strategy maps a restriction vector ``r`` to a :class:`Distribution`
supported inside ``supp(r)``.  A Norman strategy maps Rei's current
mixture to a vertex.  :func:`realize` is the single dispatch point.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Iterable, Mapping, Sequence, Union

from semigame.algebra import fmt_rational, parse_rational
from semigame.errors import InputError, InternalError
from semigame.graph import Digraph, cycle3


class Distribution:
    """Exact probability vector over the vertices ``0..k-1``."""

    __slots__ = ("probs",)

    def __init__(self, probs: Iterable, allowed: Iterable[int] | None = None):
        probs = tuple(Fraction(x) for x in probs)
        if any(x < 0 for x in probs):
            raise InputError(f"negative probability in {[str(x) for x in probs]}")
        if sum(probs) != 1:
            raise InputError(f"probabilities sum to {sum(probs)}, not 1")
        if allowed is not None:
            allowed = set(allowed)
            bad = [v for v, x in enumerate(probs) if x and v not in allowed]
            if bad:
                raise InputError(f"mass on vertices {bad} outside the allowed set {sorted(allowed)}")
        self.probs = probs

    @classmethod
    def point(cls, k: int, v: int) -> "Distribution":
        return cls([1 if u == v else 0 for u in range(k)])

    @classmethod
    def uniform(cls, k: int, support: Iterable[int] | None = None) -> "Distribution":
        support = set(range(k) if support is None else support)
        if not support:
            raise InputError("uniform distribution over an empty set")
        w = Fraction(1, len(support))
        return cls([w if u in support else 0 for u in range(k)])

    @property
    def support(self) -> frozenset[int]:
        return frozenset(v for v, x in enumerate(self.probs) if x)

    def __len__(self) -> int:
        return len(self.probs)

    def __iter__(self):
        return iter(self.probs)

    def __getitem__(self, v: int) -> Fraction:
        return self.probs[v]

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Distribution):
            return self.probs == other.probs
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.probs)

    def __repr__(self) -> str:
        return f"Distribution([{', '.join(str(x) for x in self.probs)}])"

    def to_strings(self) -> list[str]:
        return [fmt_rational(x) for x in self.probs]


def support_of(r: Sequence[int]) -> frozenset[int]:
    return frozenset(v for v, x in enumerate(r) if x > 0)


# -- strategy specs --------------------------------------------------------


@dataclass(frozen=True)
class GreedyRPS:
    player = "rei"


@dataclass(frozen=True)
class UniformUntilDepletion:
    player = "rei"


@dataclass(frozen=True)
class TrimmedProportional:
    r0: tuple[int, ...]
    player = "rei"

    @property
    def threshold(self) -> int:
        return ceil_two_thirds_power(max(self.r0))

    @property
    def trimmed(self) -> tuple[int, ...]:
        t = self.threshold
        return tuple(x if x >= t else 0 for x in self.r0)


@dataclass(frozen=True, eq=False)
class ObliviousTable:
    """Support set -> distribution; the same mixture for every ``r`` with that support."""

    table: Mapping[frozenset, Distribution]
    player = "rei"


@dataclass(frozen=True, eq=False)
class OptimalFromTable:
    """Plays the stored LP witness of a solved value table."""

    table: Any
    player = "rei"


@dataclass(frozen=True)
class FixedVertex:
    v: int
    player = "norman"


@dataclass(frozen=True)
class PerRoundBestResponse:
    player = "norman"


StrategySpec = Union[
    GreedyRPS,
    UniformUntilDepletion,
    TrimmedProportional,
    ObliviousTable,
    OptimalFromTable,
    FixedVertex,
    PerRoundBestResponse,
]


def ceil_two_thirds_power(m: int) -> int:
    """Smallest integer ``c`` with ``c**3 >= m**2``, i.e. ``ceil(m ** (2/3))``."""
    if m <= 0:
        return 0
    target = m * m
    c = max(1, int(round(target ** (1 / 3))))
    while c**3 < target:
        c += 1
    while c > 1 and (c - 1) ** 3 >= target:
        c -= 1
    return c


# -- Rei strategies ------------------------------------------------------------


def _check_cycle3(D: Digraph) -> None:
    if D.k != 3 or len(D.arcs) != 3 or not D.is_eulerian():
        raise InputError("the greedy strategy is defined only on the directed 3-cycle")


def greedy_rps(r: Sequence[int], D: Digraph | None = None) -> Distribution:
    """1/3 each with three options; 2/3 on the winner of the pair with two; forced with one."""
    D = D or cycle3()
    _check_cycle3(D)
    if len(r) != 3:
        raise InputError("restriction vector must have length 3")
    supp = sorted(support_of(r))
    if not supp:
        raise InputError("no options left")
    if len(supp) == 3:
        return Distribution.uniform(3)
    if len(supp) == 1:
        return Distribution.point(3, supp[0])
    a, b = supp
    win, lose = (a, b) if D.beats(a, b) else (b, a)
    probs = [Fraction(0)] * 3
    probs[win] = Fraction(2, 3)
    probs[lose] = Fraction(1, 3)
    return Distribution(probs)


def uniform_until_depletion(D: Digraph, r: Sequence[int]) -> Distribution:
    """Uniform over V while every option remains, afterwards uniform over the remaining support."""
    supp = support_of(r)
    if not supp:
        raise InputError("no options left")
    if len(supp) == D.k:
        return Distribution.uniform(D.k)
    return Distribution.uniform(D.k, supp)


def trimmed_proportional(D: Digraph, r0: Sequence[int]) -> TrimmedProportional:
    r0 = tuple(int(x) for x in r0)
    if len(r0) != D.k or any(x < 0 for x in r0) or not any(r0):
        raise InputError("r0 must be a nonempty restriction vector for this digraph")
    spec = TrimmedProportional(r0)
    if not any(spec.trimmed):
        raise InternalError("trimming removed every option")
    return spec


def _trimmed_at(D: Digraph, spec: TrimmedProportional, r: Sequence[int]) -> Distribution:
    kept = spec.trimmed
    supp = support_of(r)
    if all(r[w] > 0 for w, x in enumerate(kept) if x):
        total = sum(kept)
        return Distribution([Fraction(x, total) for x in kept])
    return Distribution.uniform(D.k, supp)


# -- Norman ----------------------------------------------------------------------


def gains(D: Digraph, p: Sequence) -> list[Fraction]:
    """Norman's expected one-round gain for each vertex: ``(A p)_v``."""
    return [
        sum((Fraction(p[u]) * D.table[v][u] for u in range(D.k) if D.table[v][u]), Fraction(0))
        for v in range(D.k)
    ]


def norman_best_response(D: Digraph, p: Sequence) -> tuple[int, Fraction]:
    """Argmax of the one-round gain, lowest index on ties, with the gain itself."""
    g = gains(D, p)
    best = max(g)
    return g.index(best), best


# -- dispatch ----------------------------------------------------------------------


def realize(spec: StrategySpec, D: Digraph, r: Sequence[int], rei_mixture: Distribution | None = None) -> Distribution:
    """Distribution the strategy plays at state ``r``.

    Norman strategies return a point mass; :class:`PerRoundBestResponse`
    needs ``rei_mixture``.
    """
    r = tuple(r)
    if isinstance(spec, FixedVertex):
        D._check_vertex(spec.v)
        return Distribution.point(D.k, spec.v)
    if isinstance(spec, PerRoundBestResponse):
        if rei_mixture is None:
            raise InputError("per-round best response needs Rei's current mixture")
        return Distribution.point(D.k, norman_best_response(D, rei_mixture)[0])

    supp = support_of(r)
    if not supp:
        raise InputError(f"Rei has no options at state {r}")
    if isinstance(spec, GreedyRPS):
        dist = greedy_rps(r, D)
    elif isinstance(spec, UniformUntilDepletion):
        dist = uniform_until_depletion(D, r)
    elif isinstance(spec, TrimmedProportional):
        dist = _trimmed_at(D, spec, r)
    elif isinstance(spec, ObliviousTable):
        try:
            dist = spec.table[supp]
        except KeyError:
            raise InputError(f"oblivious table has no entry for support {sorted(supp)}") from None
    elif isinstance(spec, OptimalFromTable):
        if spec.table is None:
            raise InputError("OptimalFromTable is not bound to a value table")
        dist = spec.table.witness(r)
    else:
        raise InputError(f"unknown strategy {spec!r}")
    if not dist.support <= supp:
        raise InputError(f"strategy {type(spec).__name__} puts mass outside supp(r) at state {r}")
    return dist


# -- JSON -------------------------------------------------------------------------

_VARIANTS = {
    "greedy_rps": GreedyRPS,
    "uniform_until_depletion": UniformUntilDepletion,
    "trimmed_proportional": TrimmedProportional,
    "oblivious_table": ObliviousTable,
    "optimal_from_table": OptimalFromTable,
    "fixed_vertex": FixedVertex,
    "best_response": PerRoundBestResponse,
}
_NAMES = {cls: name for name, cls in _VARIANTS.items()}


def spec_to_dict(spec: StrategySpec) -> dict:
    params: dict = {}
    if isinstance(spec, TrimmedProportional):
        params = {"r0": list(spec.r0)}
    elif isinstance(spec, FixedVertex):
        params = {"v": spec.v}
    elif isinstance(spec, ObliviousTable):
        params = {
            "table": [
                {"support": sorted(s), "p": d.to_strings()}
                for s, d in sorted(spec.table.items(), key=lambda kv: (len(kv[0]), sorted(kv[0])))
            ]
        }
    elif isinstance(spec, OptimalFromTable) and spec.table is not None:
        params = {"fingerprint": spec.table.digraph.fingerprint}
    return {"player": spec.player, "variant": _NAMES[type(spec)], "params": params}


def spec_from_dict(data: Mapping) -> StrategySpec:
    try:
        cls = _VARIANTS[data["variant"]]
    except KeyError:
        raise InputError(f"unknown strategy variant in {data!r}") from None
    if data.get("player", cls.player) != cls.player:
        raise InputError(f"variant {data['variant']} belongs to {cls.player}, not {data['player']}")
    params = data.get("params", {}) or {}
    if cls is TrimmedProportional:
        return TrimmedProportional(tuple(int(x) for x in params["r0"]))
    if cls is FixedVertex:
        return FixedVertex(int(params["v"]))
    if cls is ObliviousTable:
        table = {
            frozenset(e["support"]): Distribution([parse_rational(x) for x in e["p"]], e["support"])
            for e in params["table"]
        }
        return ObliviousTable(table)
    if cls is OptimalFromTable:
        return OptimalFromTable(None)
    return cls()


def spec_to_json(spec: StrategySpec) -> str:
    return json.dumps(spec_to_dict(spec))


def spec_from_json(text: str) -> StrategySpec:
    return spec_from_dict(json.loads(text))
