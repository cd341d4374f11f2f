"""Oblivious strategies: certificates against them and box-level decisions.

A Rei strategy is oblivious when its mixture depends on ``supp(r)`` only.
A certificate is an even, nonempty vertex set ``S`` of a tournament such
that for every ``v`` in ``S`` and every other vertex ``w``,
``N+(v) & S`` is not contained in ``N+(w) & S``; its existence rules out
an oblivious optimal strategy.  All subset work is on integer bitmasks.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Union

import numpy as np

from semigame.algebra import parse_rational
from semigame.errors import InputError
from semigame.graph import Digraph, random_tournament
from semigame.simplex import linprog_exact
from semigame.solver import ValueTable, _state, best_response_table, box_states, minus, solve_box
from semigame.strategies import Distribution, ObliviousTable, gains, support_of

SUBSET_CAP = 16
SAMPLED_SUBSETS = 20000


@dataclass(frozen=True)
class Certificate:
    S: tuple[int, ...]

    def to_dict(self) -> dict:
        return {"S": list(self.S)}


def _mask(S: Iterable[int]) -> int:
    m = 0
    for v in S:
        m |= 1 << v
    return m


def _holds_mask(out: Sequence[int], k: int, S: int) -> bool:
    if S == 0 or bin(S).count("1") % 2:
        return False
    v_bits = S
    while v_bits:
        low = v_bits & -v_bits
        v = low.bit_length() - 1
        v_bits ^= low
        nv = out[v] & S
        for w in range(k):
            if w != v and nv & ~out[w] == 0:
                return False
    return True


def certificate_holds(D: Digraph, S: Iterable[int]) -> bool:
    """Exact evaluation of the certificate condition (``S`` must be even and nonempty)."""
    S = set(S)
    for v in S:
        D._check_vertex(v)
    return _holds_mask(D.out_masks, D.k, _mask(S))


def _require_tournament(D: Digraph) -> None:
    if not D.is_tournament():
        raise InputError("certificates are defined for tournaments only")


def find_certificate(
    D: Digraph, cap: int = SUBSET_CAP, seed: int = 0, samples: int = SAMPLED_SUBSETS
) -> Certificate | None:
    """First certificate by increasing ``|S|`` then lexicographic order.

    Up to ``cap`` vertices the search is exhaustive, so ``None`` means no
    certificate exists.  Above the cap, ``samples`` random even subsets are
    tried and ``None`` only means none was found.
    """
    _require_tournament(D)
    out, k = D.out_masks, D.k
    if k <= cap:
        for size in range(2, k + 1, 2):
            for S in itertools.combinations(range(k), size):
                if _holds_mask(out, k, _mask(S)):
                    return Certificate(S)
        return None
    rng = np.random.default_rng(seed)
    for _ in range(samples):
        size = 2 * int(rng.integers(1, k // 2 + 1))
        S = tuple(sorted(int(x) for x in rng.choice(k, size=size, replace=False)))
        if _holds_mask(out, k, _mask(S)):
            return Certificate(S)
    return None


def oblivious_rate(k: int, samples: int, seed: int, cap: int = SUBSET_CAP) -> float:
    """Fraction of random tournaments on ``k`` vertices that carry a certificate.

    Tournament ``i`` is ``random_tournament(k, seed * 1_000_003 + i)``.
    """
    if k < 1 or samples < 1:
        raise InputError("k and samples must be positive")
    hits = sum(
        find_certificate(random_tournament(k, seed * 1_000_003 + i), cap) is not None for i in range(samples)
    )
    return hits / samples


# -- decisions relative to a solved box ------------------------------------------------


@dataclass
class NotOblivious:
    evidence: Union[Certificate, tuple[int, ...]]  # certificate, or a support whose polytope is empty
    box: tuple[int, ...] | None = None

    kind = "not_oblivious"


@dataclass
class ObliviousOnBox:
    table: dict[frozenset, Distribution]
    box: tuple[int, ...]

    kind = "oblivious_on_box"

    @property
    def strategy(self) -> ObliviousTable:
        return ObliviousTable(self.table)


@dataclass
class Inconclusive:
    reason: str
    box: tuple[int, ...] | None = None

    kind = "inconclusive"


Verdict = Union[NotOblivious, ObliviousOnBox, Inconclusive]


def support_polytope_rows(D: Digraph, S: tuple[int, ...], states: Sequence[tuple], table: ValueTable):
    """Rows ``a`` and bounds ``b`` with ``a p <= b`` for every state with support ``S``."""
    A, b = [], []
    for r in states:
        children = [table[minus(r, u)] for u in S]
        t = table[r]
        for v in range(D.k):
            A.append([Fraction(D.table[v][u]) + c for u, c in zip(S, children)])
            b.append(t)
    return A, b


def support_witness(D: Digraph, S: tuple[int, ...], states: Sequence[tuple], table: ValueTable) -> Distribution | None:
    """A mixture on ``S`` optimal at every listed state, or ``None`` if there is none."""
    A, b = support_polytope_rows(D, S, states, table)
    m = len(S)
    res = linprog_exact([0] * m, A_ub=A, b_ub=b, A_eq=[[1] * m], b_eq=[1])
    if not res.ok:
        return None
    probs = [Fraction(0)] * D.k
    for u, x in zip(S, res.x):
        probs[u] = x
    return Distribution(probs, S)


def states_by_support(box: Sequence[int]) -> dict[tuple[int, ...], list[tuple]]:
    groups: dict[tuple[int, ...], list[tuple]] = {}
    for r in box_states(tuple(box)):
        if any(r):
            groups.setdefault(tuple(sorted(support_of(r))), []).append(r)
    return groups


def decide_oblivious_on_box(D: Digraph, box: Sequence[int], table: ValueTable | None = None) -> Verdict:
    box = _state(D, box)
    if table is None:
        table = solve_box(D, box)
    if table.backend != "exact":
        raise InputError("obliviousness decisions need the exact backend")
    missing = [r for r in box_states(box) if r not in table]
    if missing:
        raise InputError(f"value table does not cover the box; first unsolved state {missing[0]}")
    chosen: dict[frozenset, Distribution] = {}
    for S, states in sorted(states_by_support(box).items(), key=lambda kv: (len(kv[0]), kv[0])):
        wit = support_witness(D, S, states, table)
        if wit is None:
            return NotOblivious(S, box)
        chosen[frozenset(S)] = wit
    return verify_table(D, box, chosen, table)


def verify_table(D: Digraph, box: Sequence[int], chosen: Mapping[frozenset, Distribution], table: ValueTable) -> Verdict:
    """``ObliviousOnBox`` if the table's best-response value equals the optimum on the whole box."""
    box = tuple(box)
    br = best_response_table(D, box, ObliviousTable(dict(chosen)))
    for r, v in br.items():
        if v != table[r]:
            return Inconclusive(f"table scores {v} at {r}, optimum is {table[r]}", box)
    return ObliviousOnBox(dict(chosen), box)


# -- the consistency check on oblivious tables -----------------------------------------


@dataclass(frozen=True)
class MaxViolation:
    support: tuple[int, ...]
    v: int
    gain_v: Fraction
    best: Fraction


def can_lead(D: Digraph, S: Sequence[int], v: int) -> bool:
    """Is there ``q >= 0`` with ``supp(q) = S`` making ``(A q)_v`` maximal?

    ``q`` is scale-free, so ``supp(q) = S`` is imposed as ``q_u >= 1`` on ``S``.
    """
    S = tuple(S)
    m = len(S)
    A_ub, b_ub = [], []
    for w in range(D.k):
        if w != v:
            A_ub.append([Fraction(D.table[w][u] - D.table[v][u]) for u in S])
            b_ub.append(0)
    for i in range(m):
        row = [0] * m
        row[i] = -1
        A_ub.append(row)
        b_ub.append(-1)
    return linprog_exact([0] * m, A_ub=A_ub, b_ub=b_ub).ok


def lead_violations(D: Digraph, table: Mapping[frozenset, Distribution]) -> list[MaxViolation]:
    """Vertices of ``S`` that could lead under some ``q`` with support ``S`` but do not lead under ``p``."""
    out = []
    for S_set, p in sorted(table.items(), key=lambda kv: (len(kv[0]), sorted(kv[0]))):
        S = tuple(sorted(S_set))
        g = gains(D, p)
        best = max(g)
        for v in S:
            if can_lead(D, S, v) and g[v] != best:
                out.append(MaxViolation(S, v, g[v], best))
    return out


# -- JSON ---------------------------------------------------------------------------------


def _table_to_list(table: Mapping[frozenset, Distribution]) -> list[dict]:
    return [
        {"support": sorted(S), "p": d.to_strings()}
        for S, d in sorted(table.items(), key=lambda kv: (len(kv[0]), sorted(kv[0])))
    ]


def verdict_to_dict(verdict: Verdict) -> dict:
    d: dict = {"verdict": verdict.kind, "box": list(verdict.box) if verdict.box is not None else None}
    if isinstance(verdict, NotOblivious):
        if isinstance(verdict.evidence, Certificate):
            d["certificate"] = list(verdict.evidence.S)
        else:
            d["empty_support"] = list(verdict.evidence)
    elif isinstance(verdict, ObliviousOnBox):
        d["table"] = _table_to_list(verdict.table)
    else:
        d["reason"] = verdict.reason
    return d


def verdict_from_dict(d: Mapping) -> Verdict:
    box = tuple(d["box"]) if d.get("box") is not None else None
    kind = d.get("verdict")
    if kind == "not_oblivious":
        if "certificate" in d:
            return NotOblivious(Certificate(tuple(d["certificate"])), box)
        return NotOblivious(tuple(d["empty_support"]), box)
    if kind == "oblivious_on_box":
        table = {
            frozenset(e["support"]): Distribution([parse_rational(x) for x in e["p"]], e["support"])
            for e in d["table"]
        }
        return ObliviousOnBox(table, box)
    if kind == "inconclusive":
        return Inconclusive(d["reason"], box)
    raise InputError(f"unknown verdict {kind!r}")


def verdict_to_json(verdict: Verdict) -> str:
    return json.dumps(verdict_to_dict(verdict))


def verdict_from_json(text: str) -> Verdict:
    return verdict_from_dict(json.loads(text))


def uniform_is_optimal_at_full_support(D: Digraph, box: Sequence[int], table: ValueTable) -> bool:
    """Does the uniform mixture lie in the full-support polytope over the box?"""
    S = tuple(range(D.k))
    states = states_by_support(box).get(S, [])
    A, b = support_polytope_rows(D, S, states, table)
    u = Fraction(1, D.k)
    return all(sum(a * u for a in row) <= bound for row, bound in zip(A, b))

