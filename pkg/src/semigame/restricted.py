"""Games where both players are restricted.

Alice must play option ``i`` exactly ``a_i`` times and Bob option ``j``
exactly ``b_j`` times, with ``sum(a) == sum(b) == N``.  ``G[i][j]`` is
Alice's score for one round.  Playing each side proportionally to its
remaining counts gives value ``M(a, b) = sum_ij G[i][j] a_i b_j / N``.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from semigame.algebra import fmt_rational, parse_rational
from semigame.errors import InputError

Rule = Callable[[tuple, tuple], Sequence[Fraction]]  # (a, b) -> mixture over that side's options


@dataclass(frozen=True)
class BimatrixGame:
    payoffs: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(Fraction(x) for x in row) for row in self.payoffs)
        if not rows or not rows[0] or any(len(r) != len(rows[0]) for r in rows):
            raise InputError("payoff matrix must be a nonempty rectangle")
        object.__setattr__(self, "payoffs", rows)

    @property
    def rows(self) -> int:
        return len(self.payoffs)

    @property
    def cols(self) -> int:
        return len(self.payoffs[0])

    def __getitem__(self, ij: tuple[int, int]) -> Fraction:
        return self.payoffs[ij[0]][ij[1]]

    def to_json(self) -> str:
        return json.dumps(
            {"rows": self.rows, "cols": self.cols, "payoffs": [[fmt_rational(x) for x in r] for r in self.payoffs]}
        )

    @classmethod
    def from_json(cls, text: str) -> "BimatrixGame":
        try:
            d = json.loads(text)
            payoffs = [[parse_rational(str(x)) for x in r] for r in d["payoffs"]]
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise InputError(f"bad game JSON: {exc}") from None
        g = cls(payoffs)
        if (g.rows, g.cols) != (d.get("rows", g.rows), d.get("cols", g.cols)):
            raise InputError("declared rows/cols disagree with the payoff matrix")
        return g


def rps() -> BimatrixGame:
    """Rock, paper, scissors in that order; paper beats rock."""
    return BimatrixGame([[0, -1, 1], [1, 0, -1], [-1, 1, 0]])


@dataclass(frozen=True)
class RestrictionPair:
    a: tuple[int, ...]
    b: tuple[int, ...]

    def __post_init__(self):
        a = tuple(int(x) for x in self.a)
        b = tuple(int(x) for x in self.b)
        if any(x < 0 for x in a + b):
            raise InputError("restriction counts must be non-negative")
        if sum(a) != sum(b):
            raise InputError(f"sum(a) = {sum(a)} differs from sum(b) = {sum(b)}")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def N(self) -> int:
        return sum(self.a)


def _check_shape(G: BimatrixGame, pair: RestrictionPair) -> None:
    if len(pair.a) != G.rows or len(pair.b) != G.cols:
        raise InputError(f"restriction lengths {len(pair.a)}, {len(pair.b)} do not fit a {G.rows}x{G.cols} game")


def restricted_value(G: BimatrixGame, pair: RestrictionPair) -> Fraction:
    """``M(a, b)``; the empty game (``N = 0``) is worth 0."""
    _check_shape(G, pair)
    if pair.N == 0:
        return Fraction(0)
    total = sum(
        (G.payoffs[i][j] * ai * bj for i, ai in enumerate(pair.a) if ai for j, bj in enumerate(pair.b) if bj),
        Fraction(0),
    )
    return total / pair.N


def proportional(counts: Sequence[int]) -> list[Fraction]:
    n = sum(counts)
    if n <= 0:
        raise InputError("no options left on this side")
    return [Fraction(c, n) for c in counts]


def uniform_strategy(side: str) -> Rule:
    """Rule playing option ``i`` with probability proportional to its remaining count."""
    if side not in ("alice", "bob"):
        raise InputError(f"side must be 'alice' or 'bob', not {side!r}")
    if side == "alice":
        return lambda a, b: proportional(a)
    return lambda a, b: proportional(b)


def _dec(v: tuple, i: int) -> tuple:
    return v[:i] + (v[i] - 1,) + v[i + 1 :]


def restricted_best_response(G: BimatrixGame, pair: RestrictionPair, opponent: Rule, side: str) -> Fraction:
    """Exact optimal score of ``side`` (Alice's score, maximised or minimised) against a fixed rule.

    ``opponent`` is the other side's per-state mixture.  The responder picks
    a pure option per state; against a fixed mixture the per-state problem is
    linear, so this loses nothing.
    """
    if side not in ("alice", "bob"):
        raise InputError(f"side must be 'alice' or 'bob', not {side!r}")
    _check_shape(G, pair)
    memo: dict[tuple, Fraction] = {}
    pick = max if side == "alice" else min

    # states reached from (a, b) always keep sum(a) == sum(b); sweep them by remaining rounds
    def lattice(v):
        return itertools.product(*(range(x + 1) for x in v))

    states = [(a, b) for a in lattice(pair.a) for b in lattice(pair.b) if sum(a) == sum(b)]
    states.sort(key=lambda s: sum(s[0]))
    for a, b in states:
        if not any(a):
            memo[(a, b)] = Fraction(0)
            continue
        q = [Fraction(x) for x in opponent(a, b)]
        own, other = (a, b) if side == "alice" else (b, a)
        if len(q) != len(other) or sum(q) != 1 or any(x < 0 for x in q):
            raise InputError(f"opponent rule returned an invalid mixture at state {a}, {b}")
        if any(x and not other[j] for j, x in enumerate(q)):
            raise InputError(f"opponent rule puts mass on a depleted option at state {a}, {b}")
        scores = []
        for i, ci in enumerate(own):
            if not ci:
                continue
            s = Fraction(0)
            for j, qj in enumerate(q):
                if not qj:
                    continue
                if side == "alice":
                    s += qj * (G.payoffs[i][j] + memo[(_dec(a, i), _dec(b, j))])
                else:
                    s += qj * (G.payoffs[j][i] + memo[(_dec(a, j), _dec(b, i))])
            scores.append(s)
        memo[(a, b)] = pick(scores)
    return memo[(pair.a, pair.b)]


def simulate_uniform(G: BimatrixGame, pair: RestrictionPair, reps: int, seed: int) -> tuple[float, float]:
    """Mean and standard error of Alice's score when both sides play proportionally."""
    from semigame.simulate import rep_rng

    _check_shape(G, pair)
    P = np.array([[float(x) for x in r] for r in G.payoffs])
    scores = np.empty(reps)
    for rep in range(reps):
        rng = rep_rng(seed, rep)
        # proportional play without replacement is a uniformly random ordering of each multiset
        alice = rng.permutation(np.repeat(np.arange(G.rows), pair.a))
        bob = rng.permutation(np.repeat(np.arange(G.cols), pair.b))
        scores[rep] = P[alice, bob].sum()
    stderr = float(scores.std(ddof=1) / np.sqrt(reps)) if reps > 1 else 0.0
    return float(scores.mean()), stderr


def pairs_up_to(G: BimatrixGame, n_max: int) -> list[RestrictionPair]:
    """Every restriction pair with ``1 <= N <= n_max``."""
    out = []
    for N in range(1, n_max + 1):
        As = [a for a in itertools.product(range(N + 1), repeat=G.rows) if sum(a) == N]
        Bs = [b for b in itertools.product(range(N + 1), repeat=G.cols) if sum(b) == N]
        out += [RestrictionPair(a, b) for a in As for b in Bs]
    return out


def parse_counts(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError:
        raise InputError(f"expected comma-separated integers, got {text!r}") from None


def load_game(spec: str) -> BimatrixGame:
    """``rps`` or a path to a game JSON file."""
    if spec == "rps":
        return rps()
    try:
        with open(spec) as fh:
            return BimatrixGame.from_json(fh.read())
    except OSError as exc:
        raise InputError(f"cannot read game file {spec!r}: {exc.strerror}") from None

