"""Seeded Monte Carlo play and the depletion / tail / scaling experiments.

Per-repetition randomness comes from ``SeedSequence([seed, rep])`` fed to
numpy's PCG64, so repetition ``i`` sees the same stream regardless of how
many other repetitions run or in what order.  Aggregates are folded in
repetition order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from semigame.errors import InputError
from semigame.graph import Digraph
from semigame.solver import minus
from semigame.strategies import Distribution, StrategySpec, realize


def rep_rng(seed: int, rep: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([int(seed), int(rep)])))


def sample(dist: Distribution, rng: np.random.Generator) -> int:
    x = rng.random()
    acc = 0.0
    last = None
    for v, p in enumerate(dist.probs):
        if p:
            acc += float(p)
            last = v
            if x < acc:
                return v
    return last


@dataclass
class PlayRecord:
    r0: tuple[int, ...]
    seed: int
    rounds: list[tuple[int, int, int]] = field(default_factory=list)  # (rei, norman, delta)

    @property
    def score(self) -> int:
        return sum(d for _, _, d in self.rounds)

    def check(self, D: Digraph) -> None:
        if len(self.rounds) != sum(self.r0):
            raise InputError("transcript length differs from total(r0)")
        counts = [0] * D.k
        for rei, norman, delta in self.rounds:
            counts[rei] += 1
            if delta != D.table[norman][rei]:
                raise InputError(f"round delta {delta} does not match the arc between {norman} and {rei}")
        if tuple(counts) != self.r0:
            raise InputError(f"Rei's move counts {counts} differ from r0 {self.r0}")


class _Policy:
    """Memoised realisation of a pair of strategies, keyed by state."""

    def __init__(self, D: Digraph, rei: StrategySpec, norman: StrategySpec):
        self.D, self.rei, self.norman = D, rei, norman
        self.memo: dict[tuple, tuple[Distribution, Distribution]] = {}

    def __call__(self, r: tuple) -> tuple[Distribution, Distribution]:
        hit = self.memo.get(r)
        if hit is None:
            try:
                p = realize(self.rei, self.D, r)
            except InputError as exc:
                raise InputError(f"Rei's strategy failed at state {r}: {exc}") from None
            q = realize(self.norman, self.D, r, p)
            hit = self.memo[r] = (p, q)
        return hit


def play_game(
    D: Digraph,
    r0: Sequence[int],
    rei: StrategySpec,
    norman: StrategySpec,
    seed: int,
    rep: int = 0,
    _policy: _Policy | None = None,
) -> PlayRecord:
    r = tuple(int(x) for x in r0)
    if len(r) != D.k or any(x < 0 for x in r):
        raise InputError(f"bad initial restriction vector {r}")
    policy = _policy or _Policy(D, rei, norman)
    rng = rep_rng(seed, rep)
    record = PlayRecord(r, seed)
    t = 0
    while any(r):
        t += 1
        p, q = policy(r)
        u = sample(p, rng)
        if r[u] <= 0:
            raise InputError(f"round {t}: Rei played depleted vertex {u} at state {r}")
        v = sample(q, rng)
        record.rounds.append((u, v, D.table[v][u]))
        r = minus(r, u)
    return record


@dataclass
class MCResult:
    mean: float
    stderr: float
    reps: int
    seed: int

    @property
    def ci95(self) -> tuple[float, float]:
        return (self.mean - 1.96 * self.stderr, self.mean + 1.96 * self.stderr)

    def to_dict(self) -> dict:
        return {"mean": self.mean, "stderr": self.stderr, "ci95": list(self.ci95), "reps": self.reps, "seed": self.seed}


def _summary(values: Sequence[float], seed: int) -> MCResult:
    arr = np.asarray(values, dtype=float)
    n = arr.size
    stderr = float(arr.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    return MCResult(float(arr.mean()), stderr, n, seed)


def monte_carlo(
    D: Digraph,
    r0: Sequence[int],
    rei: StrategySpec,
    norman: StrategySpec,
    reps: int,
    seed: int,
    check: bool = False,
) -> MCResult:
    if reps < 1:
        raise InputError("reps must be at least 1")
    policy = _Policy(D, rei, norman)
    scores = []
    for i in range(reps):
        rec = play_game(D, r0, rei, norman, seed, i, policy)
        if check:
            rec.check(D)
        scores.append(rec.score)
    return _summary(scores, seed)


# -- uniform play: depletion times and best-response excess -----------------------


def _first_depletion(rng: np.random.Generator, remaining: np.ndarray, support: np.ndarray) -> tuple[int, np.ndarray]:
    """Uniform draws over ``support`` until some count in ``remaining`` hits zero.

    Returns the number of rounds and the counts played per support vertex.
    """
    length = int(remaining.sum()) - len(support) + 1
    draws = rng.integers(0, len(support), size=length)
    onehot = np.zeros((length, len(support)), dtype=np.int32)
    onehot[np.arange(length), draws] = 1
    cum = np.cumsum(onehot, axis=0)
    hit = (cum >= remaining[None, :]).any(axis=1)
    t = int(np.argmax(hit)) + 1
    return t, cum[t - 1]


def depletion_time(k: int, n: int, rng: np.random.Generator) -> int:
    """First time some symbol of a uniform string over ``k`` symbols appears ``n`` times."""
    t, _ = _first_depletion(rng, np.full(k, n), np.arange(k))
    return t


@dataclass
class DepletionStats:
    mean: float
    stderr: float
    reps: int


def depletion_stats(k: int, n: int, reps: int, seed: int) -> DepletionStats:
    """Monte Carlo estimate of ``E[k n - T]`` for uniform play."""
    if k < 2:
        raise InputError("k must be at least 2")
    if n < 1 or reps < 1:
        raise InputError("n and reps must be positive")
    vals = [k * n - depletion_time(k, n, rep_rng(seed, i)) for i in range(reps)]
    s = _summary(vals, seed)
    return DepletionStats(s.mean, s.stderr, reps)


def _support_gain(D: Digraph, supp: tuple[int, ...]) -> float:
    """Best one-round gain against uniform play over ``supp``."""
    return max(sum(D.table[v][u] for u in supp) for v in range(D.k)) / len(supp)


def uniform_best_response_score(D: Digraph, r0: Sequence[int], reps: int, seed: int) -> MCResult:
    """Norman's score against uniform-until-depletion play, by phases.

    Between depletions Rei is uniform over a fixed support, so the exact
    expected gain per round is a constant; each repetition samples only the
    phase lengths and adds ``gain * length`` (the conditional expectation
    of the realised score given Rei's moves).
    """
    r0 = np.asarray(r0, dtype=np.int64)
    if r0.shape != (D.k,) or (r0 < 0).any():
        raise InputError("bad initial restriction vector")
    gains: dict[tuple, float] = {}
    scores = []
    for i in range(reps):
        rng = rep_rng(seed, i)
        r = r0.copy()
        total = 0.0
        while r.any():
            supp = tuple(int(v) for v in np.flatnonzero(r))
            g = gains.get(supp)
            if g is None:
                g = gains[supp] = _support_gain(D, supp)
            t, played = _first_depletion(rng, r[list(supp)], np.array(supp))
            total += g * t
            r[list(supp)] -= played
        scores.append(total)
    return _summary(scores, seed)


# -- geometric lower tail ------------------------------------------------------------


@dataclass
class TailEstimate:
    estimate: float
    stderr: float
    ratio: float  # estimate / (sqrt(N) / p)


def geometric_tail(p: float, N: int, reps: int, seed: int) -> TailEstimate:
    """Estimate ``E[(EX - X) 1(X <= EX)]`` for ``X`` a sum of ``N`` Geometric(p) on {1, 2, ...}."""
    p = float(p)
    if not 0 < p <= 1:
        raise InputError("p must lie in (0, 1]")
    if N < 1 or reps < 1:
        raise InputError("N and reps must be positive")
    mean = N / p
    if p == 1:
        return TailEstimate(0.0, 0.0, 0.0)
    rng = rep_rng(seed, 0)
    X = N + rng.negative_binomial(N, p, size=reps)
    dev = np.where(X <= mean, mean - X, 0.0)
    s = _summary(dev, seed)
    return TailEstimate(s.mean, s.stderr, s.mean / (math.sqrt(N) / p))


# -- scaling fits ---------------------------------------------------------------------


@dataclass
class ScalingFit:
    ns: list[int]
    values: list[float]
    slope: float
    intercept: float
    c_hat: float

    def table(self) -> list[tuple[int, float, float]]:
        return [(n, s, s / math.sqrt(n)) for n, s in zip(self.ns, self.values)]


def scaling_fit(samples: Sequence[tuple[int, float]]) -> ScalingFit:
    """Least squares of ``log S`` on ``log n``; ``c_hat`` averages ``S / sqrt(n)`` over the top quartile of ``n``."""
    samples = sorted((int(n), float(s)) for n, s in samples)
    if len(samples) < 3:
        raise InputError("need at least three samples")
    if any(s <= 0 or n <= 0 for n, s in samples):
        raise InputError("scaling fit needs positive n and S_n")
    ns = np.array([n for n, _ in samples], dtype=float)
    vs = np.array([s for _, s in samples])
    slope, intercept = np.polyfit(np.log(ns), np.log(vs), 1)
    q = max(1, len(samples) // 4)
    c_hat = float(np.mean(vs[-q:] / np.sqrt(ns[-q:])))
    return ScalingFit([int(n) for n in ns], vs.tolist(), float(slope), float(intercept), c_hat)


# -- experiment configs ---------------------------------------------------------------


@dataclass
class ExperimentConfig:
    """One Monte Carlo run: digraph specifier, initial vector, both strategies, reps and seed."""

    graph: str
    r0: tuple[int, ...]
    rei: dict
    norman: dict
    reps: int = 1000
    seed: int = 0

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        try:
            return cls(
                graph=str(d["graph"]),
                r0=tuple(int(x) for x in d["r0"]),
                rei=dict(d["rei"]),
                norman=dict(d["norman"]),
                reps=int(d.get("reps", 1000)),
                seed=int(d.get("seed", 0)),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"bad experiment config: {exc!r}") from None

    def to_dict(self) -> dict:
        return {
            "graph": self.graph,
            "r0": list(self.r0),
            "rei": self.rei,
            "norman": self.norman,
            "reps": self.reps,
            "seed": self.seed,
        }
