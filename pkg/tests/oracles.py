"""Independent reference implementations used only by the tests."""

import itertools
from fractions import Fraction

import numpy as np


def eulerian_count_bruteforce(k: int) -> int:
    """Filter all 2^(k choose 2) orientations with numpy, no pruning."""
    pairs = list(itertools.combinations(range(k), 2))
    m = len(pairs)
    masks = np.arange(1 << m, dtype=np.int64)
    outdeg = np.zeros((1 << m, k), dtype=np.int16)
    for b, (i, j) in enumerate(pairs):
        bit = (masks >> b) & 1
        outdeg[:, i] += (1 - bit).astype(np.int16)
        outdeg[:, j] += bit.astype(np.int16)
    return int((outdeg == (k - 1) // 2).all(axis=1).sum()) if k % 2 else 0


def greedy_value_fraction(r, win, memo=None):
    """Greedy recursion on the 3-cycle in plain Fractions; ``win[(a, b)]`` is the winner of a pair.

    Pass the same ``memo`` dict across calls to reuse solved states.
    """
    if memo is None:
        memo = {}
    memo[(0, 0, 0)] = Fraction(0)

    def S(r):
        if r in memo:
            return memo[r]
        supp = [v for v in range(3) if r[v]]

        def child(u):
            return S(r[:u] + (r[u] - 1,) + r[u + 1:])

        if len(supp) == 3:
            val = sum(child(u) for u in supp) / 3
        elif len(supp) == 1:
            val = 1 + child(supp[0])
        else:
            w = win[tuple(supp)]
            lose = supp[0] if w == supp[1] else supp[1]
            val = Fraction(1, 3) + Fraction(2, 3) * child(w) + Fraction(1, 3) * child(lose)
        memo[r] = val
        return val

    return S(tuple(r))


def rank_fraction(rows) -> int:
    """Gaussian elimination over Fractions (textbook, no fraction-free tricks)."""
    m = [[Fraction(x) for x in row] for row in rows]
    rank = 0
    ncols = len(m[0]) if m else 0
    for c in range(ncols):
        piv = next((i for i in range(rank, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        for i in range(len(m)):
            if i != rank and m[i][c] != 0:
                f = m[i][c] / m[rank][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[rank])]
        rank += 1
    return rank


def det_leibniz(rows) -> int:
    n = len(rows)
    total = 0
    for perm in itertools.permutations(range(n)):
        inv = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        prod = 1
        for i in range(n):
            prod *= rows[i][perm[i]]
            if not prod:
                break
        total += (-1) ** inv * prod
    return total


def certificate_naive(D, S) -> bool:
    S = set(S)
    if not S or len(S) % 2:
        return False
    for v in S:
        nv = {u for u in S if D.beats(v, u)}
        for w in range(D.k):
            if w == v:
                continue
            nw = {u for u in S if D.beats(w, u)}
            if nv <= nw:
                return False
    return True


def geometric_tail_exact(p: Fraction, terms: int = 400) -> float:
    """E[(1/p - X) 1(X <= 1/p)] for a single Geometric(p) on {1, 2, ...}."""
    mean = 1 / p
    total = Fraction(0)
    for x in range(1, terms):
        if x > mean:
            break
        total += (mean - x) * (1 - p) ** (x - 1) * p
    return float(total)


def valid_pairs_bruteforce(D, v, w):
    A = {x for x in range(D.k) if D.beats(v, x) and D.beats(w, x)}
    B = {x for x in range(D.k) if D.beats(x, v) and D.beats(x, w)}
    arcs = sorted(D.arcs)
    out = set()
    for x, y in itertools.combinations(arcs, 2):
        if x[0] in A and y[0] in A and x[1] in B and y[1] in B and len({*x, *y}) == 4:
            out.add(frozenset((x, y)))
    return out
