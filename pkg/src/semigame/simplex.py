"""Exact two-phase tableau simplex over the rationals with Bland's rule.

Small dense problems only: every coefficient is a :class:`Fraction` and no
rounding ever happens, so degenerate optima (many tight constraints) are
handled exactly and Bland's rule guarantees termination.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from semigame.errors import InputError

ZERO = Fraction(0)
ONE = Fraction(1)


@dataclass
class LPResult:
    status: str  # "optimal", "infeasible" or "unbounded"
    x: list[Fraction] | None = None
    value: Fraction | None = None

    @property
    def ok(self) -> bool:
        return self.status == "optimal"


def _pivot(rows: list[list[Fraction]], obj: list[Fraction], basis: list[int], r: int, c: int) -> None:
    prow = rows[r]
    piv = prow[c]
    if piv != ONE:
        inv = ONE / piv
        rows[r] = prow = [x * inv if x else x for x in prow]
    nz = [(j, x) for j, x in enumerate(prow) if x]
    for i, row in enumerate(rows):
        if i != r:
            f = row[c]
            if f:
                for j, x in nz:
                    row[j] -= f * x
    f = obj[c]
    if f:
        for j, x in nz:
            obj[j] -= f * x
    basis[r] = c


def _run(rows, obj, basis, allowed: int) -> str:
    """Minimise; ``obj`` holds reduced costs with ``-z`` in the last slot."""
    while True:
        enter = next((j for j in range(allowed) if obj[j] < 0), None)
        if enter is None:
            return "optimal"
        best = None
        for i, row in enumerate(rows):
            a = row[enter]
            if a > 0:
                ratio = row[-1] / a
                key = (ratio, basis[i])
                if best is None or key < best[0]:
                    best = (key, i)
        if best is None:
            return "unbounded"
        _pivot(rows, obj, basis, best[1], enter)


def linprog_exact(
    c: Sequence,
    A_ub: Sequence[Sequence] = (),
    b_ub: Sequence = (),
    A_eq: Sequence[Sequence] = (),
    b_eq: Sequence = (),
    free: Sequence[int] = (),
) -> LPResult:
    """Minimise ``c x`` s.t. ``A_ub x <= b_ub``, ``A_eq x = b_eq``, ``x >= 0`` except ``free``."""
    n = len(c)
    if len(A_ub) != len(b_ub) or len(A_eq) != len(b_eq):
        raise InputError("constraint matrix and right-hand side lengths differ")
    for row in (*A_ub, *A_eq):
        if len(row) != n:
            raise InputError("constraint row length differs from objective length")
    free = sorted(set(free))
    # column layout: x (n), negative parts of free vars, slacks, artificials
    ncols_x = n + len(free)
    n_ub, n_eq = len(A_ub), len(A_eq)
    m = n_ub + n_eq

    def expand(row):
        row = [Fraction(x) for x in row]
        return row + [-row[j] for j in free]

    raw = [(expand(r), Fraction(b), True) for r, b in zip(A_ub, b_ub)]
    raw += [(expand(r), Fraction(b), False) for r, b in zip(A_eq, b_eq)]
    needs_art = []
    rows = []
    for i, (coef, b, is_ub) in enumerate(raw):
        slack = [ZERO] * n_ub
        if is_ub:
            slack[i] = ONE
        if b < 0:
            coef = [-x for x in coef]
            slack = [-x for x in slack]
            b = -b
        rows.append(coef + slack)
        needs_art.append(not (is_ub and slack[i] == ONE))
    arts = [i for i in range(m) if needs_art[i]]
    n_art = len(arts)
    ncols = ncols_x + n_ub + n_art
    basis = [0] * m
    for i in range(m):
        art = [ZERO] * n_art
        if needs_art[i]:
            a = arts.index(i)
            art[a] = ONE
            basis[i] = ncols_x + n_ub + a
        else:
            basis[i] = ncols_x + i
        rows[i] = rows[i] + art + [raw[i][1] if raw[i][1] >= 0 else -raw[i][1]]

    # phase 1
    if n_art:
        obj = [ZERO] * (ncols + 1)
        for a in range(n_art):
            obj[ncols_x + n_ub + a] = ONE
        for i in arts:
            obj = [o - x for o, x in zip(obj, rows[i])]
        _run(rows, obj, basis, ncols)
        if -obj[-1] != 0:
            return LPResult("infeasible")
        # drive artificials out of the basis, dropping redundant rows
        first_art = ncols_x + n_ub
        i = 0
        while i < len(rows):
            if basis[i] >= first_art:
                j = next((j for j in range(first_art) if rows[i][j] != 0), None)
                if j is None:
                    del rows[i]
                    del basis[i]
                    continue
                _pivot(rows, [ZERO] * (ncols + 1), basis, i, j)
            i += 1
        rows = [row[:first_art] + [row[-1]] for row in rows]
        ncols = first_art

    cost = [Fraction(x) for x in c] + [-Fraction(c[j]) for j in free] + [ZERO] * n_ub
    obj = cost + [ZERO]
    for i, b in enumerate(basis):
        cb = cost[b]
        if cb:
            obj = [o - cb * x for o, x in zip(obj, rows[i])]
    status = _run(rows, obj, basis, ncols)
    if status != "optimal":
        return LPResult(status)
    sol = [ZERO] * ncols
    for i, b in enumerate(basis):
        sol[b] = rows[i][-1]
    x = sol[:n]
    for idx, j in enumerate(free):
        x[j] -= sol[n + idx]
    value = sum((Fraction(cj) * xj for cj, xj in zip(c, x)), ZERO)
    return LPResult("optimal", x, value)
