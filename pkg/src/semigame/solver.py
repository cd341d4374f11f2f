"""Exact values of semi-restricted games by backward induction.

``S_D(r)`` is Norman's expected score under optimal play from restriction
vector ``r``.  At each state Rei picks a mixture ``p`` over ``supp(r)`` and
Norman best-responds, so

    S_D(r) = min_p max_v  sum_u p_u * (A[v][u] + S_D(r - e_u))

which is one small LP per state.  States are swept in order of increasing
total, so every child is solved before its parent.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from semigame.algebra import fmt_rational, parse_rational
from semigame.errors import InputError, InternalError
from semigame.graph import Digraph
from semigame.simplex import linprog_exact
from semigame.strategies import Distribution, StrategySpec, realize, support_of

State = tuple[int, ...]

CACHE_MAGIC = "semigame-cache v1"


def _state(D: Digraph, r: Iterable[int]) -> State:
    r = tuple(int(x) for x in r)
    if len(r) != D.k:
        raise InputError(f"restriction vector {r} has length {len(r)}, expected {D.k}")
    if any(x < 0 for x in r):
        raise InputError(f"restriction vector {r} has a negative entry")
    return r


def minus(r: State, u: int) -> State:
    return r[:u] + (r[u] - 1,) + r[u + 1 :]


def box_states(box: State) -> list[State]:
    """All ``r <= box`` ordered by total, then lexicographically."""
    states = list(itertools.product(*(range(b + 1) for b in box)))
    states.sort(key=lambda s: (sum(s), s))
    return states


class ValueTable:
    """Solved values ``r -> S_D(r)`` for one digraph, plus the LP witnesses."""

    def __init__(self, digraph: Digraph, backend: str = "exact"):
        if backend not in ("exact", "float"):
            raise InputError(f"unknown backend {backend!r}")
        self.digraph = digraph
        self.backend = backend
        zero = (0,) * digraph.k
        self.values: dict[State, Fraction | float] = {zero: Fraction(0) if backend == "exact" else 0.0}
        self.witnesses: dict[State, Distribution] = {}

    @property
    def fingerprint(self) -> str:
        return self.digraph.fingerprint

    @property
    def level(self) -> int:
        return max(sum(r) for r in self.values)

    def __contains__(self, r) -> bool:
        return tuple(r) in self.values

    def __getitem__(self, r) -> Fraction:
        try:
            return self.values[tuple(r)]
        except KeyError:
            raise InputError(f"state {tuple(r)} is not solved") from None

    def __len__(self) -> int:
        return len(self.values)

    def witness(self, r) -> Distribution:
        """Optimal mixture at ``r``; recomputed from the children if not stored."""
        r = tuple(r)
        if r not in self.witnesses:
            if r not in self.values:
                raise InputError(f"state {r} is not solved")
            if self.backend != "exact":
                raise InputError("witnesses are only available from the exact backend")
            value, wit = solve_lp(state_lp(self.digraph, r, self))
            if value != self.values[r]:
                raise InternalError(f"re-solved value at {r} differs from the stored one")
            self.witnesses[r] = wit
        return self.witnesses[r]

    def save(self, path: str) -> None:
        save_cache(self, path)


@dataclass
class StateLP:
    """``min t`` s.t. ``sum_u p_u (A[v][u] + child_u) <= t`` for all v, ``p`` on the simplex over ``support``."""

    k: int
    support: tuple[int, ...]
    payoff: list[list[Fraction]]  # payoff[v][i] for u = support[i]

    def constraint_rows(self):
        return [row + [Fraction(-1)] for row in self.payoff]


def state_lp(D: Digraph, r: State, table: ValueTable) -> StateLP:
    supp = tuple(sorted(support_of(r)))
    if not supp:
        raise InputError("the zero state has no LP")
    children = [table[minus(r, u)] for u in supp]
    payoff = [[Fraction(D.table[v][u]) + c for u, c in zip(supp, children)] for v in range(D.k)]
    return StateLP(D.k, supp, payoff)


def solve_lp(lp: StateLP) -> tuple[Fraction, Distribution]:
    """Exact optimum and a witness mixture, both re-verified by substitution."""
    m = len(lp.support)
    c = [Fraction(0)] * m + [Fraction(1)]
    res = linprog_exact(
        c,
        A_ub=lp.constraint_rows(),
        b_ub=[0] * lp.k,
        A_eq=[[1] * m + [0]],
        b_eq=[1],
        free=[m],
    )
    if not res.ok:
        raise InternalError(f"state LP reported {res.status}")
    p, t = res.x[:m], res.x[m]
    probs = [Fraction(0)] * lp.k
    for u, x in zip(lp.support, p):
        probs[u] = x
    wit = Distribution(probs, lp.support)
    rows = [sum(x * a for x, a in zip(p, row)) for row in lp.payoff]
    if max(rows) != t:
        raise InternalError("LP witness does not reproduce the optimal value")
    return t, wit


def _solve_lp_float(lp: StateLP) -> tuple[float, tuple[float, ...]]:
    from scipy.optimize import linprog

    m = len(lp.support)
    A = [[float(x) for x in row] + [-1.0] for row in lp.payoff]
    res = linprog(
        [0.0] * m + [1.0],
        A_ub=A,
        b_ub=[0.0] * lp.k,
        A_eq=[[1.0] * m + [0.0]],
        b_eq=[1.0],
        bounds=[(0, None)] * m + [(None, None)],
        method="highs",
    )
    if res.status != 0:
        raise InternalError(f"float state LP failed: {res.message}")
    return float(res.x[m]), tuple(float(x) for x in res.x[:m])


def solve_box(D: Digraph, box: Sequence[int], table: ValueTable | None = None, backend: str = "exact") -> ValueTable:
    """Solve every state ``r <= box`` in level order; reuses anything already in ``table``."""
    box = _state(D, box)
    if table is None:
        table = ValueTable(D, backend)
    elif table.digraph != D:
        raise InputError("value table belongs to a different digraph")
    for r in box_states(box):
        if r in table.values:
            continue
        if table.backend == "exact":
            val, wit = solve_lp(state_lp(D, r, table))
            table.values[r] = val
            table.witnesses[r] = wit
        else:
            lp = _float_state_lp(D, r, table)
            table.values[r] = _solve_lp_float(lp)[0]
    return table


def _float_state_lp(D: Digraph, r: State, table: ValueTable) -> StateLP:
    supp = tuple(sorted(support_of(r)))
    payoff = [[D.table[v][u] + table[minus(r, u)] for u in supp] for v in range(D.k)]
    return StateLP(D.k, supp, payoff)


def value(D: Digraph, r: Sequence[int], table: ValueTable | None = None) -> Fraction:
    r = _state(D, r)
    table = solve_box(D, r, table)
    return table[r]


# -- optimal faces -----------------------------------------------------------------


@dataclass
class OptimalFace:
    value: Fraction
    bounds: dict[int, tuple[Fraction, Fraction]]
    witness: Distribution

    @property
    def is_singleton(self) -> bool:
        return all(lo == hi for lo, hi in self.bounds.values())

    def to_dict(self) -> dict:
        return {
            "value": fmt_rational(self.value),
            "bounds": {str(u): [fmt_rational(lo), fmt_rational(hi)] for u, (lo, hi) in sorted(self.bounds.items())},
            "witness": self.witness.to_strings(),
            "singleton": self.is_singleton,
        }


def optimal_face(D: Digraph, r: Sequence[int], table: ValueTable | None = None) -> OptimalFace:
    """Per-coordinate extremes of Rei's optimal mixtures at ``r``.

    With the value ``t*`` fixed, minimise and maximise each ``p_u`` over
    ``{p : A'p <= t*}`` where ``A'`` includes the child values.
    """
    r = _state(D, r)
    table = solve_box(D, r, table)
    if table.backend != "exact":
        raise InputError("optimal faces need the exact backend")
    t = table[r]
    lp = state_lp(D, r, table)
    m = len(lp.support)
    bounds = {}
    for i, u in enumerate(lp.support):
        ext = []
        for sign in (1, -1):
            c = [Fraction(0)] * m
            c[i] = Fraction(sign)
            res = linprog_exact(c, A_ub=lp.payoff, b_ub=[t] * lp.k, A_eq=[[1] * m], b_eq=[1])
            if not res.ok:
                raise InternalError(f"face LP at {r} reported {res.status}")
            ext.append(res.x[i])
        bounds[u] = (ext[0], ext[1])
    wit = table.witness(r)
    for u, (lo, hi) in bounds.items():
        if not lo <= wit[u] <= hi:
            raise InternalError(f"witness at {r} lies outside the face bounds for vertex {u}")
    return OptimalFace(t, bounds, wit)


# -- best responses against a fixed Rei strategy -----------------------------------


def best_response_value(D: Digraph, r: Sequence[int], rei: StrategySpec) -> Fraction:
    """``S_D(r; R)``: Norman best-responds each round to the fixed mixture of ``rei``."""
    return best_response_table(D, r, rei)[_state(D, r)]


def best_response_table(D: Digraph, box: Sequence[int], rei: StrategySpec) -> dict[State, Fraction]:
    box = _state(D, box)
    if getattr(rei, "player", None) != "rei":
        raise InputError(f"{type(rei).__name__} is not a strategy for Rei")
    out: dict[State, Fraction] = {}
    for r in box_states(box):
        if not any(r):
            out[r] = Fraction(0)
            continue
        p = realize(rei, D, r)
        gain = max(
            sum((p[u] * D.table[v][u] for u in p.support if D.table[v][u]), Fraction(0)) for v in range(D.k)
        )
        out[r] = gain + sum((p[u] * out[minus(r, u)] for u in p.support), Fraction(0))
    return out


# -- structural checks ---------------------------------------------------------------


def alpha(D: Digraph, u: int, v: int) -> int:
    """Switch cost: 2 if some ``u -> x -> v``; 0 if ``N+(u)`` and ``N-(v)`` are both empty; else 1."""
    D._check_vertex(u)
    D._check_vertex(v)
    if u == v:
        raise InputError("alpha needs two distinct vertices")
    if D.out_masks[u] & D.in_masks[v]:
        return 2
    if not (D.out_masks[u] | D.in_masks[v]):
        return 0
    return 1


@dataclass
class SwitchViolation:
    r: State
    u: int
    v: int
    lhs: Fraction
    rhs: Fraction
    strict: bool


@dataclass
class SwitchReport:
    violations: list[SwitchViolation] = field(default_factory=list)
    checked: int = 0
    strict_checked: int = 0

    @property
    def ok(self) -> bool:
        return not self.violations


def check_switch_lemma(D: Digraph, box: Sequence[int], table: ValueTable | None = None) -> SwitchReport:
    """Check ``S(r - e_u) <= S(r - e_v) + alpha(u, v)`` for all ``r <= box`` with ``r_u, r_v >= 1``.

    The inequality must be strict when ``N-(u)`` is nonempty or ``alpha = 2``.
    """
    box = _state(D, box)
    table = solve_box(D, box, table)
    report = SwitchReport()
    for r in box_states(box):
        for u, v in itertools.permutations(range(D.k), 2):
            if r[u] < 1 or r[v] < 1:
                continue
            a = alpha(D, u, v)
            lhs = table[minus(r, u)]
            rhs = table[minus(r, v)] + a
            strict = bool(D.in_masks[u]) or a == 2
            report.checked += 1
            report.strict_checked += strict
            if lhs > rhs or (strict and lhs == rhs):
                report.violations.append(SwitchViolation(r, u, v, lhs, rhs, strict))
    return report


def lower_bound(D: Digraph, r: Sequence[int]) -> int:
    """``max_v sum_{N+(v)} r_u - sum_{N-(v)} r_u``: Norman playing one fixed vertex throughout."""
    r = _state(D, r)
    return max(sum(D.table[v][u] * r[u] for u in range(D.k)) for v in range(D.k))


def lower_bound_uniform(D: Digraph, n: int) -> int:
    return max(D.out_degree(v) - D.in_degree(v) for v in D.vertices()) * n if D.k else 0


# -- greedy closed form on the 3-cycle ------------------------------------------------


def greedy_diagonal_values(D: Digraph, n_max: int) -> list[Fraction]:
    """``S(n, n, n)`` for ``n = 0..n_max`` on the directed 3-cycle via the greedy recursion.

    Greedy is optimal on the 3-cycle, so this equals the LP sweep.  Works
    with ``V(r) = 3**total(r) * S(r)``, which is an integer.
    """
    if D.k != 3 or len(D.arcs) != 3 or not D.is_eulerian():
        raise InputError("greedy values are defined only on the directed 3-cycle")
    N = n_max
    pow3 = [3**m for m in range(3 * N + 2)]
    # winner of each pair of vertices
    win = {(a, b): (a if D.beats(a, b) else b) for a, b in itertools.combinations(range(3), 2)}
    grid = [[[0] * (N + 1) for _ in range(N + 1)] for _ in range(N + 1)]

    def get(r):
        return grid[r[0]][r[1]][r[2]]

    for a in range(N + 1):
        for b in range(N + 1):
            for c in range(N + 1):
                r = (a, b, c)
                m = a + b + c
                if m == 0:
                    continue
                supp = [v for v in range(3) if r[v]]
                if len(supp) == 3:
                    val = sum(get(minus(r, v)) for v in range(3))
                elif len(supp) == 1:
                    val = pow3[m] + 3 * get(minus(r, supp[0]))
                else:
                    w = win[tuple(supp)]
                    lose = supp[0] if w == supp[1] else supp[1]
                    val = pow3[m - 1] + 2 * get(minus(r, w)) + get(minus(r, lose))
                grid[a][b][c] = val
    return [Fraction(grid[n][n][n], pow3[3 * n]) for n in range(N + 1)]


# -- cache files ------------------------------------------------------------------------


def save_cache(table: ValueTable, path: str) -> None:
    with open(path, "w") as fh:
        fh.write(f"{CACHE_MAGIC} {table.fingerprint}\n")
        for r in sorted(table.values, key=lambda s: (sum(s), s)):
            v = table.values[r]
            cell = fmt_rational(v) if table.backend == "exact" else repr(float(v))
            fh.write(",".join(str(x) for x in r) + "," + cell + "\n")


def load_cache(path: str, D: Digraph, backend: str = "exact") -> ValueTable:
    """Read a cache file, checking the fingerprint and that every child of a stored state is stored."""
    table = ValueTable(D, backend)
    with open(path) as fh:
        header = fh.readline().rstrip("\n")
        if header != f"{CACHE_MAGIC} {D.fingerprint}":
            raise InputError(f"{path}: header {header!r} does not match digraph fingerprint {D.fingerprint}")
        for lineno, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            cells = line.split(",")
            if len(cells) != D.k + 1:
                raise InputError(f"{path}:{lineno}: expected {D.k + 1} fields, got {len(cells)}")
            try:
                r = tuple(int(x) for x in cells[:-1])
            except ValueError:
                raise InputError(f"{path}:{lineno}: non-integer restriction entry") from None
            val = parse_rational(cells[-1]) if backend == "exact" else float(cells[-1])
            table.values[r] = val
    for r in table.values:
        for u in support_of(r):
            if minus(r, u) not in table.values:
                raise InputError(f"{path}: state {r} is stored but its child {minus(r, u)} is not")
    return table


def cache_path(cache_dir: str | None, D: Digraph, backend: str = "exact") -> str:
    cache_dir = cache_dir or os.environ.get("SEMIGAME_CACHE", "cache")
    os.makedirs(cache_dir, exist_ok=True)
    return os.path.join(cache_dir, f"{D.fingerprint}-{backend}.csv")

