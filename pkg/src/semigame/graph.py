"""Digraphs, named generators, tournament enumeration and the arc switching.

Vertices are ``0..k-1``.  An arc ``(u, v)`` means ``u -> v``: a player on
``u`` beats a player on ``v``.  A :class:`Digraph` is immutable and keeps a
dense ``k x k`` orientation table next to the arc set, so neighbourhood
queries are O(1) lookups into precomputed bitmasks.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import re
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator

import numpy as np

from semigame.errors import InputError

ENUMERATION_CAP = 7

Arc = tuple[int, int]


class Digraph:
    """Loop-free digraph with at most one arc between any pair of vertices."""

    def __init__(self, k: int, arcs: Iterable[Arc] = ()):
        if not isinstance(k, (int, np.integer)) or k < 0:
            raise InputError(f"vertex count must be a non-negative integer, got {k!r}")
        k = int(k)
        table = [[0] * k for _ in range(k)]
        arc_set = set()
        for arc in arcs:
            u, v = (int(x) for x in arc)
            if not (0 <= u < k and 0 <= v < k):
                raise InputError(f"arc {(u, v)} has an endpoint outside 0..{k - 1}")
            if u == v:
                raise InputError(f"self-loop at vertex {u}")
            if table[u][v] == -1:
                raise InputError(f"arcs {(u, v)} and {(v, u)} both present")
            table[u][v] = 1
            table[v][u] = -1
            arc_set.add((u, v))
        self._k = k
        self._arcs = frozenset(arc_set)
        self._table = tuple(tuple(row) for row in table)

    @property
    def k(self) -> int:
        return self._k

    @property
    def arcs(self) -> frozenset[Arc]:
        return self._arcs

    @property
    def table(self) -> tuple[tuple[int, ...], ...]:
        """Orientation table: ``+1`` if i->j, ``-1`` if j->i, else 0."""
        return self._table

    def vertices(self) -> range:
        return range(self._k)

    def sorted_arcs(self) -> list[Arc]:
        return sorted(self._arcs)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Digraph):
            return NotImplemented
        return self._k == other._k and self._arcs == other._arcs

    def __hash__(self) -> int:
        return hash((self._k, self._arcs))

    def __repr__(self) -> str:
        return f"Digraph(k={self._k}, arcs={self.sorted_arcs()})"

    # -- neighbourhoods ---------------------------------------------------

    def _check_vertex(self, v: int) -> None:
        if not (0 <= v < self._k):
            raise InputError(f"vertex {v} out of range 0..{self._k - 1}")

    @cached_property
    def out_masks(self) -> tuple[int, ...]:
        return tuple(
            sum(1 << u for u in range(self._k) if self._table[v][u] == 1)
            for v in range(self._k)
        )

    @cached_property
    def in_masks(self) -> tuple[int, ...]:
        return tuple(
            sum(1 << u for u in range(self._k) if self._table[v][u] == -1)
            for v in range(self._k)
        )

    def out_neighbors(self, v: int) -> frozenset[int]:
        self._check_vertex(v)
        return frozenset(u for u in range(self._k) if self._table[v][u] == 1)

    def in_neighbors(self, v: int) -> frozenset[int]:
        self._check_vertex(v)
        return frozenset(u for u in range(self._k) if self._table[v][u] == -1)

    def out_degree(self, v: int) -> int:
        self._check_vertex(v)
        return self.out_masks[v].bit_count()

    def in_degree(self, v: int) -> int:
        self._check_vertex(v)
        return self.in_masks[v].bit_count()

    def beats(self, u: int, v: int) -> bool:
        return self._table[u][v] == 1

    # -- predicates -------------------------------------------------------

    def is_tournament(self) -> bool:
        return len(self._arcs) == self._k * (self._k - 1) // 2

    def is_eulerian(self) -> bool:
        return all(
            self.out_masks[v].bit_count() == self.in_masks[v].bit_count()
            for v in range(self._k)
        )

    # -- serialization ----------------------------------------------------

    def to_dict(self) -> dict:
        return {"k": self._k, "arcs": [list(a) for a in self.sorted_arcs()]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @cached_property
    def fingerprint(self) -> str:
        return hashlib.sha256(self.to_json().encode()).hexdigest()[:16]

    @classmethod
    def from_json(cls, text: str) -> "Digraph":
        return digraph_from_json(text)


def _line_col(text: str, pos: int) -> tuple[int, int]:
    line = text.count("\n", 0, pos) + 1
    col = pos - (text.rfind("\n", 0, pos) + 1) + 1
    return line, col


_ARC_RE = re.compile(r"\[\s*(-?\d+)\s*,\s*(-?\d+)\s*\]")


def digraph_from_json(text: str) -> Digraph:
    """Parse ``{"k": int, "arcs": [[u, v], ...]}``.

    Invariant violations are reported with the line and column of the
    offending arc in ``text``.
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(data, dict) or "k" not in data or "arcs" not in data:
        raise InputError('digraph JSON must be an object with "k" and "arcs"')
    k = data["k"]
    if not isinstance(k, int) or k < 0:
        raise InputError(f'"k" must be a non-negative integer, got {k!r}')
    arcs_at = text.find('"arcs"')
    positions = [m.start() for m in _ARC_RE.finditer(text, arcs_at if arcs_at >= 0 else 0)]
    seen: dict[frozenset, Arc] = {}
    for i, arc in enumerate(data["arcs"]):
        where = ""
        if i < len(positions):
            line, col = _line_col(text, positions[i])
            where = f"line {line}, column {col}: "
        if not (isinstance(arc, list) and len(arc) == 2 and all(isinstance(x, int) for x in arc)):
            raise InputError(f"{where}arc #{i} must be a pair of integers, got {arc!r}")
        u, v = arc
        if not (0 <= u < k and 0 <= v < k):
            raise InputError(f"{where}arc #{i} {arc} has an endpoint outside 0..{k - 1}")
        if u == v:
            raise InputError(f"{where}arc #{i} {arc} is a self-loop")
        key = frozenset((u, v))
        if key in seen:
            raise InputError(f"{where}arc #{i} {arc} duplicates the pair of {list(seen[key])}")
        seen[key] = (u, v)
    return Digraph(k, [tuple(a) for a in data["arcs"]])


# -- named generators -----------------------------------------------------


def empty(k: int) -> Digraph:
    return Digraph(k)


def cycle3() -> Digraph:
    """The rock-paper-scissors digraph 0 -> 1 -> 2 -> 0."""
    return Digraph(3, [(0, 1), (1, 2), (2, 0)])


def directed_path(n: int) -> Digraph:
    if n < 1:
        raise InputError("a directed path needs at least one vertex")
    return Digraph(n, [(i, i + 1) for i in range(n - 1)])


def circulant(k: int, offsets: Iterable[int]) -> Digraph:
    """Arcs ``i -> i+s (mod k)`` for every ``s`` in ``offsets``."""
    offsets = sorted({int(s) % k for s in offsets}) if k else []
    if 0 in offsets:
        raise InputError("offset 0 would create self-loops")
    if any((k - s) % k in offsets for s in offsets):
        raise InputError(f"offsets {offsets} put two arcs between some pair (s and k-s both present)")
    return Digraph(k, [(i, (i + s) % k) for i in range(k) for s in offsets])


def _pairs(k: int) -> list[Arc]:
    return list(itertools.combinations(range(k), 2))


def random_tournament(k: int, seed: int) -> Digraph:
    """Orient each pair ``i < j`` by an independent fair coin."""
    if k < 1:
        raise InputError("k must be at least 1")
    pairs = _pairs(k)
    bits = np.random.default_rng(seed).integers(0, 2, size=len(pairs))
    return Digraph(k, [(i, j) if b == 0 else (j, i) for (i, j), b in zip(pairs, bits)])


def random_digraph(k: int, seed: int) -> Digraph:
    """Each pair is independently absent, ``i -> j`` or ``j -> i`` with probability 1/3."""
    pairs = _pairs(k)
    states = np.random.default_rng(seed).integers(0, 3, size=len(pairs))
    arcs = []
    for (i, j), s in zip(pairs, states):
        if s == 1:
            arcs.append((i, j))
        elif s == 2:
            arcs.append((j, i))
    return Digraph(k, arcs)


def make_named(name: str, *params) -> Digraph:
    """Build one of the named digraphs: cycle3, path, circulant, empty, random."""
    if name in ("cycle3", "rps"):
        return cycle3()
    if name == "path":
        return directed_path(*params)
    if name == "circulant":
        return circulant(*params)
    if name == "empty":
        return empty(*params)
    if name == "random":
        return random_tournament(*params)
    raise InputError(f"unknown generator {name!r}")


def parse_graph_spec(spec: str) -> Digraph:
    """``cycle3 | path:<n> | circulant:<k>:<offsets> | random:<k>:<seed> | empty:<k>`` or a JSON file."""
    parts = spec.split(":")
    try:
        if parts[0] in ("cycle3", "rps") and len(parts) == 1:
            return cycle3()
        if parts[0] == "path" and len(parts) == 2:
            return directed_path(int(parts[1]))
        if parts[0] == "circulant" and len(parts) == 3:
            return circulant(int(parts[1]), [int(s) for s in parts[2].split(",") if s])
        if parts[0] == "random" and len(parts) == 3:
            return random_tournament(int(parts[1]), int(parts[2]))
        if parts[0] == "empty" and len(parts) == 2:
            return empty(int(parts[1]))
    except ValueError as exc:
        if isinstance(exc, InputError):
            raise
        raise InputError(f"bad graph specifier {spec!r}: {exc}") from None
    try:
        with open(spec) as fh:
            return digraph_from_json(fh.read())
    except OSError:
        raise InputError(f"{spec!r} is neither a named generator nor a readable file") from None


# -- enumeration ------------------------------------------------------------


def _check_cap(k: int, cap: int | None) -> None:
    cap = ENUMERATION_CAP if cap is None else cap
    if k > cap:
        raise InputError(
            f"refusing to enumerate tournaments on {k} vertices (cap {cap}); "
            "pass a larger cap explicitly to override"
        )


def tournament_from_mask(k: int, mask: int) -> Digraph:
    """Bit ``i`` of ``mask`` orients the ``i``-th lexicographic pair (0 means low -> high)."""
    return Digraph(
        k,
        [(i, j) if not (mask >> b) & 1 else (j, i) for b, (i, j) in enumerate(_pairs(k))],
    )


def enumerate_tournaments(k: int, cap: int | None = None) -> Iterator[Digraph]:
    """All labeled tournaments on ``k`` vertices, in increasing mask order."""
    _check_cap(k, cap)
    for mask in range(1 << (k * (k - 1) // 2)):
        yield tournament_from_mask(k, mask)


def eulerian_tournament_masks(k: int, cap: int | None = None) -> Iterator[int]:
    """Masks of the Eulerian tournaments on ``k`` vertices, increasing.

    Depth-first over pairs from the most significant bit down, pruning any
    vertex whose out- or in-degree exceeds ``(k-1)/2``.
    """
    _check_cap(k, cap)
    if k % 2 == 0:
        return
    half = (k - 1) // 2
    pairs = _pairs(k)
    out = [0] * k
    inn = [0] * k

    def rec(b: int, mask: int) -> Iterator[int]:
        if b < 0:
            yield mask
            return
        i, j = pairs[b]
        # bit 0: i -> j
        if out[i] < half and inn[j] < half:
            out[i] += 1
            inn[j] += 1
            yield from rec(b - 1, mask)
            out[i] -= 1
            inn[j] -= 1
        if out[j] < half and inn[i] < half:
            out[j] += 1
            inn[i] += 1
            yield from rec(b - 1, mask | (1 << b))
            out[j] -= 1
            inn[i] -= 1

    masks = list(rec(len(pairs) - 1, 0))
    masks.sort()
    yield from masks


def enumerate_eulerian_tournaments(k: int, cap: int | None = None) -> Iterator[Digraph]:
    for mask in eulerian_tournament_masks(k, cap):
        yield tournament_from_mask(k, mask)


# -- switching between Eulerian tournaments --------------------------------


@dataclass(frozen=True, order=True)
class ArcPair:
    first: Arc
    second: Arc

    def __post_init__(self):
        ends = (*self.first, *self.second)
        if len(set(ends)) != 4:
            raise InputError(f"arcs {self.first} and {self.second} are not vertex-disjoint")


def _require_eulerian_tournament(D: Digraph) -> int:
    if not (D.is_tournament() and D.is_eulerian() and D.k % 2 == 1):
        raise InputError("expected an Eulerian tournament on an odd number of vertices")
    return (D.k - 1) // 2


def in_E_vw(D: Digraph, v: int, w: int) -> bool:
    """True iff ``v -> w`` and ``|N+(v) & N+(w)| = n - 1`` where ``k = 2n + 1``."""
    n = _require_eulerian_tournament(D)
    D._check_vertex(v)
    D._check_vertex(w)
    if not D.beats(v, w):
        return False
    return (D.out_masks[v] & D.out_masks[w]).bit_count() == n - 1


def _mask_members(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def valid_pairs(D: Digraph, v: int, w: int) -> list[ArcPair]:
    """Unordered vertex-disjoint pairs of arcs from ``N+(v)&N+(w)`` to ``N-(v)&N-(w)``."""
    if not in_E_vw(D, v, w):
        raise InputError(f"digraph is not in E^{{{v},{w}}}")
    A = _mask_members(D.out_masks[v] & D.out_masks[w])
    B = set(_mask_members(D.in_masks[v] & D.in_masks[w]))
    arcs = [(a, b) for a in A for b in sorted(B) if D.beats(a, b)]
    return [
        ArcPair(x, y)
        for x, y in itertools.combinations(arcs, 2)
        if x[0] != y[0] and x[1] != y[1]
    ]


def _switched_arcs(arcs: set[Arc], a: int, b: int, v: int) -> None:
    # a -> b, v -> a, b -> v  become  b -> a, a -> v, v -> b
    for x, y in ((a, b), (v, a), (b, v)):
        arcs.remove((x, y))
        arcs.add((y, x))


def switch(D: Digraph, pair: ArcPair, v: int, w: int) -> Digraph:
    """Reverse the two triangles ``a_i b_i v`` for a D-valid pair of arcs."""
    if pair not in valid_pairs(D, v, w):
        raise InputError(f"{pair} is not a D-valid pair for (v, w) = ({v}, {w})")
    arcs = set(D.arcs)
    for a, b in (pair.first, pair.second):
        _switched_arcs(arcs, a, b, v)
    return Digraph(D.k, arcs)


def mixed_vertices(D: Digraph, v: int, w: int) -> list[int]:
    """Vertices with exactly one arc into ``{v, w}`` and one arc out of it."""
    vw = (1 << v) | (1 << w)
    return [
        x
        for x in D.vertices()
        if x not in (v, w)
        and (D.out_masks[x] & vw).bit_count() == 1
        and (D.in_masks[x] & vw).bit_count() == 1
    ]


def switch_preimages(D2: Digraph, v: int, w: int) -> list[Digraph]:
    """All ``D`` in E^{v,w} with ``switch(D, pair, v, w) == D2`` for some pair.

    Tries every assignment of the five mixed vertices of ``D2`` to the roles
    ``a1, b1, a2, b2, u``; anything other than exactly five mixed vertices
    means no preimage exists.
    """
    _require_eulerian_tournament(D2)
    mixed = mixed_vertices(D2, v, w)
    if len(mixed) != 5:
        return []
    found: dict[Digraph, None] = {}
    for a1, b1, a2, b2, _u in itertools.permutations(mixed):
        needed = [(b1, a1), (a1, v), (v, b1), (b2, a2), (a2, v), (v, b2)]
        if not all(arc in D2.arcs for arc in needed):
            continue
        arcs = set(D2.arcs)
        for a, b in ((a1, b1), (a2, b2)):
            # undo: b -> a, a -> v, v -> b  back to  a -> b, v -> a, b -> v
            for x, y in ((b, a), (a, v), (v, b)):
                arcs.remove((x, y))
                arcs.add((y, x))
        D = Digraph(D2.k, arcs)
        if not (D.is_eulerian() and in_E_vw(D, v, w)):
            continue
        pair = ArcPair(*sorted([(a1, b1), (a2, b2)]))
        if pair in valid_pairs(D, v, w) and switch(D, pair, v, w) == D2:
            found.setdefault(D)
    return list(found)


def switching_walk(D: Digraph, steps: int, seed: int, frozen: Iterable[int] = ()) -> Digraph:
    """Random walk over Eulerian tournaments by reversing directed triangles.

    Triangles touching a vertex in ``frozen`` are never reversed, so the
    neighbourhoods of those vertices are preserved.  The walk is lazy
    (non-triangles are skipped) and makes no claim of uniform mixing.
    """
    _require_eulerian_tournament(D)
    rng = np.random.default_rng(seed)
    free = [x for x in D.vertices() if x not in set(frozen)]
    if len(free) < 3:
        return D
    table = [list(row) for row in D.table]
    for _ in range(steps):
        x, y, z = (free[i] for i in rng.choice(len(free), size=3, replace=False))
        if table[x][y] == 1 and table[y][z] == 1 and table[z][x] == 1:
            pass
        elif table[x][z] == 1 and table[z][y] == 1 and table[y][x] == 1:
            pass
        else:
            continue
        for a, b in ((x, y), (y, z), (z, x)):
            table[a][b] = -table[a][b]
            table[b][a] = -table[b][a]
    arcs = [(i, j) for i in range(D.k) for j in range(D.k) if table[i][j] == 1]
    return Digraph(D.k, arcs)


def sample_E_vw(n: int, steps: int, seed: int) -> Digraph:
    """An element of E^{0,1} on ``2n + 1`` vertices, randomised by a switching walk.

    The circulant tournament with offsets ``1..n`` already has
    ``|N+(0) & N+(1)| = n - 1`` and ``0 -> 1``; the walk freezes 0 and 1.
    """
    if n < 1:
        raise InputError("n must be at least 1")
    base = circulant(2 * n + 1, range(1, n + 1))
    return switching_walk(base, steps, seed, frozen=(0, 1))
