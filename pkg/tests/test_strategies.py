import itertools
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from semigame.algebra import skew_adjacency
from semigame.errors import InputError
from semigame.graph import Digraph, circulant, cycle3, directed_path, random_digraph
from semigame.solver import solve_box
from semigame.strategies import (
    Distribution,
    FixedVertex,
    GreedyRPS,
    ObliviousTable,
    OptimalFromTable,
    PerRoundBestResponse,
    TrimmedProportional,
    UniformUntilDepletion,
    ceil_two_thirds_power,
    gains,
    greedy_rps,
    norman_best_response,
    realize,
    spec_from_json,
    spec_to_json,
    trimmed_proportional,
    uniform_until_depletion,
)

third = Fraction(1, 3)


def test_distribution_validation():
    with pytest.raises(InputError):
        Distribution([Fraction(1, 2), Fraction(1, 3)])
    with pytest.raises(InputError):
        Distribution([2, -1])
    with pytest.raises(InputError):
        Distribution([Fraction(1, 2), Fraction(1, 2)], allowed=[0])


def test_greedy_examples():
    assert greedy_rps((5, 5, 5)) == Distribution([third] * 3)
    assert greedy_rps((100, 100, 1)) == Distribution([third] * 3)
    # 0 beats 1 on the 3-cycle, so with {0, 1} left vertex 0 gets 2/3
    assert greedy_rps((2, 1, 0)) == Distribution([2 * third, third, 0])
    assert greedy_rps((0, 0, 4)) == Distribution.point(3, 2)
    with pytest.raises(InputError):
        greedy_rps((1, 1, 1), directed_path(3))


@given(st.tuples(*[st.integers(0, 6)] * 3), st.tuples(*[st.integers(0, 6)] * 3))
def test_greedy_is_oblivious(r, s):
    if {i for i in range(3) if r[i]} == {i for i in range(3) if s[i]} and any(r):
        assert greedy_rps(r) == greedy_rps(s)


def test_uniform_until_depletion():
    D = Digraph(4, [(0, 1), (1, 2), (2, 3), (3, 0)])
    assert uniform_until_depletion(D, (3, 3, 3, 3)) == Distribution([Fraction(1, 4)] * 4)
    assert uniform_until_depletion(D, (0, 2, 0, 5)) == Distribution([0, Fraction(1, 2), 0, Fraction(1, 2)])
    assert uniform_until_depletion(D, (0, 1, 0, 0)) == Distribution.point(4, 1)


def test_trimmed_proportional():
    D = cycle3()
    assert realize(trimmed_proportional(D, (100, 100, 100)), D, (100, 100, 100)) == Distribution([third] * 3)
    spec = trimmed_proportional(D, (100, 4, 100))
    assert spec.threshold == 22 and spec.trimmed == (100, 0, 100)
    assert realize(spec, D, (100, 4, 100)) == Distribution([Fraction(1, 2), 0, Fraction(1, 2)])
    assert realize(spec, D, (0, 4, 3)) == Distribution([0, Fraction(1, 2), Fraction(1, 2)])
    assert trimmed_proportional(D, (1, 1, 1)).trimmed == (1, 1, 1)


@given(st.integers(0, 10**5))
def test_ceil_two_thirds_power(m):
    c = ceil_two_thirds_power(m)
    assert c**3 >= m * m and (c == 0 or (c - 1) ** 3 < m * m)


def test_norman_best_response():
    v, g = norman_best_response(cycle3(), [2 * third, third, 0])
    assert g == third and v == 0
    assert norman_best_response(circulant(5, [1, 2]), [Fraction(1, 5)] * 5)[1] == 0
    p = [Fraction(1, 8), Fraction(3, 8), Fraction(1, 2)]
    g = gains(directed_path(3), p)
    assert g[0] == g[1] == max(g)


@given(st.integers(1, 6), st.integers(0, 10**6), st.lists(st.integers(0, 5), min_size=6, max_size=6))
def test_gain_matches_skew_product(k, seed, w):
    w = w[:k]
    if not sum(w):
        w[-1] = 1
    D = random_digraph(k, seed)
    p = [Fraction(x, sum(w)) for x in w]
    assert norman_best_response(D, p)[1] == max(skew_adjacency(D).apply(p))


def test_realize_variants():
    D = cycle3()
    table = {frozenset(s): greedy_rps(tuple(1 if i in s else 0 for i in range(3)))
             for k in (1, 2, 3) for s in itertools.combinations(range(3), k)}
    obl = ObliviousTable(table)
    for r in itertools.product(range(3), repeat=3):
        if any(r):
            assert realize(obl, D, r) == realize(GreedyRPS(), D, r)
    T = solve_box(D, (2, 2, 2))
    assert realize(OptimalFromTable(T), D, (2, 1, 0)) == T.witness((2, 1, 0))
    assert realize(FixedVertex(2), D, (0, 0, 1)) == Distribution.point(3, 2)
    with pytest.raises(InputError):
        realize(PerRoundBestResponse(), D, (1, 1, 1))
    with pytest.raises(InputError):
        realize(ObliviousTable({}), D, (1, 0, 0))
    with pytest.raises(InputError):
        realize(OptimalFromTable(None), D, (1, 0, 0))


@pytest.mark.parametrize(
    "spec",
    [GreedyRPS(), UniformUntilDepletion(), TrimmedProportional((5, 2, 7)), FixedVertex(1), PerRoundBestResponse()],
)
def test_spec_json_round_trip(spec):
    assert spec_from_json(spec_to_json(spec)) == spec


def test_oblivious_table_json_round_trip():
    table = {frozenset({0, 2}): Distribution([third, 0, 2 * third]), frozenset({1}): Distribution.point(3, 1)}
    back = spec_from_json(spec_to_json(ObliviousTable(table)))
    assert back.table == table


def test_spec_json_rejects_wrong_player():
    with pytest.raises(InputError):
        spec_from_json('{"player": "norman", "variant": "greedy_rps", "params": {}}')
    with pytest.raises(InputError):
        spec_from_json('{"player": "rei", "variant": "nope"}')
