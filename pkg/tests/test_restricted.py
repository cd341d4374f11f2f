import itertools
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from semigame.errors import InputError
from semigame.restricted import (
    BimatrixGame,
    RestrictionPair,
    pairs_up_to,
    proportional,
    restricted_best_response,
    restricted_value,
    rps,
    simulate_uniform,
    uniform_strategy,
)

TWO_BY_TWO = BimatrixGame([[1, 0], [0, 1]])


def test_value_examples():
    G = rps()
    assert restricted_value(G, RestrictionPair((2, 1, 3), (2, 1, 3))) == 0
    assert restricted_value(G, RestrictionPair((1, 1, 0), (0, 1, 1))) == Fraction(-1, 2)
    assert restricted_value(BimatrixGame([[Fraction(5, 2)]]), RestrictionPair((4,), (4,))) == 10
    assert restricted_value(G, RestrictionPair((0, 0, 0), (0, 0, 0))) == 0


def test_pair_invariants():
    with pytest.raises(InputError):
        RestrictionPair((1, 1), (1,))
    with pytest.raises(InputError):
        RestrictionPair((-1, 2), (1, 0))
    with pytest.raises(InputError):
        restricted_value(rps(), RestrictionPair((1, 1), (1, 1)))


@given(st.lists(st.integers(0, 4), min_size=3, max_size=3), st.lists(st.integers(0, 4), min_size=3, max_size=3),
       st.lists(st.integers(0, 4), min_size=3, max_size=3))
def test_value_is_bilinear_in_b(a, b1, b2):
    G = rps()
    N = sum(a)
    if N == 0 or sum(b1) != N or sum(b2) != N:
        return
    lhs = restricted_value(G, RestrictionPair([2 * x for x in a], [x + y for x, y in zip(b1, b2)]))
    rhs = restricted_value(G, RestrictionPair(a, b1)) + restricted_value(G, RestrictionPair(a, b2))
    assert lhs == rhs


def test_uniform_strategy():
    alice = uniform_strategy("alice")
    assert alice((2, 1), (0, 3)) == [Fraction(2, 3), Fraction(1, 3)]
    assert alice((0, 5), (5, 0)) == [0, 1]
    assert alice((1, 1), (0, 2)) == [Fraction(1, 2), Fraction(1, 2)]
    with pytest.raises(InputError):
        proportional((0, 0))
    with pytest.raises(InputError):
        uniform_strategy("carol")


@pytest.mark.parametrize("G", [rps(), TWO_BY_TWO, BimatrixGame([[2, -1], [0, 3]])])
def test_best_response_to_uniform_equals_value(G):
    for pair in pairs_up_to(G, 4):
        M = restricted_value(G, pair)
        assert restricted_best_response(G, pair, uniform_strategy("bob"), "alice") == M
        assert restricted_best_response(G, pair, uniform_strategy("alice"), "bob") == M


def test_non_uniform_opponent_can_be_exploited():
    def stubborn(a, b):
        # Bob plays his lowest-index remaining option
        j = next(i for i, x in enumerate(b) if x)
        return [1 if i == j else 0 for i in range(len(b))]

    exceeded = any(
        restricted_best_response(TWO_BY_TWO, pair, stubborn, "alice") > restricted_value(TWO_BY_TWO, pair)
        for pair in pairs_up_to(TWO_BY_TWO, 4)
    )
    assert exceeded


def test_opponent_support_violation():
    def bad(a, b):
        return [1, 0]

    with pytest.raises(InputError):
        restricted_best_response(TWO_BY_TWO, RestrictionPair((1, 1), (0, 2)), bad, "alice")


def test_monte_carlo_uniform_vs_uniform():
    G = rps()
    pair = RestrictionPair((3, 1, 0), (0, 2, 2))
    mean, se = simulate_uniform(G, pair, 10_000, seed=0)
    assert abs(mean - float(restricted_value(G, pair))) <= 4 * se


def test_game_json_round_trip():
    G = BimatrixGame([[Fraction(1, 2), -1], [0, 3]])
    assert BimatrixGame.from_json(G.to_json()) == G
    with pytest.raises(InputError):
        BimatrixGame.from_json('{"rows": 3, "cols": 2, "payoffs": [["1/2", "0"], ["1", "2"]]}')
    with pytest.raises(InputError):
        BimatrixGame([[1, 2], [3]])
