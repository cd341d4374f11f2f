"""Check that proportional play is optimal in doubly restricted games, and compare with simulation."""

import argparse

from semigame.algebra import fmt_rational
from semigame.restricted import (
    pairs_up_to,
    restricted_best_response,
    restricted_value,
    rps,
    simulate_uniform,
    uniform_strategy,
)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n-max", type=int, default=5)
    ap.add_argument("--reps", type=int, default=20000)
    args = ap.parse_args()
    G = rps()
    pairs = pairs_up_to(G, args.n_max)
    bad = 0
    for pair in pairs:
        M = restricted_value(G, pair)
        alice = restricted_best_response(G, pair, uniform_strategy("bob"), "alice")
        bob = restricted_best_response(G, pair, uniform_strategy("alice"), "bob")
        bad += alice != M or bob != M
    print(f"{len(pairs)} pairs with N <= {args.n_max}; mismatches: {bad}")
    for pair in [p for p in pairs if all(p.a) and all(p.b)][-3:]:
        mean, se = simulate_uniform(G, pair, args.reps, seed=0)
        print(f"a={pair.a} b={pair.b} M={fmt_rational(restricted_value(G, pair))} simulated {mean:.4f} +- {se:.4f}")


if __name__ == "__main__":
    main()
