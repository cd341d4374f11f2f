"""Uniform play: E[kn - T]/sqrt(n) and the best-response excess over the lower bound."""

import argparse
import math

from semigame.graph import Digraph, cycle3
from semigame.simulate import depletion_stats, uniform_best_response_score
from semigame.solver import lower_bound_uniform

D4 = Digraph(4, [(0, 1), (1, 2), (2, 3), (3, 0), (0, 2), (1, 3)])


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--ns", default="100,400,1600")
    ap.add_argument("--reps", type=int, default=2000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    ns = [int(x) for x in args.ns.split(",")]
    print("graph,n,depletion/sqrt(n),excess/sqrt(n),excess_se/sqrt(n)")
    for name, D in (("cycle3", cycle3()), ("tournament4", D4)):
        for n in ns:
            dep = depletion_stats(D.k, n, args.reps, args.seed)
            br = uniform_best_response_score(D, (n,) * D.k, args.reps, args.seed)
            excess = br.mean - lower_bound_uniform(D, n)
            s = math.sqrt(n)
            print(f"{name},{n},{dep.mean / s:.4f},{excess / s:.4f},{br.stderr / s:.4f}")


if __name__ == "__main__":
    main()
