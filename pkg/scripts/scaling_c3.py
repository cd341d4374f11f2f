"""Exact S(n,n,n) on the 3-cycle and the fitted sqrt-scaling constant."""

import argparse
import math

from semigame.graph import cycle3
from semigame.simulate import scaling_fit
from semigame.solver import greedy_diagonal_values


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n-max", type=int, default=200)
    ap.add_argument("--fit-from", type=int, default=25)
    args = ap.parse_args()
    S = greedy_diagonal_values(cycle3(), args.n_max)
    print("n,S_n,S_n/sqrt(n)")
    for n in range(1, args.n_max + 1):
        if n % 10 == 0 or n == 1:
            print(f"{n},{float(S[n]):.6f},{float(S[n]) / math.sqrt(n):.6f}")
    fit = scaling_fit([(n, float(S[n])) for n in range(args.fit_from, args.n_max + 1)])
    print(f"slope {fit.slope:.4f}  c_hat {fit.c_hat:.4f}")


if __name__ == "__main__":
    main()
