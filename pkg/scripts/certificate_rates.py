"""Fraction of random tournaments carrying a non-obliviousness certificate, by size."""

import argparse
import time

from semigame.oblivious import oblivious_rate


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--ks", default="6,9,12,15")
    ap.add_argument("--samples", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    print("k,rate,seconds")
    for k in (int(x) for x in args.ks.split(",")):
        start = time.perf_counter()
        rate = oblivious_rate(k, args.samples, args.seed)
        print(f"{k},{rate:.3f},{time.perf_counter() - start:.1f}")


if __name__ == "__main__":
    main()
