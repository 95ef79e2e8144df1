"""Smallest singular values of N x N/4 blocks: flat for Blaschke products, decaying otherwise."""

import argparse

from hardycomp.analysis import closed_range_signature
from hardycomp.series import blaschke_taylor, polynomial
from hardycomp.weights import parse_weights

SYMBOLS = {
    "blaschke(0,0.5)": lambda n: blaschke_taylor([0, 0.5], 0.0, n),
    "mobius(0.5)": lambda n: blaschke_taylor([0.5], 0.0, n),
    "(1+z)/2": lambda n: polynomial([0.5, 0.5]),
    "z/2": lambda n: polynomial([0, 0.5]),
}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--weights", default="hardy")
    ap.add_argument("--sizes", default="64,128,256,512")
    args = ap.parse_args()
    w = parse_weights(args.weights)
    sizes = tuple(int(x) for x in args.sizes.split(","))
    print("symbol,N,sigma_min")
    for name, make in SYMBOLS.items():
        for n, s in closed_range_signature(make(max(sizes)), w, sizes):
            print(f"{name},{n},{s:.6e}")


if __name__ == "__main__":
    main()
