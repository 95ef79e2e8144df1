"""Slopes of log ||C|| against log 1/(1-r) for several weight presets."""

import argparse

from hardycomp.analysis import exponent_fit
from hardycomp.weights import parse_weights


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--kind", default="normC", choices=("normC", "normB", "hyperbolic"))
    ap.add_argument("--weights", default="hardy;dirichlet:lambda=1;dn1:n=1;dn2:n=1")
    ap.add_argument("--grid", default="0.5,0.6,0.7,0.8,0.9")
    ap.add_argument("--size", type=int, default=512)
    args = ap.parse_args()
    grid = tuple(float(x) for x in args.grid.split(","))
    print("weights,slope,predicted_exponent,intercept,pass")
    for text in args.weights.split(";"):
        rep = exponent_fit(args.kind, parse_weights(text), grid, n=args.size)
        print(f"{text},{rep.slope:.6f},{rep.exponent:g},{rep.intercept:.6f},{rep.passed}")


if __name__ == "__main__":
    main()
