"""Gelfand surrogates r_n = ||C^n||^(1/n) from sections of iterated symbols."""

import argparse

from hardycomp.analysis import spectral_radius_sequence
from hardycomp.moebius import hyperbolic, special
from hardycomp.weights import parse_weights

MAPS = {"psi1": lambda: special("psi1"), "hyperbolic(0.5)": lambda: hyperbolic(0.5)}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--weights", default="hardy")
    ap.add_argument("--count", type=int, default=16)
    ap.add_argument("--size", type=int, default=512)
    args = ap.parse_args()
    w = parse_weights(args.weights)
    print("map,n,r_n")
    for name, make in MAPS.items():
        for n, r in enumerate(spectral_radius_sequence(make(), w, args.count, args.size), start=1):
            print(f"{name},{n},{r:.12f}")


if __name__ == "__main__":
    main()
