"""Section norms of C_phi for an automorphism against the limit sqrt((1+|a|)/(1-|a|)) on H^2."""

import argparse
import math

from hardycomp.operators import composition_section, op_norm
from hardycomp.series import mobius_taylor
from hardycomp.weights import parse_weights


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--a", type=float, default=0.5)
    ap.add_argument("--weights", default="hardy")
    ap.add_argument("--sizes", default="64,128,256,512,1024,2048")
    args = ap.parse_args()
    w = parse_weights(args.weights)
    target = math.sqrt((1 + args.a) / (1 - args.a))
    print("N,sigma_max,ratio_to_h2_limit")
    for n in map(int, args.sizes.split(",")):
        s = op_norm(composition_section(mobius_taylor(args.a, 0.0, n - 1), w, n))
        print(f"{n},{s:.17g},{s / target:.17g}")


if __name__ == "__main__":
    main()
