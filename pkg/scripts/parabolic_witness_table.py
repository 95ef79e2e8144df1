"""Exact alternating sums S(m) for the parabolic spectral-radius witness, next to a float evaluation."""

import argparse
import math

from hardycomp.analysis import parabolic_witness


def float_sum(m):
    # naive float evaluation, for comparison with the rational sum
    return sum((-1) ** n * math.comb(4 * m, n) / ((n - 2 * m) ** 2 + 1) for n in range(4 * m + 1))


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--m-max", type=int, default=50)
    args = ap.parse_args()
    print("m,S_exact,lower,holds,S_float,rel_error_float")
    for m in range(1, args.m_max + 1):
        pw = parabolic_witness(m)
        exact = float(pw.total)
        flt = float_sum(m)
        print(f"{m},{exact:.17g},{float(pw.lower):.6e},{pw.holds},{flt:.6e},{abs(flt - exact) / exact:.2e}")


if __name__ == "__main__":
    main()
