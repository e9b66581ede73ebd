"""Walk through periodic(0, 1): not quasi-Cauchy, yet StatPQC for even p.

Run with:  python3 demos/periodic_counterexample.py [--N 20000]
"""
import argparse
from fractions import Fraction

from statward import ClassifierConfig, build_stream, full_profile, parse_sequence
from statward.theorems import exact_density_curve


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--N", type=int, default=20_000)
    args = ap.parse_args()

    seq = build_stream(parse_sequence("periodic(0,1)"))
    print("first terms:", [str(v) for v in seq.prefix(8)])

    # consecutive terms always differ by 1, but terms two apart agree
    for p in (1, 2, 3, 4):
        counts = exact_density_curve(seq, p, Fraction(1, 2), args.N)
        print(f"p={p}: #{{k <= n : |a(k+p) - a(k)| >= 1/2}} at n={args.N} is {int(counts[-1])}")

    rep = full_profile(seq, [1, 2, 3, 4], ClassifierConfig(N=args.N))
    print()
    for label, v in rep.verdicts.items():
        print(f"{label:28s} {v.status}")


if __name__ == "__main__":
    main()
