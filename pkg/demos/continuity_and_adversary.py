"""Uniformly continuous maps keep StatPQC; sin(1/x) on (0,1) does not.

The adversary run at the default N=10^5 takes a minute or two on one core;
pass a smaller --N for a quick look (the input verdict may then be
inconclusive or violated, since the blocks only settle at larger N).

Run with:  python3 demos/continuity_and_adversary.py [--N 20000]
"""
import argparse
from fractions import Fraction

from statward import (ClassifierConfig, build_stream, parse_sequence, preservation_check, theorem6_adversary,
                      uniform_continuity_probe, violation_witness_search)

COARSE = (Fraction(1), Fraction(1, 2), Fraction(1, 10), Fraction(1, 20))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--N", type=int, default=20_000)
    args = ap.parse_args()
    cfg = ClassifierConfig(N=args.N, eps_grid=COARSE)

    seq = build_stream(parse_sequence("harmonic"))
    for f in ("sin(x)", "abs(x)", "x / (1 + abs(x))"):
        v = preservation_check(f, seq, 2, cfg)
        print(f"{f:18s} on {seq.spec}: image StatPQC(2) {v.status}")

    print()
    for f in ("x^2 on [0,10]", "sin(1/x) on (0,1)"):
        curve, v = uniform_continuity_probe(f, samples_per_delta=1024)
        print(f"{f:18s} uniform continuity {v.status}; "
              f"modulus at delta={curve.deltas[0]} is {float(curve.modulus[0]):.4f}")

    pairs = violation_witness_search("sin(1/x) on (0,1)", Fraction(9, 10), 5)
    print("\nclose pairs far apart under sin(1/x):")
    for w in pairs:
        print(f"  n={w.n}: |a-b| = {float(abs(w.alpha - w.beta)):.2e}")

    rep = theorem6_adversary("sin(1/x) on (0,1)", 2, Fraction(9, 10), ClassifierConfig(N=args.N))
    print(f"\ninterleaved adversary at N={args.N}:")
    print("  input StatPQC(2):", rep.input_verdict.status)
    print("  image StatPQC(2):", rep.image_verdict.status)
    print(f"  smallest tail density of 9/10-jumps: {float(rep.tail_density):.5f}")


if __name__ == "__main__":
    main()
