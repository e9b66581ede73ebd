"""The escaping sequence: every stock subsequence still jumps by at least p.

Run with:  python3 demos/escaping_witness.py [--p 2] [--N 5000]
"""
import argparse

from statward import ClassifierConfig, build_stream, parse_sequence, witness_no_stat_p_qc_subsequence


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--p", type=int, default=2)
    ap.add_argument("--N", type=int, default=5000)
    args = ap.parse_args()

    seq = build_stream(parse_sequence(f"thm1_witness(p={args.p}, above)"))
    print("head:", [str(v) for v in seq.prefix(10)])

    for direction in ("above", "below"):
        rep = witness_no_stat_p_qc_subsequence(args.p, direction, cfg=ClassifierConfig(N=args.N))
        print(f"\ndirection={direction}  holds={rep.holds}")
        for row in rep.rows:
            half, full = row["density_at_half_p"], row["density_at_p"]
            print(f"  {row['selector']:14s} density one at p/2: {half['exact_one']}, at p: {full['exact_one']}; "
                  f"{row['verdicts']}")


if __name__ == "__main__":
    main()
