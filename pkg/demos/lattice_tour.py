"""Which classes does each corpus function map into which?

Prints the preservation lattice over a small corpus.  An arrow a -> b means
every function preserving a also preserves b; cells that contradict an arrow
are listed as flags.

Run with:  python3 demos/lattice_tour.py [--N 10000]
"""
import argparse
from fractions import Fraction

from statward import ClassifierConfig, corpus, lattice_report

COARSE = (Fraction(1), Fraction(1, 2), Fraction(1, 10), Fraction(1, 20))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--N", type=int, default=10_000)
    ap.add_argument("--p", type=int, default=2)
    args = ap.parse_args()

    fns = [corpus.function(n) for n in ("identity", "square", "sin", "abs")]
    seqs = [corpus.builtin(n) for n in ("constant", "periodic01", "harmonic", "log_index", "arithmetic")]
    rep = lattice_report(fns, seqs, args.p, ClassifierConfig(N=args.N, eps_grid=COARSE))
    print(rep.table())
    print("\ncontradicted arrows:", rep.contradictions or "none")


if __name__ == "__main__":
    main()
