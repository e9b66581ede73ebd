"""Acceptance criteria, one test each, at their stated scales and tolerances.

Each test records a PASS/FAIL line; the lines are printed in the pytest
terminal summary, or directly when this file is run as a script.
"""
import sys
from fractions import Fraction

import numpy as np

from statward import cli, harness
from statward.classify import ClassifierConfig
from statward.density import EpsilonGrid
from statward.reports import strip_timestamp
from statward.sequences import Periodic
from statward.theorems import exact_density_curve

RESULTS = []


def record(number, title, ok, detail):
    line = f"criterion {number:2d} {'PASS' if ok else 'FAIL'}  {title}: {detail}"
    RESULTS.append(line)
    print(line)
    assert ok, line


def test_criterion_01_periodic_counterexample():
    N = 100_000
    every_n = np.arange(1, N + 1)
    two = [exact_density_curve(Periodic((0, 1)), 2, eps, N) for eps in EpsilonGrid()]
    zero = all(not c.any() for c in two)
    one = exact_density_curve(Periodic((0, 1)), 1, Fraction(1, 2), N)
    full = bool((one == every_n).all())
    record(1, "periodic(0,1) exact densities", zero and full,
           f"p=2 counts zero on all {len(two)} grid eps: {zero}; p=1 eps=1/2 count = n for all n <= {N}: {full}")


def test_criterion_02_inclusion_decomposition():
    res = harness.suite_inclusion(trials=100, N=10_000, seed=0, p_list=(2, 3, 5))
    record(2, "inclusion decomposition", res.violations == 0 and len(res.cases) == 300,
           f"{len(res.cases)} spec/p cases, every n <= 10^4, full grid, {res.violations} violations")


def test_criterion_03_escaping_witness():
    res = harness.suite_witness(N=10_000, p_list=(1, 2, 3, 5))
    record(3, "escaping witness density one", res.ok and len(res.cases) == 24,
           f"{len(res.cases)} sequence/selector cases at eps = p/2 and p, {res.violations} violations")


def test_criterion_04_bisection_compactness():
    res = harness.suite_compact(ClassifierConfig(), p_list=(1, 2, 3, 4, 5))
    record(4, "bounded builtins have a convergent StatPQC subsequence", res.ok,
           f"{len(res.cases)} bounded builtins at N=10^5, tol=1/1000, p<=5, {res.violations} failures")


def test_criterion_05_repeat_each():
    res = harness.suite_repeat(ClassifierConfig(), p_max=5, identity_limit=10_000)
    bases = sorted({c["case"].rsplit(" ", 1)[0] for c in res.cases})
    record(5, "repeat_each construction", res.ok and len(res.cases) == 5 * len(bases),
           f"{len(bases)} StatPQC(1) builtins x p<=5, identity on 10^4 indices, {res.violations} failures")


def test_criterion_06_uniformly_continuous_images():
    res = harness.suite_theorem4(ClassifierConfig(), p_list=(1, 2, 3))
    violated = sum(c.get("status") == "violated" for c in res.cases)
    record(6, "uniformly continuous images never Violated", res.ok and len(res.cases) == 150,
           f"{len(res.cases)} cells (5 f x 10 seq x 3 p) at N=10^5, {violated} Violated")


def test_criterion_07_adversary():
    res = harness.suite_adversary(ClassifierConfig(), "sin(1/x) on (0,1)", 2, Fraction(9, 10), 100,
                                  min_density=Fraction(95, 100))
    pairs, adv = res.cases
    record(7, "interleaved adversary for sin(1/x)", res.ok,
           f"pairs for n<=100: {pairs['found']}; input {adv['input']}; image {adv['image']}; "
           f"tail density {float(Fraction(adv['tail_min_density'])):.5f} >= 0.95")


def test_criterion_08_vector_space_closure():
    res = harness.suite_closure(trials=50, seed=0, p_list=(1, 2, 3))
    record(8, "vector space closure", res.ok and len(res.cases) == 150,
           f"{len(res.cases)} pairs with rational scalars at N=10^5, {res.violations} failures")


def test_criterion_09_algebra_identities():
    res = harness.suite_algebra(samples=100, k_max=1000)
    exact = [c["exact"] for c in res.cases]
    record(9, "max identity and reverse triangle", res.ok and len(res.cases) == 10 and set(exact) == {100},
           f"{len(res.cases)} pairs x 100 exact samples, reverse triangle on k<=1000, {res.violations} failures")


def test_criterion_10_parser():
    res = harness.suite_parser()
    rt = sum(c["case"].startswith("roundtrip") and c["holds"] for c in res.cases)
    bad = sum(c["case"].startswith("malformed") and c["holds"] for c in res.cases)
    record(10, "function parser", res.ok and rt == 20 and bad == 5,
           f"{rt}/20 round trips, {bad}/5 malformed inputs rejected with a position")


CLI_RUNS = [
    ["classify", "--seq", "periodic(0,1)", "--p", "2"],
    ["profile", "--seq", "0.5*harmonic + periodic(0,1)", "--N", "5000"],
    ["density", "--seq", "periodic(0,1)", "--p", "1", "--eps", "1/2", "--N", "1000", "--format", "csv"],
    ["preserve", "--fn", "sin(x)", "--seq", "harmonic", "--p", "2", "--N", "5000", "--eps", "1,1/2,1/10"],
    ["probe", "--fn", "sqrt(x) on [0,1]", "--samples", "512"],
    ["witness", "--fn", "sin(1/x) on (0,1)", "--max-n", "20", "--adversary", "--p", "2", "--N", "4000"],
    ["theorems", "--suite", "inclusion", "--trials", "10"],
    ["theorems", "--suite", "parser", "--format", "table"],
]


def _capture(argv):
    import io
    from contextlib import redirect_stdout

    buf = io.StringIO()
    with redirect_stdout(buf):
        code = cli.run(argv)
    return code, buf.getvalue()


def _normal(text):
    return strip_timestamp(text) if text.startswith("{") else text


def test_criterion_11_cli_determinism():
    same, codes = 0, []
    for argv in CLI_RUNS:
        (c1, t1), (c2, t2) = _capture(argv), _capture(argv)
        codes.append(c1)
        same += c1 == c2 and _normal(t1) == _normal(t2)
    record(11, "CLI determinism", same == len(CLI_RUNS) and set(codes) == {0},
           f"{same}/{len(CLI_RUNS)} commands byte-identical modulo timestamp, exit codes {sorted(set(codes))}")


if __name__ == "__main__":
    failed = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion"):
            try:
                fn()
            except AssertionError:
                failed += 1
    sys.exit(1 if failed else 0)
