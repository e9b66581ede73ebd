"""Theorem harness: named suites that run the checks over the fixture corpora.

Each suite returns a :class:`SuiteResult` whose cases say what was checked
and whether it held.  The CLI ``theorems`` command and the acceptance tests
both go through here.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import corpus
from .classify import ClassifierConfig, classify_stat_p_quasi_cauchy
from .continuity import (
    algebra_identity_checks, lattice_report, theorem4_suite, theorem6_adversary, violation_witness_search,
)
from .expr import parse_function
from .lexer import DSLSyntaxError
from .sequences import Harmonic, Shifted, build_stream, repeat_each
from .theorems import (
    check_bounded_implies_stat_p_ward_compact, check_vector_space_closure, inclusion_checks,
    witness_no_stat_p_qc_subsequence,
)


@dataclass
class SuiteResult:
    name: str
    cases: list = field(default_factory=list)
    config: dict = field(default_factory=dict)
    seconds: float = 0.0

    def add(self, case: str, holds: bool, **detail):
        self.cases.append({"case": case, "holds": bool(holds), **detail})

    @property
    def violations(self) -> int:
        return sum(not c["holds"] for c in self.cases)

    @property
    def ok(self) -> bool:
        return self.violations == 0

    def to_dict(self) -> dict:
        return {"suite": self.name, "cases": self.cases, "violations": self.violations,
                "config": self.config}

    def rows(self):
        for c in self.cases:
            detail = {k: v for k, v in c.items() if k not in ("case", "holds")}
            yield [self.name, c["case"], c["holds"], "; ".join(f"{k}={v}" for k, v in sorted(detail.items()))]


SUITE_COLUMNS = ("suite", "case", "holds", "detail")

# suites whose natural scale is below the classifier default
SUITE_DEFAULT_N = {"inclusion": 10_000, "witness": 10_000, "algebra": 1_000}

# p-gaps of order 1/k (interleaved blocks, log growth) stay above 1/1000 for
# the first ~2000 indices, which is too much tail mass at N = 10^5
SUITE_DEFAULT_EPS = {"lattice": (Fraction(1), Fraction(1, 2), Fraction(1, 10), Fraction(1, 20))}


def suite_config(name: str, cfg: ClassifierConfig, explicit=()) -> ClassifierConfig:
    """Apply per-suite defaults for the settings not in ``explicit``."""
    changes = {}
    if "N" not in explicit and name in SUITE_DEFAULT_N:
        changes["N"] = SUITE_DEFAULT_N[name]
    if "eps" not in explicit and name in SUITE_DEFAULT_EPS:
        changes["eps_grid"] = SUITE_DEFAULT_EPS[name]
    return cfg.with_(**changes)


def _timed(fn):
    def run(*args, **kwargs):
        t0 = time.perf_counter()
        res = fn(*args, **kwargs)
        res.seconds = time.perf_counter() - t0
        return res

    run.__name__ = fn.__name__
    run.__doc__ = fn.__doc__
    return run


@_timed
def suite_inclusion(trials=100, N=10_000, seed=0, p_list=(2, 3, 5), cfg=ClassifierConfig()) -> SuiteResult:
    """Exact p-gap counts never exceed the summed shifted one-gap counts."""
    res = SuiteResult("inclusion", config={"trials": trials, "N": N, "seed": seed, "p": list(p_list),
                                           "eps_grid": [str(e) for e in cfg.eps_grid]})
    for t in range(trials):
        spec = corpus.random_exact_spec(seed + t)
        stream = build_stream(spec)
        for p in p_list:
            checks = inclusion_checks(stream, p, cfg.eps_grid, N)
            bad = [(str(c.epsilon), c.violations[:3]) for c in checks if not c.all_hold]
            res.add(f"{spec} p={p}", not bad, violations=bad)
    return res


@_timed
def suite_witness(N=10_000, p_list=(1, 2, 3, 5), cfg=ClassifierConfig()) -> SuiteResult:
    """The escaping sequence and its stock subsequences have exceedance density exactly 1."""
    cfg = cfg.with_(N=N)
    res = SuiteResult("witness", config={"N": N, "p": list(p_list)})
    for p in p_list:
        for direction in ("above", "below"):
            rep = witness_no_stat_p_qc_subsequence(p, direction, cfg=cfg)
            for row in rep.rows:
                res.add(f"p={p} {direction} {row['selector']}", row["density_one"] and row["all_violated"],
                        verdicts=row.get("verdicts"))
    return res


@_timed
def suite_compact(cfg=ClassifierConfig(), p_list=(1, 2, 3, 4, 5)) -> SuiteResult:
    """Bisection extracts a Cauchy, statistically p-quasi-Cauchy subsequence of each bounded builtin."""
    res = SuiteResult("compact", config={**cfg.to_dict(), "p": list(p_list)})
    for entry in corpus.bounded_builtins():
        rep = check_bounded_implies_stat_p_ward_compact(entry.spec, p_list, cfg)
        res.add(entry.name, rep.holds, interval=[str(x) for x in rep.interval], selected=rep.selected,
                cauchy=rep.cauchy.status)
    return res


@_timed
def suite_repeat(cfg=ClassifierConfig(), p_max=5, identity_limit=10_000) -> SuiteResult:
    """repeat_each of a StatPQC(1) sequence is StatPQC(p), and its block structure is exact.

    The repeated stream is judged on p*N terms, the index-matched prefix of the
    base sequence's N terms.
    """
    res = SuiteResult("repeat", config={**cfg.to_dict(), "p_max": p_max, "identity_limit": identity_limit})
    for entry in corpus.BUILTIN_SEQUENCES:
        base = build_stream(entry.spec)
        if not classify_stat_p_quasi_cauchy(base, 1, cfg).satisfied:
            continue
        xs = base.prefix(identity_limit)
        for p in range(1, p_max + 1):
            rep = repeat_each(base, p)
            ys = rep.prefix(identity_limit)
            identity = all(ys[m] == xs[m // p] for m in range(identity_limit))
            # the first p*N repeated terms carry exactly the first N base terms
            verdict = classify_stat_p_quasi_cauchy(rep, p, cfg.with_(N=cfg.N * p, sample_stride=None))
            res.add(f"{entry.name} p={p}", identity and verdict.satisfied, identity=identity,
                    status=verdict.status)
    return res


@_timed
def suite_closure(trials=50, seed=0, p_list=(1, 2, 3), cfg=ClassifierConfig()) -> SuiteResult:
    """Sums and rational multiples of StatPQC(p) sequences stay StatPQC(p)."""
    res = SuiteResult("closure", config={**cfg.to_dict(), "trials": trials, "seed": seed, "p": list(p_list)})
    rng = np.random.default_rng(seed)
    for t in range(trials):
        for p in p_list:
            a = corpus.random_stat_pqc_spec(seed + 2 * t, p)
            b = corpus.random_stat_pqc_spec(seed + 2 * t + 1, p)
            c = Fraction(int(rng.integers(-9, 10)), int(rng.integers(1, 10)))
            rep = check_vector_space_closure(a, b, c, p, cfg)
            res.add(f"{a} + {b}, scalar {c}, p={p}", rep.holds, sum=rep.sum_verdict.status,
                    scaled=rep.scaled_verdict.status)
    return res


@_timed
def suite_theorem4(cfg=ClassifierConfig(), p_list=(1, 2, 3)) -> SuiteResult:
    """Uniformly continuous images of p-quasi-Cauchy sequences are never Violated."""
    res = SuiteResult("theorem4", config={**cfg.to_dict(), "p": list(p_list)})
    fs = [corpus.function(n) for n in corpus.THEOREM4_FUNCTIONS]
    rep = theorem4_suite(fs, corpus.THEOREM4_SEQUENCES, p_list, cfg)
    for cell in rep.cells:
        res.add(f"{cell['function']} | {cell['sequence']} p={cell['p']}", cell["status"] != "violated",
                status=cell["status"])
    for skip in rep.skipped:
        res.add(f"precondition {skip['sequence']} p={skip['p']}", False, reason=skip["reason"])
    return res


@_timed
def suite_adversary(cfg=ClassifierConfig(), fn="sin(1/x) on (0,1)", p=2, eps0=Fraction(9, 10),
                    max_n=100, min_density=None) -> SuiteResult:
    """Witness pairs exist for every n, and the interleaved adversary breaks the image."""
    res = SuiteResult("adversary", config={**cfg.to_dict(), "function": fn, "p": p, "eps0": str(eps0)})
    pairs = violation_witness_search(fn, eps0, max_n)
    found = sorted(w.n for w in pairs)
    close = all(abs(w.alpha - w.beta) < Fraction(1, w.n) for w in pairs)
    res.add(f"witness pairs n<= {max_n}", found == list(range(1, max_n + 1)) and close,
            found=len(found))
    rep = theorem6_adversary(fn, p, eps0, cfg)
    floor = 1 - cfg.tolerance if min_density is None else Fraction(min_density)
    ok = rep.input_verdict.satisfied and rep.image_verdict.violated and rep.tail_density >= floor
    res.add(f"interleaved adversary p={p}", ok, input=rep.input_verdict.status,
            image=rep.image_verdict.status, tail_min_density=str(rep.tail_density), pairs=rep.pairs)
    return res


@_timed
def suite_algebra(samples=100, k_max=1000, p=2) -> SuiteResult:
    """max{f, g} = (|f - g| + |f + g|)/2 exactly, and the reverse triangle inequality along streams."""
    res = SuiteResult("algebra", config={"samples": samples, "k_max": k_max, "p": p})
    for ftext, gtext in corpus.ALGEBRA_PAIRS:
        f = parse_function(ftext)
        # 1/(k+1) stays inside every fixture domain
        stream = Shifted(Harmonic(), 1)
        rep = algebra_identity_checks(f, parse_function(gtext), samples, stream=stream, p=p, k_max=k_max)
        res.add(f"max({ftext}, {gtext})", rep.holds and rep.max_identity_exact == samples,
                exact=rep.max_identity_exact, linear_exact=rep.linear_form.exact,
                reverse_triangle=rep.reverse_triangle_checked)
    return res


@_timed
def suite_parser() -> SuiteResult:
    """Parse, print, parse again; malformed inputs fail with a position."""
    res = SuiteResult("parser", config={"roundtrip": len(corpus.PARSER_ROUNDTRIP),
                                        "malformed": len(corpus.PARSER_MALFORMED)})
    for text in corpus.PARSER_ROUNDTRIP:
        f = parse_function(text)
        printed = str(f)
        res.add(f"roundtrip {text!r}", parse_function(printed) == f, printed=printed)
    for text in corpus.PARSER_MALFORMED:
        try:
            parse_function(text)
        except DSLSyntaxError as exc:
            res.add(f"malformed {text!r}", exc.position is not None, position=exc.position)
        else:
            res.add(f"malformed {text!r}", False, position=None)
    return res


@_timed
def suite_lattice(cfg=ClassifierConfig(), p=2) -> SuiteResult:
    """Fill the preservation lattice and flag cells contradicting the stated implications."""
    res = SuiteResult("lattice", config={**cfg.to_dict(), "p": p})
    rep = lattice_report([f.spec for f in corpus.FUNCTIONS], [e.spec for e in corpus.BUILTIN_SEQUENCES], p, cfg)
    for row in rep.rows:
        res.add(row["function"], not row["arrow_flags"],
                cells={k: v["status"] for k, v in row["cells"].items()},
                flags=row["arrow_flags"], open_flags=row["open_flags"])
    return res


SUITES = ("inclusion", "witness", "compact", "repeat", "closure", "theorem4", "adversary", "algebra",
          "parser", "lattice")


def run_suite(name: str, cfg: ClassifierConfig, trials=None, seed=0) -> SuiteResult:
    if name == "inclusion":
        return suite_inclusion(trials if trials is not None else 100, cfg.N, seed, cfg=cfg)
    if name == "witness":
        return suite_witness(cfg.N, cfg=cfg)
    if name == "compact":
        return suite_compact(cfg)
    if name == "repeat":
        return suite_repeat(cfg)
    if name == "closure":
        return suite_closure(trials if trials is not None else 50, seed, cfg=cfg)
    if name == "theorem4":
        return suite_theorem4(cfg)
    if name == "adversary":
        return suite_adversary(cfg)
    if name == "algebra":
        return suite_algebra(trials if trials is not None else 100, cfg.N)
    if name == "parser":
        return suite_parser()
    if name == "lattice":
        return suite_lattice(cfg)
    raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
