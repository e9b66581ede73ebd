"""Fixture corpora: named builtin sequences and functions with declared properties.

The declared flags are ground truth from elementary analysis; the checks use
them only to pick which inputs a property test runs on.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .expr import FunctionSpec, parse_function
from .sequences import (
    Arithmetic, Constant, Explicit, Harmonic, InterleaveBlocks, LogIndex, Periodic, RepeatEach,
    Scaled, SequenceSpec, Shifted, SparsePerturbed, SqrtIndex, Sum, Theorem1Witness,
)

F = Fraction


@dataclass(frozen=True)
class CorpusSequence:
    name: str
    spec: SequenceSpec
    bounded: bool
    note: str = ""


BUILTIN_SEQUENCES = (
    CorpusSequence("constant", Constant(5), True),
    CorpusSequence("periodic01", Periodic((0, 1)), True, "StatPQC(2) but not StatPQC(1)"),
    CorpusSequence("periodic3", Periodic((1, F(-1), F(1, 2))), True, "StatPQC(3) only at multiples of 3"),
    CorpusSequence("harmonic", Harmonic(), True),
    CorpusSequence("neg_half_harmonic", Scaled(F(-1, 2), Harmonic()), True),
    CorpusSequence("shifted_harmonic", Sum(Constant(2), Harmonic()), True),
    CorpusSequence("repeat_harmonic", RepeatEach(Harmonic(), 3), True),
    CorpusSequence("interleave_harmonic_zero", InterleaveBlocks(Harmonic(), Constant(0), 2), True),
    CorpusSequence("explicit_head", Explicit((3, -1, 4, 1, 5), tail=Harmonic()), True),
    CorpusSequence("sparse_squares", SparsePerturbed(Constant(5), "squares", Constant(1)), True,
                   "exception density ~ n^(-1/2)"),
    CorpusSequence("sparse_powers", SparsePerturbed(Harmonic(), "powers_of_two", Constant(3)), True),
    CorpusSequence("sparse_random", SparsePerturbed(Constant(0), "random", Constant(1), seed=7), True),
    CorpusSequence("sqrt_index", SqrtIndex(), False),
    CorpusSequence("log_index", LogIndex(), False),
    CorpusSequence("arithmetic", Arithmetic(0, 1), False),
    CorpusSequence("thm1_above", Theorem1Witness(2, "above"), False),
    CorpusSequence("thm1_below", Theorem1Witness(1, "below"), False),
)


def builtin(name: str) -> SequenceSpec:
    for entry in BUILTIN_SEQUENCES:
        if entry.name == name:
            return entry.spec
    raise KeyError(name)


def bounded_builtins():
    return [e for e in BUILTIN_SEQUENCES if e.bounded]


UC = "uniformlyContinuous"
C = "continuous"


@dataclass(frozen=True)
class CorpusFunction:
    name: str
    text: str
    flags: tuple

    @property
    def spec(self) -> FunctionSpec:
        return parse_function(self.text).with_flags(*self.flags)


FUNCTIONS = (
    CorpusFunction("identity", "x", (UC, C)),
    CorpusFunction("affine", "x/2 + 1", (UC, C)),
    CorpusFunction("abs", "abs(x)", (UC, C)),
    CorpusFunction("max_combo", "max(x, 1 - x)", (UC, C)),
    CorpusFunction("sin", "sin(x)", (UC, C)),
    CorpusFunction("squash", "x / (1 + abs(x))", (UC, C)),
    CorpusFunction("abs_bounded", "abs(x) on [-1,1]", (UC, C)),
    CorpusFunction("square_bounded", "x^2 on [0,10]", (UC, C)),
    CorpusFunction("sqrt_unit", "sqrt(x) on [0,1]", (UC, C)),
    CorpusFunction("square", "x^2", (C,)),
    CorpusFunction("reciprocal", "1/x on (0,1)", (C,)),
    CorpusFunction("sin_reciprocal", "sin(1/x) on (0,1)", (C,)),
)


def function(name: str) -> FunctionSpec:
    for entry in FUNCTIONS:
        if entry.name == name:
            return entry.spec
    raise KeyError(name)


# Uniform continuity suite inputs: Lipschitz functions on R and sequences whose p-gaps tend to 0
# fast enough to settle before the default tail window for p <= 3.
THEOREM4_FUNCTIONS = ("identity", "affine", "abs", "max_combo", "sin")

THEOREM4_SEQUENCES = (
    Constant(5),
    Harmonic(),
    Scaled(F(-1, 2), Harmonic()),
    Sum(Constant(2), Harmonic()),
    RepeatEach(Harmonic(), 2),
    Scaled(F(1, 1000), LogIndex()),
    Scaled(F(1, 1000), SqrtIndex()),
    Explicit((3, -1, 4, 1, 5), tail=Harmonic()),
    Sum(Harmonic(), Scaled(F(1, 1000), LogIndex())),
    RepeatEach(Scaled(F(1, 1000), SqrtIndex()), 3),
)

# (f, g) pairs built only from rational operations, so both sides evaluate
# exactly.  Both members are nonnegative on the shared domain: there
# (|f - g| + |f + g|)/2 = max(|f|, |g|) coincides with max(f, g).
ALGEBRA_PAIRS = (
    ("x on [0,1]", "1 - x on [0,1]"),
    ("x^2 on [0,2]", "x on [0,2]"),
    ("abs(x)", "x^2"),
    ("abs(x - 1)", "abs(x + 1)"),
    ("max(x, 0)", "max(-x, 0)"),
    ("x^2 / (1 + x^2)", "abs(x) / 2"),
    ("1/x on (0,1)", "x^-2 on (0,1)"),
    ("max(x, 1 - x)", "min(x^2, 1)"),
    ("abs(x^3 - x)", "0.5 * abs(x)"),
    ("x^4 + 1", "abs(x - 2)"),
)

# Sign-changing pairs where the absolute-value form gives max(|f|, |g|) instead.
SIGNED_PAIRS = (
    ("x^3 - x", "0.5 * x"),
    ("x", "-1 - x"),
    ("min(x, 0)", "x - 3"),
)

# 20 round-trip fixtures and 5 malformed inputs for the function parser.
PARSER_ROUNDTRIP = (
    "x", "-x", "x + 1", "x - 2.5", "3 * x - 1/4", "x^2", "x^-1 on (0,1)", "-x^2 + x",
    "abs(x) on [-1,1]", "max(x, 1 - x) on [0,1]", "min(x, 0)", "sqrt(x) on [0,1]",
    "sin(1/x) on (0,1)", "cos(x) + sin(x)", "exp(-x) on [0,inf)", "log(x) on (0,inf)",
    "x / (1 + abs(x))", "(x - 1) * (x + 1)", "abs(abs(x) - 1) on (-inf,0]", "2^-3 * x^3 - 0.125",
)

PARSER_MALFORMED = ("x +", "foo(x)", "sin(x", "x on [1,0]", "3 $ x")


# seeded random specs ----------------------------------------------------------------

def _rat(rng, lo=-5, hi=5, den=(1, 2, 3, 4, 5, 10)):
    return Fraction(int(rng.integers(lo, hi + 1)), int(rng.choice(den)))


def _exact_leaf(rng):
    kind = int(rng.integers(0, 7))
    if kind == 0:
        return Constant(_rat(rng))
    if kind == 1:
        return Periodic(tuple(_rat(rng) for _ in range(int(rng.integers(1, 5)))))
    if kind == 2:
        return Harmonic()
    if kind == 3:
        return Arithmetic(_rat(rng), _rat(rng, -2, 2))
    if kind == 4:
        head = tuple(_rat(rng) for _ in range(int(rng.integers(1, 6))))
        return Explicit(head, tail=Harmonic() if rng.random() < 0.5 else None)
    if kind == 5:
        rule = str(rng.choice(["squares", "cubes", "powers_of_two", "random"]))
        return SparsePerturbed(Constant(_rat(rng)), rule, Constant(_rat(rng)), seed=int(rng.integers(0, 2 ** 32)))
    return Theorem1Witness(int(rng.integers(1, 4)), str(rng.choice(["above", "below"])))


def random_exact_spec(seed: int, depth: int = 2) -> SequenceSpec:
    """Deterministic random spec with rational terms only."""
    rng = np.random.default_rng(seed)

    def build(d):
        if d == 0 or rng.random() < 0.35:
            return _exact_leaf(rng)
        op = int(rng.integers(0, 5))
        if op == 0:
            return Sum(build(d - 1), build(d - 1))
        if op == 1:
            return Scaled(_rat(rng), build(d - 1))
        if op == 2:
            return RepeatEach(build(d - 1), int(rng.integers(1, 4)))
        if op == 3:
            return InterleaveBlocks(build(d - 1), build(d - 1), int(rng.integers(1, 4)))
        return Shifted(build(d - 1), int(rng.integers(0, 5)))

    return build(depth)


def random_stat_pqc_spec(seed: int, p: int) -> SequenceSpec:
    """Random spec drawn from families that are statistically p-quasi-Cauchy by construction.

    Decaying parts carry coefficients of at most 1/20, so that a scalar
    multiple up to 9 still settles inside the default tail window for p <= 3.
    """
    rng = np.random.default_rng(seed)
    kind = int(rng.integers(0, 7))

    def small():
        return _rat(rng, -5, 5, den=(100, 200, 500, 1000))

    if kind == 0:
        return Constant(_rat(rng))
    if kind == 1:
        return Periodic(tuple(_rat(rng) for _ in range(p)))
    if kind == 2:
        return Scaled(small(), Harmonic())
    if kind == 3:
        return Sum(Constant(_rat(rng)), RepeatEach(Scaled(small(), Harmonic()), int(rng.integers(1, 4))))
    if kind == 4:
        head = tuple(_rat(rng) for _ in range(int(rng.integers(1, 6))))
        return Explicit(head, tail=Scaled(small(), Harmonic()))
    if kind == 5:
        return SparsePerturbed(Constant(_rat(rng)), "powers_of_two", Constant(_rat(rng)))
    return Sum(Periodic(tuple(_rat(rng) for _ in range(p))), Scaled(small(), Harmonic()))
