import threading
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from statward import corpus, numeric
from statward.sequences import (
    Arithmetic, Constant, Explicit, Harmonic, InterleaveBlocks, MalformedSpec, Periodic, RepeatEach,
    Scaled, Shifted, SparsePerturbed, SubsequenceSelector, Sum, Theorem1Witness, build_stream, combine,
    delta_stream, exception_predicate, interleave_blocks, repeat_each, shifted, subsequence,
)

F = Fraction
seeds = st.integers(0, 10 ** 6)


def test_harmonic_values():
    assert build_stream(Harmonic()).prefix(4) == [1, F(1, 2), F(1, 3), F(1, 4)]


def test_periodic_and_constant():
    assert build_stream(Periodic((0, 1))).prefix(5) == [0, 1, 0, 1, 0]
    assert build_stream(Constant(F(2, 3))).term(1000) == F(2, 3)


def test_arithmetic():
    assert build_stream(Arithmetic(1, F(1, 2))).prefix(3) == [1, F(3, 2), 2]


def test_explicit_with_and_without_tail():
    s = build_stream(Explicit((3, -1, 4)))
    assert s.prefix(5) == [3, -1, 4, 4, 4]
    t = build_stream(Explicit((3, -1), tail=Harmonic()))
    assert t.prefix(4) == [3, -1, F(1, 3), F(1, 4)]


def test_theorem1_witness_oracle():
    # independent oracle: a_1 = p + 1 and a_j - a_{j-1} = p j + 1
    for p in (1, 2, 3, 5):
        vals = build_stream(Theorem1Witness(p, "above")).prefix(50)
        acc, ref = 0, []
        for j in range(1, 51):
            acc += p * j + 1
            ref.append(acc)
        assert vals == ref
        assert build_stream(Theorem1Witness(p, "below")).prefix(50) == [-v for v in ref]


def test_sparse_rules():
    sq = build_stream(SparsePerturbed(Constant(0), "squares", Constant(1))).prefix(20)
    assert [k for k, v in enumerate(sq, 1) if v] == [1, 4, 9, 16]
    pw = build_stream(SparsePerturbed(Constant(0), "powers_of_two", Constant(1))).prefix(20)
    assert [k for k, v in enumerate(pw, 1) if v] == [1, 2, 4, 8, 16]
    cb = exception_predicate("cubes")
    assert [k for k in range(1, 130) if cb(k)] == [1, 8, 27, 64, 125]


def test_random_exceptions_independent_of_evaluation_order():
    spec = SparsePerturbed(Constant(0), "random", Constant(1), seed=11)
    forward = build_stream(spec).prefix(10_000)
    backward = build_stream(spec)
    assert [backward.term(k) for k in range(10_000, 0, -1)][::-1] == forward
    # inclusion probability 1/sqrt(k): about 2 sqrt(n) members
    assert 100 < sum(1 for v in forward if v) < 300


def test_random_exceptions_depend_on_seed():
    a = build_stream(SparsePerturbed(Constant(0), "random", Constant(1), seed=1)).prefix(5000)
    b = build_stream(SparsePerturbed(Constant(0), "random", Constant(1), seed=2)).prefix(5000)
    assert a != b


def test_invalid_specs_raise():
    with pytest.raises(MalformedSpec):
        Periodic(())
    with pytest.raises(MalformedSpec):
        RepeatEach(Harmonic(), 0)
    with pytest.raises(MalformedSpec):
        SparsePerturbed(Constant(0), "primes", Constant(1))
    with pytest.raises(MalformedSpec):
        Theorem1Witness(2, "sideways")
    with pytest.raises(IndexError):
        build_stream(Harmonic()).term(0)


@given(seeds, st.integers(1, 5))
def test_repeat_each_block_identity(seed, p):
    base = build_stream(corpus.random_exact_spec(seed))
    rep = repeat_each(base, p)
    xs, ys = base.prefix(200), rep.prefix(200 * p)
    assert all(ys[m] == xs[m // p] for m in range(200 * p))


@given(seeds, seeds, st.integers(1, 4))
def test_interleave_blocks_layout(s1, s2, p):
    a, b = build_stream(corpus.random_exact_spec(s1)), build_stream(corpus.random_exact_spec(s2))
    x = interleave_blocks(a, b, p).prefix(2 * p * 30)
    for j in range(30):
        assert x[2 * p * j:2 * p * j + p] == [a.term(j + 1)] * p
        assert x[2 * p * j + p:2 * p * (j + 1)] == [b.term(j + 1)] * p


@given(seeds, st.integers(1, 6))
def test_delta_stream_is_p_gap(seed, p):
    s = build_stream(corpus.random_exact_spec(seed))
    d = delta_stream(s, p).prefix(100)
    xs = s.prefix(100 + p)
    assert d == [xs[k + p] - xs[k] for k in range(100)]


@given(seeds, st.fractions(-5, 5, max_denominator=10), st.fractions(-5, 5, max_denominator=10))
def test_combine_is_termwise(seed, ca, cb):
    a = build_stream(corpus.random_exact_spec(seed))
    b = build_stream(corpus.random_exact_spec(seed + 1))
    got = combine(a, b, ca, cb).prefix(150)
    assert got == [ca * x + cb * y for x, y in zip(a.prefix(150), b.prefix(150))]


def test_shift_and_subsequence():
    h = build_stream(Harmonic())
    assert shifted(h, 2).prefix(2) == [F(1, 3), F(1, 4)]
    assert subsequence(h, SubsequenceSelector("squares-skip")).prefix(3) == [1, F(1, 4), F(1, 9)]
    assert subsequence(h, SubsequenceSelector("evens")).prefix(2) == [F(1, 2), F(1, 4)]
    sel = SubsequenceSelector("bisection-convergent", (2, 5, 9))
    assert subsequence(h, sel).prefix(3) == [F(1, 2), F(1, 5), F(1, 9)]
    with pytest.raises(MalformedSpec):
        SubsequenceSelector("bisection-convergent", (3, 3))


@given(seeds, st.integers(50, 400))
def test_term_and_prefix_agree(seed, n):
    spec = corpus.random_exact_spec(seed, depth=3)
    a, b = build_stream(spec), build_stream(spec)
    assert a.prefix(n) == [b.term(k) for k in range(1, n + 1)]


def _inside(v, lo, hi):
    m = numeric.midpoint(v)
    r = F(*map(int, v.rad.as_integer_ratio())) if isinstance(v, numeric.Approx) else 0
    return (lo == float("-inf") or F(lo) <= m - r) and (hi == float("inf") or m + r <= F(hi))


@given(seeds)
def test_float_enclosure_contains_every_term(seed):
    spec = corpus.random_exact_spec(seed, depth=3)
    lo, hi = build_stream(spec).enclosure(600)
    vals = build_stream(spec).prefix(600)
    assert all(_inside(v, a, b) for v, a, b in zip(vals, lo, hi))


@pytest.mark.parametrize("entry", corpus.BUILTIN_SEQUENCES, ids=lambda e: e.name)
def test_builtin_enclosures(entry):
    lo, hi = build_stream(entry.spec).enclosure(2000)
    vals = build_stream(entry.spec).prefix(2000)
    assert all(_inside(v, a, b) for v, a, b in zip(vals, lo, hi))


def test_reuse_shares_memo():
    base = build_stream(Harmonic())
    base.prefix(100)
    s = combine(base, base, 2, 0)
    assert s.prefix(3) == [2, 1, F(2, 3)]
    assert shifted(base, 1).term(1) == F(1, 2)


def test_concurrent_prefix_is_consistent():
    stream = build_stream(Sum(Harmonic(), Scaled(F(1, 3), Periodic((1, 2, 3)))))
    ref = build_stream(stream.spec).prefix(20_000)
    out = [None] * 4

    def work(i):
        out[i] = stream.prefix(20_000)

    threads = [threading.Thread(target=work, args=(i,)) for i in range(4)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert all(o == ref for o in out)


def test_interleave_spec_via_builder():
    x = build_stream(InterleaveBlocks(Constant(1), Constant(2), 2)).prefix(8)
    assert x == [1, 1, 2, 2, 1, 1, 2, 2]
