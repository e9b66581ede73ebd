from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from statward import corpus
from statward.classify import ClassifierConfig
from statward.sequences import (
    Arithmetic, Harmonic, Periodic, SqrtIndex, SubsequenceSelector, Theorem1Witness, build_stream, subsequence,
)
from statward.theorems import (
    ApproxValuesRejected, BisectionExhausted, PreconditionNotMet, bisection_selector,
    check_bounded_implies_stat_p_ward_compact, check_inclusion_decomposition, check_vector_space_closure,
    exact_density_curve, inclusion_checks, witness_no_stat_p_qc_subsequence,
)

F = Fraction
COARSE = (F(1), F(1, 2), F(1, 10), F(1, 20))


def brute_inclusion(xs, p, eps, N):
    lhs, rhs = [], []
    cl = cr = 0
    for k in range(N):
        cl += abs(xs[k + p] - xs[k]) >= eps
        cr += sum(abs(xs[k + i + 1] - xs[k + i]) >= eps / p for i in range(p))
        lhs.append(cl)
        rhs.append(cr)
    return lhs, rhs


@settings(max_examples=40)
@given(st.integers(0, 10 ** 6), st.integers(2, 5), st.sampled_from([F(1), F(1, 2), F(1, 10), F(1, 3)]))
def test_inclusion_counts_match_brute_force(seed, p, eps):
    stream = build_stream(corpus.random_exact_spec(seed))
    N = 200
    res = check_inclusion_decomposition(stream, p, eps, N)
    lhs, rhs = brute_inclusion(stream.prefix(N + p), p, eps, N)
    assert list(res.lhs) == lhs
    assert list(res.rhs) == rhs
    assert res.all_hold


def test_inclusion_sampling_and_rows():
    [res] = inclusion_checks(Periodic((0, 1, 3)), 3, [F(1, 2)], 100, sample_stride=30)
    assert list(res.n) == [30, 60, 90, 100]
    # every 3-gap is 0, every one-gap is at least 1
    assert list(res.lhs) == [0, 0, 0, 0]
    assert list(res.rhs) == [90, 180, 270, 300]
    assert next(res.rows()) == [30, 0, 90, True]


def test_inclusion_rejects_bad_inputs():
    with pytest.raises(ApproxValuesRejected):
        check_inclusion_decomposition(SqrtIndex(), 2, F(1, 2), 50)
    with pytest.raises(ValueError):
        check_inclusion_decomposition(Harmonic(), 1, F(1, 2), 50)
    with pytest.raises(ValueError):
        check_inclusion_decomposition(Harmonic(), 2, 0, 50)


@pytest.mark.parametrize("p", [1, 2, 3])
@pytest.mark.parametrize("direction", ["above", "below"])
def test_escaping_witness_density_one(p, direction):
    cfg = ClassifierConfig(N=2000)
    rep = witness_no_stat_p_qc_subsequence(p, direction, cfg=cfg)
    assert rep.holds
    assert [r["selector"] for r in rep.rows] == ["identity", "evens", "squares-skip"]
    for row in rep.rows:
        assert row["density_at_half_p"]["exact_one"] and row["density_at_p"]["exact_one"]
        assert set(row["verdicts"].values()) == {"violated"}


def test_witness_counts_independent_oracle():
    # a_j = sum_{i<=j} (2i + 1), so a_{2(j+1)} - a_{2j} = (4j + 3) + (4j + 5) >= 2
    sub = subsequence(build_stream(Theorem1Witness(2, "above")), SubsequenceSelector("evens"))
    assert list(exact_density_curve(sub, 1, 2, 500)) == list(range(1, 501))
    counts = exact_density_curve(Periodic((0, 1)), 1, F(1, 2), 100)
    assert list(counts) == list(range(1, 101))


def test_closure_requires_inputs():
    cfg = ClassifierConfig(N=5000)
    with pytest.raises(PreconditionNotMet):
        check_vector_space_closure(Periodic((0, 1)), Harmonic(), 2, 1, cfg)


def test_closure_periodic_plus_harmonic():
    cfg = ClassifierConfig(N=10_000, eps_grid=COARSE)
    rep = check_vector_space_closure(Periodic((0, 1)), Harmonic(), F(-7, 3), 2, cfg)
    assert rep.holds and not rep.breach
    assert rep.to_dict()["scalar"] == F(-7, 3)


def test_bisection_lower_half_and_members():
    res = bisection_selector(Periodic((0, 1)), 2, F(1, 2000), 4000, 100)
    lo, hi = res.interval
    assert lo < 0 == hi and hi - lo <= F(1, 2000)
    # only the zeros at odd indices survive
    assert res.indices[:5] == (1, 3, 5, 7, 9)
    assert len(res.indices) == 2000
    with pytest.raises(BisectionExhausted):
        bisection_selector(Periodic((0, 1)), 2, F(1, 2000), 40, 100)


@pytest.mark.parametrize("name", ["harmonic", "periodic3", "sparse_squares"])
def test_bounded_builtins_compact(name):
    cfg = ClassifierConfig(N=10_000)
    rep = check_bounded_implies_stat_p_ward_compact(corpus.builtin(name), (1, 2, 3), cfg)
    assert rep.holds
    lo, hi = rep.interval
    assert hi - lo <= F(1, 2000)
    assert rep.selected >= cfg.N + 4


def test_compact_needs_bounded():
    with pytest.raises(PreconditionNotMet):
        check_bounded_implies_stat_p_ward_compact(Arithmetic(0, 1), (1,), ClassifierConfig(N=2000))


def test_selected_terms_lie_in_interval():
    cfg = ClassifierConfig(N=2000)
    res = bisection_selector(corpus.builtin("periodic3"), 2, F(1, 2000), 8 * cfg.N, cfg.N)
    xs = build_stream(corpus.builtin("periodic3")).prefix(8 * cfg.N)
    lo, hi = res.interval
    picked = np.array(res.indices) - 1
    assert all(lo <= xs[i] <= hi for i in picked)
    assert all(not lo <= xs[i] <= hi for i in set(range(len(xs))) - set(picked))
