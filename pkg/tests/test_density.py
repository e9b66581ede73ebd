from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from statward import corpus
from statward.density import (
    DensityCurve, EpsilonGrid, GapView, InsufficientData, default_stride, exceedance_curve, exceedance_flags,
    gap_curves, gap_values, limit_verdict, sample_points, tail_window,
)
from statward.sequences import Harmonic, Periodic, build_stream, delta_stream

F = Fraction


def brute_counts(values, eps):
    out, c = [], 0
    for v in values:
        c += abs(v) >= eps
        out.append(c)
    return out


@given(st.integers(0, 10 ** 6), st.integers(1, 4),
       st.sampled_from([F(1), F(1, 2), F(1, 10), F(1, 3)]))
def test_gap_curves_match_brute_force(seed, p, eps):
    stream = build_stream(corpus.random_exact_spec(seed))
    N = 300
    xs = stream.prefix(N + p)
    ref = brute_counts([xs[k + p] - xs[k] for k in range(N)], eps)
    curve = gap_curves(stream, p, [eps], N, 1)[0]
    assert list(curve.count) == ref
    assert not curve.ambiguous.any()


def test_periodic_gap_densities_exact():
    s = build_stream(Periodic((0, 1)))
    one = gap_curves(s, 1, [F(1, 2)], 1000, 5)[0]
    assert all(d == 1 for d in one.density)
    two = gap_curves(s, 2, list(EpsilonGrid()), 1000, 5)
    assert all(c == 0 for curve in two for c in curve.count)


def test_exceedance_curve_on_explicit_delta():
    s = delta_stream(build_stream(Harmonic()), 1)
    curve = exceedance_curve(s, F(1, 10), 100, 10)
    # |1/(k+1) - 1/k| = 1/(k(k+1)) >= 1/10 only for k = 1, 2
    assert list(curve.count) == [2] * 10


def test_flags_exact_at_threshold():
    vals = [F(1, 2), F(-1, 2), F(1, 3), F(999999, 2000000)]
    exceeds, ambiguous = exceedance_flags(vals, F(1, 2))
    assert list(exceeds) == [True, True, False, False]
    assert not ambiguous.any()


def test_gap_view_is_lazy_and_memoised():
    calls = []

    class Terms(list):
        def __getitem__(self, i):
            calls.append(i)
            return list.__getitem__(self, i)

    view = GapView(Terms([F(k) for k in range(10)]), 2, 8)
    assert calls == []
    assert view[3] == 2 and view[3] == 2
    assert calls == [5, 3]
    assert view[-1] == 2 and len(view) == 8
    with pytest.raises(IndexError):
        view[8]


def test_gap_values_bands_cover_values():
    s = build_stream(corpus.builtin("sparse_random"))
    values, (lo, hi) = gap_values(s, 3, 5000)
    for k in range(0, 5000, 7):
        assert lo[k] <= float(abs(values[k])) <= hi[k]


def test_sampling_and_stride():
    assert default_stride(100_000) == 500
    pts = sample_points(1003, 100)
    assert pts[0] == 100 and pts[-1] == 1003
    assert tail_window(100_000, F(1, 5)) == (80_000, 100_000)


def _curve(counts, N=1000, stride=10):
    n = np.arange(stride, N + 1, stride)
    return DensityCurve(n, np.asarray(counts(n)), np.zeros(len(n), dtype=np.int64), F(1), N)


def test_limit_verdict_three_ways():
    assert limit_verdict(_curve(lambda n: np.zeros_like(n))).status == "zero"
    half = limit_verdict(_curve(lambda n: n // 2))
    assert half.status == "positive" and abs(half.estimate - F(1, 2)) < F(1, 100)
    # density 0.0015 sits between tol and 2 tol
    mid = limit_verdict(_curve(lambda n: (n * 15) // 10000), tolerance=F(1, 1000))
    assert mid.status == "inconclusive"


def test_limit_verdict_needs_tail_samples():
    with pytest.raises(InsufficientData):
        limit_verdict(_curve(lambda n: n, N=100, stride=50))


def test_epsilon_grid_validation():
    with pytest.raises(ValueError):
        EpsilonGrid((F(1, 2), F(1)))
    with pytest.raises(ValueError):
        EpsilonGrid((F(0),))
    assert list(EpsilonGrid(("1", "0.5"))) == [1, F(1, 2)]
