"""Natural-density exceedance curves and finite-prefix limit verdicts.

For a stream ``x`` and a threshold ``eps`` the exceedance count is
``|{k <= n : |x_k| >= eps}|``; its density is the count divided by ``n``.
Counts are exact integers.  For approximate terms a comparison only counts
when it is provable; undecidable ones are tallied separately as ambiguous.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from . import numeric
from .sequences import SequenceStream

DEFAULT_EPSILONS = (Fraction(1), Fraction(1, 2), Fraction(1, 10), Fraction(1, 100), Fraction(1, 1000))
DEFAULT_N = 100_000
DEFAULT_TAIL_FRACTION = Fraction(1, 5)
DEFAULT_TOLERANCE = Fraction(1, 1000)
MIN_TAIL_SAMPLES = 10


class InsufficientData(ValueError):
    pass


@dataclass(frozen=True)
class EpsilonGrid:
    values: tuple = DEFAULT_EPSILONS

    def __post_init__(self):
        vals = tuple(numeric.parse_rational(v) for v in self.values)
        if not vals:
            raise ValueError("epsilon grid is empty")
        if any(v <= 0 for v in vals):
            raise ValueError("epsilon values must be positive")
        if any(b >= a for a, b in zip(vals, vals[1:])):
            raise ValueError("epsilon grid must be strictly decreasing")
        object.__setattr__(self, "values", vals)

    def __iter__(self):
        return iter(self.values)

    def __len__(self):
        return len(self.values)


def default_stride(N: int) -> int:
    """Stride that stores about 200 curve points."""
    return max(1, N // 200)


@dataclass
class DensityCurve:
    """Sampled exceedance counts of one stream at one threshold."""

    n: np.ndarray
    count: np.ndarray
    ambiguous: np.ndarray
    epsilon: Fraction
    N: int
    source: str = ""

    @property
    def density(self) -> list:
        return [Fraction(int(c), int(n)) for n, c in zip(self.n, self.count)]

    def points(self):
        """(n, count, ambiguous, density) tuples."""
        for n, c, a in zip(self.n, self.count, self.ambiguous):
            yield int(n), int(c), int(a), Fraction(int(c), int(n))

    def rows(self):
        """CSV rows: n, count, ambiguous, density_num, density_den."""
        for n, c, a, d in self.points():
            yield [n, c, a, d.numerator, d.denominator]

    def __len__(self):
        return len(self.n)


CSV_COLUMNS = ("n", "count", "ambiguous", "density_num", "density_den")


@dataclass
class LimitVerdict:
    status: str  # "zero", "positive" or "inconclusive"
    tail_window: tuple
    estimate: Optional[Fraction] = None
    reason: str = ""
    max_density: Optional[Fraction] = None
    min_density: Optional[Fraction] = None

    @property
    def is_zero(self):
        return self.status == "zero"


def exceedance_flags(values: Sequence, epsilon, bands=None):
    """Boolean arrays ``(exceeds, ambiguous)`` for ``|x_k| >= epsilon``."""
    eps = Fraction(epsilon)
    lo, hi = bands if bands is not None else numeric.magnitude_bands(values)
    ef = float(eps)
    exceeds = lo >= ef * (1 + 2.0 ** -50)
    below = hi < ef * (1 - 2.0 ** -50)
    ambiguous = np.zeros(len(values), dtype=bool)
    for i in np.flatnonzero(~(exceeds | below)):
        verdict = numeric.abs_at_least(values[i], eps)
        if verdict is None:
            ambiguous[i] = True
        else:
            exceeds[i] = verdict
    return exceeds, ambiguous


class GapView(Sequence):
    """Lazy ``x[k+p] - x[k]`` (0-based) over a term list or stream; entries are computed on access."""

    def __init__(self, terms, p: int, n: int):
        if isinstance(terms, SequenceStream):
            stream = terms
            terms = _StreamIndex(stream)
        self.terms, self.p, self.n = terms, p, n
        self._memo = {}

    def __len__(self):
        return self.n

    def __getitem__(self, i):
        if isinstance(i, slice):
            return [self[j] for j in range(*i.indices(self.n))]
        if i < 0:
            i += self.n
        if not 0 <= i < self.n:
            raise IndexError(i)
        v = self._memo.get(i)
        if v is None:
            v = self._memo[i] = self.terms[i + self.p] - self.terms[i]
        return v


class _StreamIndex:
    def __init__(self, stream):
        self.stream = stream

    def __getitem__(self, i):
        return self.stream.term(i + 1)


def gap_values(stream: SequenceStream, p: int, N: int):
    """``(values, bands)`` for the p-gaps of the first N terms.

    Bands come from the stream's float enclosure; gaps are only formed exactly
    where the bands cannot settle a threshold comparison, which is usually a
    handful of indices.
    """
    return GapView(stream, p, N), numeric.gap_magnitude_bands(stream.enclosure(N + p), p, N)


def sample_points(N: int, stride: int) -> np.ndarray:
    pts = np.arange(stride, N + 1, stride, dtype=np.int64)
    if len(pts) == 0 or pts[-1] != N:
        pts = np.append(pts, N)
    return pts


def curve_from_flags(exceeds, ambiguous, epsilon, N, stride, source="") -> DensityCurve:
    cum = np.cumsum(exceeds[:N], dtype=np.int64)
    amb = np.cumsum(ambiguous[:N], dtype=np.int64)
    pts = sample_points(N, stride)
    return DensityCurve(pts, cum[pts - 1], amb[pts - 1], Fraction(epsilon), N, source)


def exceedance_curve(stream: SequenceStream, epsilon, N: int, sample_stride: Optional[int] = None,
                     source: Optional[str] = None) -> DensityCurve:
    """Exceedance counts ``|{k <= n : |x_k| >= epsilon}|`` sampled every ``sample_stride``."""
    eps = numeric.parse_rational(epsilon)
    if eps <= 0:
        raise ValueError("epsilon must be positive")
    if N < 1:
        raise ValueError("N must be positive")
    stride = sample_stride or default_stride(N)
    values = stream.prefix(N)
    exceeds, ambiguous = exceedance_flags(values, eps)
    return curve_from_flags(exceeds, ambiguous, eps, N, stride,
                            source if source is not None else str(stream.spec))


def exceedance_curves(stream: SequenceStream, epsilons, N: int, sample_stride: Optional[int] = None,
                      source: Optional[str] = None) -> list:
    """One curve per threshold, sharing a single pass over the prefix."""
    stride = sample_stride or default_stride(N)
    values = stream.prefix(N)
    bands = numeric.magnitude_bands(values)
    src = source if source is not None else str(stream.spec)
    out = []
    for eps in epsilons:
        exceeds, ambiguous = exceedance_flags(values, eps, bands)
        out.append(curve_from_flags(exceeds, ambiguous, eps, N, stride, src))
    return out


def gap_curves(stream: SequenceStream, p: int, epsilons, N: int, sample_stride: Optional[int] = None,
               source: Optional[str] = None) -> list:
    """Exceedance curves of ``|x_{k+p} - x_k|``, one per threshold."""
    stride = sample_stride or default_stride(N)
    values, bands = gap_values(stream, p, N)
    src = source if source is not None else f"delta_{p}({stream.spec})"
    out = []
    for eps in epsilons:
        eps = numeric.parse_rational(eps)
        if eps <= 0:
            raise ValueError("epsilon must be positive")
        exceeds, ambiguous = exceedance_flags(values, eps, bands)
        out.append(curve_from_flags(exceeds, ambiguous, eps, N, stride, src))
    return out


def tail_window(N: int, tail_fraction) -> tuple:
    lo = math.ceil((1 - Fraction(tail_fraction)) * N)
    return max(lo, 1), N


def limit_verdict(curve: DensityCurve, tail_fraction=DEFAULT_TAIL_FRACTION,
                  tolerance=DEFAULT_TOLERANCE) -> LimitVerdict:
    """Decide whether the sampled density tends to zero on the tail window.

    zero: max tail density <= tolerance.  positive: min tail density >=
    2 * tolerance (estimate = mean tail density).  Otherwise inconclusive,
    as it also is whenever ambiguous comparisons exceed ``tolerance * n``.
    """
    tf = Fraction(tail_fraction)
    tol = Fraction(tolerance)
    if not 0 < tf < 1:
        raise ValueError("tail fraction must lie in (0, 1)")
    window = tail_window(curve.N, tf)
    mask = (curve.n >= window[0]) & (curve.n <= window[1])
    if int(mask.sum()) < MIN_TAIL_SAMPLES:
        raise InsufficientData(
            f"tail window {window} holds {int(mask.sum())} samples, need {MIN_TAIL_SAMPLES}"
        )
    ns, cs, amb = curve.n[mask], curve.count[mask], curve.ambiguous[mask]
    dens = [Fraction(int(c), int(n)) for n, c in zip(ns, cs)]
    hi, lo = max(dens), min(dens)
    if any(Fraction(int(a), int(n)) > tol for n, a in zip(ns, amb)):
        return LimitVerdict("inconclusive", window, reason="ambiguous comparisons exceed tolerance",
                            max_density=hi, min_density=lo)
    if hi <= tol:
        return LimitVerdict("zero", window, max_density=hi, min_density=lo)
    if lo >= 2 * tol:
        return LimitVerdict("positive", window, estimate=sum(dens) / len(dens),
                            max_density=hi, min_density=lo)
    return LimitVerdict("inconclusive", window, reason="tail density neither below tolerance nor above twice tolerance",
                        max_density=hi, min_density=lo)
