"""Declarative infinite real sequences and index-addressable streams.

A :class:`SequenceSpec` describes a sequence; :func:`build_stream` turns it
into a :class:`SequenceStream` whose term ``k`` (1-based) is a pure function
of its spec.  Terms are :class:`~fractions.Fraction` whenever the value is
rational and :class:`~statward.numeric.Approx` otherwise.
"""
from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Optional, Sequence

import numpy as np

from . import numeric


class MalformedSpec(ValueError):
    pass


def _frac(x) -> Fraction:
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    if isinstance(x, str):
        return numeric.parse_rational(x)
    if isinstance(x, float):
        return Fraction(x)
    raise MalformedSpec(f"expected an exact rational, got {x!r}")


def _check_p(p, name="p"):
    if not isinstance(p, int) or isinstance(p, bool) or p < 1:
        raise MalformedSpec(f"{name} must be a positive integer, got {p!r}")


class SequenceSpec:
    """Base class of the sequence description variants."""

    __slots__ = ()

    def __str__(self):
        from .seqdsl import format_spec

        return format_spec(self)


@dataclass(frozen=True, eq=True)
class Constant(SequenceSpec):
    c: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "c", _frac(self.c))


@dataclass(frozen=True)
class Periodic(SequenceSpec):
    values: tuple = ()

    def __post_init__(self):
        vals = tuple(_frac(v) for v in self.values)
        if not vals:
            raise MalformedSpec("Periodic needs at least one value")
        object.__setattr__(self, "values", vals)


@dataclass(frozen=True)
class Harmonic(SequenceSpec):
    """1/k"""


@dataclass(frozen=True)
class SqrtIndex(SequenceSpec):
    """sqrt(k); exact at perfect squares."""


@dataclass(frozen=True)
class LogIndex(SequenceSpec):
    """Natural log of k."""


@dataclass(frozen=True)
class Arithmetic(SequenceSpec):
    a: Fraction = Fraction(0)
    d: Fraction = Fraction(1)

    def __post_init__(self):
        object.__setattr__(self, "a", _frac(self.a))
        object.__setattr__(self, "d", _frac(self.d))


@dataclass(frozen=True)
class Explicit(SequenceSpec):
    """Listed prefix, then ``tail`` evaluated at the same index (default: hold the last value)."""

    values: tuple = ()
    tail: Optional[SequenceSpec] = None

    def __post_init__(self):
        vals = tuple(_frac(v) for v in self.values)
        if not vals:
            raise MalformedSpec("Explicit needs at least one value")
        object.__setattr__(self, "values", vals)


EXCEPTION_RULES = ("squares", "cubes", "powers_of_two", "random")


@dataclass(frozen=True)
class SparsePerturbed(SequenceSpec):
    """``base`` plus ``magnitude`` on a density-zero index set."""

    base: SequenceSpec = field(default_factory=Constant)
    exceptions: str = "squares"
    magnitude: SequenceSpec = field(default_factory=lambda: Constant(1))
    seed: int = 0

    def __post_init__(self):
        if self.exceptions not in EXCEPTION_RULES:
            raise MalformedSpec(f"unknown exception rule {self.exceptions!r}")
        if not 0 <= self.seed < 2 ** 64:
            raise MalformedSpec("seed must fit in 64 bits")


@dataclass(frozen=True)
class Theorem1Witness(SequenceSpec):
    """Canonical escaping sequence: term j is +/- sum_{i<=j} (i p + 1)."""

    p: int = 1
    direction: str = "above"

    def __post_init__(self):
        _check_p(self.p)
        if self.direction not in ("above", "below"):
            raise MalformedSpec("direction must be 'above' or 'below'")


@dataclass(frozen=True)
class Sum(SequenceSpec):
    a: SequenceSpec
    b: SequenceSpec


@dataclass(frozen=True)
class Scaled(SequenceSpec):
    c: Fraction
    a: SequenceSpec

    def __post_init__(self):
        object.__setattr__(self, "c", _frac(self.c))


@dataclass(frozen=True)
class RepeatEach(SequenceSpec):
    inner: SequenceSpec
    p: int

    def __post_init__(self):
        _check_p(self.p)


@dataclass(frozen=True)
class InterleaveBlocks(SequenceSpec):
    a: SequenceSpec
    b: SequenceSpec
    p: int

    def __post_init__(self):
        _check_p(self.p)


@dataclass(frozen=True)
class Delta(SequenceSpec):
    inner: SequenceSpec
    p: int

    def __post_init__(self):
        _check_p(self.p)


@dataclass(frozen=True)
class Shifted(SequenceSpec):
    """Term k is ``inner`` term k + offset."""

    inner: SequenceSpec
    offset: int

    def __post_init__(self):
        if not isinstance(self.offset, int) or self.offset < 0:
            raise MalformedSpec("offset must be a non-negative integer")


SELECTOR_METHODS = ("identity", "evens", "squares-skip", "bisection-convergent")


@dataclass(frozen=True)
class SubsequenceSelector:
    """Strictly increasing index map j -> n_j.

    ``bisection-convergent`` selectors carry their index list explicitly;
    asking past its end raises :class:`IndexError`.
    """

    method: str = "identity"
    indices: tuple = ()

    def __post_init__(self):
        if self.method not in SELECTOR_METHODS:
            raise MalformedSpec(f"unknown selector method {self.method!r}")
        if self.method == "bisection-convergent":
            idx = tuple(int(i) for i in self.indices)
            if any(b <= a for a, b in zip(idx, idx[1:])) or (idx and idx[0] < 1):
                raise MalformedSpec("selector indices must be strictly increasing and >= 1")
            object.__setattr__(self, "indices", idx)

    def __call__(self, j: int) -> int:
        if self.method == "identity":
            return j
        if self.method == "evens":
            return 2 * j
        if self.method == "squares-skip":
            return j * j
        return self.indices[j - 1]

    def __len__(self):
        return len(self.indices) if self.method == "bisection-convergent" else math.inf

    def __repr__(self):
        if self.method == "bisection-convergent":
            return f"SubsequenceSelector('bisection-convergent', <{len(self.indices)} indices>)"
        return f"SubsequenceSelector({self.method!r})"


@dataclass(frozen=True)
class Subsequence(SequenceSpec):
    inner: SequenceSpec
    selector: SubsequenceSelector


@dataclass(frozen=True)
class Mapped(SequenceSpec):
    """Termwise image f(inner_k); ``function`` needs ``evaluate(value)``."""

    function: object
    inner: SequenceSpec


# streams --------------------------------------------------------------------

CACHE_LIMIT = 4_000_000


class SequenceStream:
    """Evaluator for a spec: ``term(k)`` for k >= 1.

    Evaluation is pure.  Prefixes are memoised behind a lock so a stream can
    be shared between threads; the memo never changes any returned value.
    """

    def __init__(self, spec: SequenceSpec, term: Callable[[int], object],
                 block: Optional[Callable[[int, int], list]] = None,
                 enclosure: Optional[Callable[[int], tuple]] = None):
        self.spec = spec
        self._term = term
        self._block = block
        self._enclose = enclosure
        self._cache: list = []
        self._bands = None
        self._lock = threading.Lock()

    def term(self, k: int):
        if k < 1:
            raise IndexError(f"sequence indices start at 1, got {k}")
        cache = self._cache
        if k <= len(cache):
            return cache[k - 1]
        return self._term(k)

    def terms(self, start: int, stop: int) -> list:
        """Terms ``start .. stop-1``."""
        if start < 1:
            raise IndexError("sequence indices start at 1")
        if stop <= start:
            return []
        if stop - 1 <= len(self._cache):
            return self._cache[start - 1:stop - 1]
        if stop - 1 <= CACHE_LIMIT:
            with self._lock:
                have = len(self._cache)
                if stop - 1 > have:
                    self._cache.extend(self._compute(have + 1, stop))
            return self._cache[start - 1:stop - 1]
        return self._compute(start, stop)

    def prefix(self, n: int) -> list:
        """Terms 1..n as a list."""
        return self.terms(1, n + 1)

    def enclosure(self, n: int) -> tuple:
        """Float64 arrays ``lo, hi`` with ``lo[i] <= a_{i+1} <= hi[i]`` for i < n.

        Composite specs combine their children's enclosures with outward
        rounding, so no exact term has to be formed; leaves convert their
        exact values.
        """
        cached = self._bands
        if cached is not None and len(cached[0]) >= n:
            return cached[0][:n], cached[1][:n]
        if self._enclose is not None:
            lo, hi = self._enclose(n)
        else:
            lo, hi = numeric.signed_bands(self.prefix(n))
        lo, hi = np.asarray(lo, dtype=float)[:n], np.asarray(hi, dtype=float)[:n]
        lo = np.where(np.isnan(lo), -np.inf, lo)
        hi = np.where(np.isnan(hi), np.inf, hi)
        self._bands = (lo, hi)
        return lo, hi

    def _compute(self, start, stop):
        if self._block is not None:
            return self._block(start, stop)
        t = self._term
        return [t(k) for k in range(start, stop)]

    def is_exact_prefix(self, n: int) -> bool:
        return all(numeric.is_exact(v) for v in self.prefix(n))

    def __repr__(self):
        return f"SequenceStream({self.spec})"


# builders -------------------------------------------------------------------

def _is_square(k):
    r = math.isqrt(k)
    return r * r == k


def _is_cube(k):
    r = round(k ** (1 / 3))
    return any((r + d) ** 3 == k for d in (-1, 0, 1))


_PHILOX_BLOCK = 4096


@lru_cache(maxsize=256)
def _uniform_block(seed: int, block: int) -> np.ndarray:
    # disjoint counter words per block keep draws independent of evaluation order
    bitgen = np.random.Philox(key=seed, counter=[0, block, 0, 0])
    return np.random.Generator(bitgen).random(_PHILOX_BLOCK)


def _random_exception(seed):
    def member(k):
        u = _uniform_block(seed, (k - 1) // _PHILOX_BLOCK)[(k - 1) % _PHILOX_BLOCK]
        # inclusion probability 1/sqrt(k): expected count ~ 2 sqrt(n), density 0
        return u * u * k < 1

    return member


def exception_predicate(rule: str, seed: int = 0) -> Callable[[int], bool]:
    if rule == "squares":
        return _is_square
    if rule == "cubes":
        return _is_cube
    if rule == "powers_of_two":
        return lambda k: k & (k - 1) == 0
    if rule == "random":
        return _random_exception(seed)
    raise MalformedSpec(f"unknown exception rule {rule!r}")


def _theorem1_value(p, direction, j):
    v = Fraction(p * j * (j + 1) // 2 + j)
    return v if direction == "above" else -v


_reuse = threading.local()


def build_stream(spec: SequenceSpec, reuse=()) -> SequenceStream:
    """Compile a spec into a deterministic stream.

    ``reuse`` lists already-built streams; any sub-spec equal to one of their
    specs shares that stream (and its memoised prefix) instead of a fresh one.
    """
    if not isinstance(spec, SequenceSpec):
        raise MalformedSpec(f"not a sequence spec: {spec!r}")
    outer = getattr(_reuse, "table", None)
    table = dict(outer or {})
    table.update({s.spec: s for s in reuse})
    if spec in table:
        return table[spec]
    builder = _BUILDERS.get(type(spec))
    if builder is None:
        raise MalformedSpec(f"no evaluator for {type(spec).__name__}")
    _reuse.table = table
    try:
        parts = builder(spec)
    finally:
        _reuse.table = outer
    return SequenceStream(spec, *parts)


# float enclosures ------------------------------------------------------------------

_REL = 2.0 ** -50


def _point_bands(v: np.ndarray):
    slack = np.abs(v) * _REL + 1e-300
    return v - slack, v + slack


def _add_bands(a, b):
    with np.errstate(invalid="ignore", over="ignore"):
        return np.nextafter(a[0] + b[0], -np.inf), np.nextafter(a[1] + b[1], np.inf)


def _scale_bands(c: Fraction, a):
    if c == 0:
        z = np.zeros(len(a[0]))
        return z, z.copy()
    fc = numeric.to_float(c)
    cl, ch = _point_bands(np.array([fc]))
    with np.errstate(invalid="ignore", over="ignore"):
        prods = np.stack([cl * a[0], cl * a[1], ch * a[0], ch * a[1]])
        return np.nextafter(prods.min(axis=0), -np.inf), np.nextafter(prods.max(axis=0), np.inf)


def _build_constant(s):
    c = s.c
    lo, hi = numeric.signed_bands([c])
    return (lambda k: c), (lambda a, b: [c] * (b - a)), (lambda n: (np.full(n, lo[0]), np.full(n, hi[0])))


def _build_periodic(s):
    vals, m = s.values, len(s.values)
    lo, hi = numeric.signed_bands(vals)
    return (lambda k: vals[(k - 1) % m]), None, (lambda n: (np.resize(lo, n), np.resize(hi, n)))


def _build_harmonic(s):
    one = numeric.reduced_fraction
    return ((lambda k: one(1, k)), (lambda a, b: [one(1, k) for k in range(a, b)]),
            (lambda n: _point_bands(1.0 / np.arange(1, n + 1, dtype=float))))


def _index_bands(fn, n, ulps):
    v = fn(np.arange(1, n + 1, dtype=float))
    pad = ulps * np.spacing(v)
    return v - pad, v + pad


def _build_sqrt(s):
    # IEEE sqrt is correctly rounded
    return (lambda k: numeric.sqrt(Fraction(k))), None, (lambda n: _index_bands(np.sqrt, n, 1))


def _build_log(s):
    return (lambda k: numeric.log(Fraction(k))), None, (lambda n: _index_bands(np.log, n, 8))


def _build_arithmetic(s):
    a, d = s.a, s.d
    fa, fd = numeric.to_float(a), numeric.to_float(d)

    def enclose(n):
        steps = np.arange(n, dtype=float)
        v = fa + steps * fd
        slack = (abs(fa) + steps * abs(fd)) * 2.0 ** -48 + 1e-300
        return v - slack, v + slack

    return (lambda k: a + (k - 1) * d), None, enclose


def _build_explicit(s):
    vals = s.values
    tail = build_stream(s.tail) if s.tail is not None else None
    last = vals[-1]

    def term(k):
        if k <= len(vals):
            return vals[k - 1]
        return tail.term(k) if tail is not None else last

    def block(a, b):
        head = list(vals[a - 1:b - 1])
        if len(head) == b - a:
            return head
        start = a + len(head)
        rest = tail.terms(start, b) if tail is not None else [last] * (b - start)
        return head + list(rest)

    def enclose(n):
        hlo, hhi = numeric.signed_bands(vals)
        if tail is not None:
            lo, hi = (x.copy() for x in tail.enclosure(n))
        else:
            lo, hi = np.full(n, hlo[-1]), np.full(n, hhi[-1])
        m = min(n, len(vals))
        lo[:m], hi[:m] = hlo[:m], hhi[:m]
        return lo, hi

    return term, block, enclose


def _build_sparse(s):
    base = build_stream(s.base)
    mag = build_stream(s.magnitude)
    member = exception_predicate(s.exceptions, s.seed)

    def term(k):
        v = base.term(k)
        return v + mag.term(k) if member(k) else v

    def block(a, b):
        vals = base.terms(a, b)
        return [v + mag.term(k) if member(k) else v for k, v in zip(range(a, b), vals)]

    def enclose(n):
        mask = np.fromiter((member(k) for k in range(1, n + 1)), dtype=bool, count=n)
        b, m = base.enclosure(n), mag.enclosure(n)
        lo, hi = _add_bands(b, m)
        return np.where(mask, lo, b[0]), np.where(mask, hi, b[1])

    return term, block, enclose


def _build_theorem1(s):
    p, direction = s.p, s.direction
    return (lambda k: _theorem1_value(p, direction, k)), None


def _build_sum(s):
    a, b = build_stream(s.a), build_stream(s.b)
    for x, y in ((s.a, b), (s.b, a)):
        # adding the zero sequence changes nothing
        if isinstance(x, Constant) and x.c == 0:
            return y.term, (lambda lo, hi: list(y.terms(lo, hi))), y.enclosure
    return (lambda k: a.term(k) + b.term(k)), (
        lambda lo, hi: [x + y for x, y in zip(a.terms(lo, hi), b.terms(lo, hi))]
    ), (lambda n: _add_bands(a.enclosure(n), b.enclosure(n)))


def _build_scaled(s):
    a, c = build_stream(s.a), s.c
    return ((lambda k: c * a.term(k)), (lambda lo, hi: numeric.scale_exact(c, a.terms(lo, hi))),
            (lambda n: _scale_bands(c, a.enclosure(n))))


def _build_repeat(s):
    inner, p = build_stream(s.inner), s.p

    def term(k):
        return inner.term((k - 1) // p + 1)

    def block(lo, hi):
        j0, j1 = (lo - 1) // p + 1, (hi - 2) // p + 1
        src = inner.terms(j0, j1 + 1)
        return [src[(k - 1) // p + 1 - j0] for k in range(lo, hi)]

    def enclose(n):
        lo, hi = inner.enclosure(-(-n // p))
        return np.repeat(lo, p)[:n], np.repeat(hi, p)[:n]

    return term, block, enclose


def _build_interleave(s):
    a, b, p = build_stream(s.a), build_stream(s.b), s.p

    def term(k):
        block_index, offset = divmod(k - 1, 2 * p)
        src = a if offset < p else b
        return src.term(block_index + 1)

    def block(lo, hi):
        j0, j1 = (lo - 1) // (2 * p) + 1, (hi - 2) // (2 * p) + 1
        av, bv = a.terms(j0, j1 + 1), b.terms(j0, j1 + 1)
        out = []
        for k in range(lo, hi):
            j, off = divmod(k - 1, 2 * p)
            out.append((av if off < p else bv)[j + 1 - j0])
        return out

    def enclose(n):
        m = -(-n // (2 * p))
        (alo, ahi), (blo, bhi) = a.enclosure(m), b.enclosure(m)
        j, off = np.divmod(np.arange(n), 2 * p)
        first = off < p
        return np.where(first, alo[j], blo[j]), np.where(first, ahi[j], bhi[j])

    return term, block, enclose


def _build_delta(s):
    inner, p = build_stream(s.inner), s.p

    def block(lo, hi):
        vals = inner.terms(lo, hi + p)
        return [y - x for x, y in zip(vals, vals[p:])]

    def enclose(n):
        lo, hi = inner.enclosure(n + p)
        with np.errstate(invalid="ignore", over="ignore"):
            return np.nextafter(lo[p:] - hi[:n], -np.inf), np.nextafter(hi[p:] - lo[:n], np.inf)

    return (lambda k: inner.term(k + p) - inner.term(k)), block, enclose


def _build_shifted(s):
    inner, off = build_stream(s.inner), s.offset
    def enclose(n):
        lo, hi = inner.enclosure(n + off)
        return lo[off:], hi[off:]

    return (lambda k: inner.term(k + off)), (lambda lo, hi: inner.terms(lo + off, hi + off)), enclose


def _build_subsequence(s):
    inner, sel = build_stream(s.inner), s.selector
    return (lambda k: inner.term(sel(k))), None


def _build_mapped(s):
    inner, f = build_stream(s.inner), s.function

    def apply(k, v):
        try:
            return f.evaluate(v)
        except numeric.DomainViolation as exc:
            raise numeric.DomainViolation(f"term {k}: {exc}", index=k) from None

    def block(lo, hi):
        return [apply(k, v) for k, v in zip(range(lo, hi), inner.terms(lo, hi))]

    def enclose(n):
        lo, hi = f.interval()(*inner.enclosure(n))
        # unknown boxes straddle the domain edge or hit a singularity; settle them term by term,
        # so a term outside the domain raises here just as exact evaluation would
        unknown = np.flatnonzero(np.isinf(lo) | np.isinf(hi))
        if len(unknown):
            lo, hi = lo.copy(), hi.copy()
            vals = [apply(int(i) + 1, inner.term(int(i) + 1)) for i in unknown]
            lo[unknown], hi[unknown] = numeric.signed_bands(vals)
        return lo, hi

    return (lambda k: apply(k, inner.term(k))), block, enclose


_BUILDERS = {
    Constant: _build_constant,
    Periodic: _build_periodic,
    Harmonic: _build_harmonic,
    SqrtIndex: _build_sqrt,
    LogIndex: _build_log,
    Arithmetic: _build_arithmetic,
    Explicit: _build_explicit,
    SparsePerturbed: _build_sparse,
    Theorem1Witness: _build_theorem1,
    Sum: _build_sum,
    Scaled: _build_scaled,
    RepeatEach: _build_repeat,
    InterleaveBlocks: _build_interleave,
    Delta: _build_delta,
    Shifted: _build_shifted,
    Subsequence: _build_subsequence,
    Mapped: _build_mapped,
}


# operations -------------------------------------------------------------------

def _spec_of(x) -> SequenceSpec:
    return x.spec if isinstance(x, SequenceStream) else x


def _reusable(*xs):
    return [x for x in xs if isinstance(x, SequenceStream)]


def _stream_of(x) -> SequenceStream:
    return x if isinstance(x, SequenceStream) else build_stream(x)


def term(stream, k: int):
    return _stream_of(stream).term(k)


def delta_stream(stream, p: int) -> SequenceStream:
    """Stream of p-successive differences a_{k+p} - a_k."""
    _check_p(p)
    return build_stream(Delta(_spec_of(stream), p), _reusable(stream))


def combine(a, b, ca, cb) -> SequenceStream:
    """Termwise ca * a_k + cb * b_k."""
    ca, cb = _frac(ca), _frac(cb)
    sa, sb = _spec_of(a), _spec_of(b)
    part_a = sa if ca == 1 else Scaled(ca, sa)
    part_b = sb if cb == 1 else Scaled(cb, sb)
    if cb == 0:
        spec = part_a if ca != 0 else Scaled(0, sa)
    elif ca == 0:
        spec = part_b
    else:
        spec = Sum(part_a, part_b)
    return build_stream(spec, _reusable(a, b))


def repeat_each(stream, p: int) -> SequenceStream:
    _check_p(p)
    return build_stream(RepeatEach(_spec_of(stream), p), _reusable(stream))


def interleave_blocks(a, b, p: int) -> SequenceStream:
    """p copies of a_1, p copies of b_1, p copies of a_2, ..."""
    _check_p(p)
    return build_stream(InterleaveBlocks(_spec_of(a), _spec_of(b), p), _reusable(a, b))


def subsequence(stream, selector: SubsequenceSelector) -> SequenceStream:
    return build_stream(Subsequence(_spec_of(stream), selector), _reusable(stream))


def shifted(stream, offset: int) -> SequenceStream:
    return build_stream(Shifted(_spec_of(stream), offset), _reusable(stream))


def is_exact_spec(spec: SequenceSpec) -> bool:
    """Whether every term of ``spec`` is rational by construction."""
    if isinstance(spec, (SqrtIndex, LogIndex, Mapped)):
        return False
    children = [getattr(spec, name) for name in ("a", "b", "inner", "base", "magnitude", "tail")
                if isinstance(getattr(spec, name, None), SequenceSpec)]
    return all(is_exact_spec(c) for c in children)


def exact_values(values: Sequence) -> bool:
    return all(numeric.is_exact(v) for v in values)
