"""Scalars: exact rationals and 128-bit approximations with error bounds.

Exact values are plain :class:`fractions.Fraction` (ints are accepted too).
Anything irrational is an :class:`Approx`, a midpoint carried at 128 bits plus
a rigorous upper bound on the distance to the true value.  Mixing the two
yields an ``Approx``.
"""
from __future__ import annotations

import math
import re
from decimal import Decimal, InvalidOperation
from fractions import Fraction
from numbers import Rational

import gmpy2
from gmpy2 import mpfr, mpq

PRECISION = 128

_MID = gmpy2.context(precision=PRECISION)
# error radii are rounded away from zero so they stay upper bounds
_UP = gmpy2.context(precision=53, round=gmpy2.RoundUp)
_DOWN = gmpy2.context(precision=53, round=gmpy2.RoundDown)
_REL = mpfr(2) ** -(PRECISION - 2)
_TINY = mpfr(2) ** -(4 * PRECISION)


class DomainViolation(ValueError):
    """A real function was evaluated outside the set where it is defined."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


def _to_mpfr(x):
    if isinstance(x, Fraction):
        return mpfr(mpq(x.numerator, x.denominator), PRECISION)
    return mpfr(x, PRECISION)


def _rounding(mid):
    """Bound on the error of rounding a correctly-rounded result ``mid``."""
    return _UP.add(_UP.mul(abs(mid), _REL), _TINY)


class Approx:
    """A real number known to lie in ``[mid - rad, mid + rad]``."""

    __slots__ = ("mid", "rad")
    exact = False

    def __init__(self, mid, rad=0):
        self.mid = mid if isinstance(mid, type(_REL)) else _to_mpfr(mid)
        self.rad = mpfr(rad, 53)

    @classmethod
    def from_value(cls, x):
        if isinstance(x, Approx):
            return x
        if isinstance(x, (int, Fraction)):
            mid = _to_mpfr(Fraction(x))
            return cls(mid, _rounding(mid) if mid != Fraction(x) else 0)
        return cls(_to_mpfr(x), _rounding(_to_mpfr(x)))

    # arithmetic ---------------------------------------------------------

    def __add__(self, other):
        o = _coerce(other)
        if o is NotImplemented:
            return o
        mid = _MID.add(self.mid, o.mid)
        return Approx(mid, _UP.add(_UP.add(self.rad, o.rad), _rounding(mid)))

    __radd__ = __add__

    def __neg__(self):
        return Approx(-self.mid, self.rad)

    def __pos__(self):
        return self

    def __sub__(self, other):
        o = _coerce(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        o = _coerce(other)
        if o is NotImplemented:
            return o
        return o + (-self)

    def __mul__(self, other):
        o = _coerce(other)
        if o is NotImplemented:
            return o
        mid = _MID.mul(self.mid, o.mid)
        rad = _UP.add(_UP.mul(abs(self.mid), o.rad), _UP.mul(abs(o.mid), self.rad))
        rad = _UP.add(rad, _UP.mul(self.rad, o.rad))
        return Approx(mid, _UP.add(rad, _rounding(mid)))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = _coerce(other)
        if o is NotImplemented:
            return o
        return self * o.reciprocal()

    def __rtruediv__(self, other):
        o = _coerce(other)
        if o is NotImplemented:
            return o
        return o * self.reciprocal()

    def reciprocal(self):
        lo = _DOWN.sub(abs(self.mid), self.rad)
        if lo <= 0:
            raise DomainViolation("division by a value that may be zero")
        mid = _MID.div(1, self.mid)
        # |1/x - 1/m| <= r / (|m| (|m| - r))
        rad = _UP.div(self.rad, _DOWN.mul(abs(self.mid), lo))
        return Approx(mid, _UP.add(rad, _rounding(mid)))

    def __pow__(self, n):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return (self ** -n).reciprocal()
        result = Approx(mpfr(1, PRECISION), 0)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __abs__(self):
        return Approx(abs(self.mid), self.rad)

    # comparisons are only meaningful when decidable ---------------------

    def lower(self):
        return _DOWN.sub(self.mid, self.rad)

    def upper(self):
        return _UP.add(self.mid, self.rad)

    def __float__(self):
        return float(self.mid)

    def __repr__(self):
        return f"Approx({self.mid}, ±{float(self.rad):.3g})"

    def __eq__(self, other):
        o = _coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self.mid == o.mid and self.rad == o.rad

    def __hash__(self):
        return hash((self.mid, self.rad))

    def contains(self, x) -> bool:
        """Whether the exact value ``x`` is inside the enclosure."""
        x = mpq(Fraction(x).numerator, Fraction(x).denominator) if not isinstance(x, Approx) else x.mid
        return self.lower() <= x <= self.upper()


def _coerce(x):
    if isinstance(x, Approx):
        return x
    if isinstance(x, (int, Fraction, Rational)):
        return Approx.from_value(Fraction(x))
    if isinstance(x, float):
        return Approx(_to_mpfr(x), 0)
    return NotImplemented


def is_exact(x) -> bool:
    return not isinstance(x, Approx)


def to_float(x) -> float:
    try:
        return float(x)
    except OverflowError:
        return math.copysign(math.inf, x)


# exact comparison helpers -------------------------------------------------

def _as_mpq(x):
    x = Fraction(x)
    return mpq(x.numerator, x.denominator)


def compare(x, threshold):
    """Three-way sign of ``x - threshold``; ``None`` when undecidable.

    ``threshold`` must be exact.
    """
    if isinstance(x, Approx):
        t = _as_mpq(threshold)
        if x.lower() > t:
            return 1
        if x.upper() < t:
            return -1
        if x.rad == 0 and x.mid == t:
            return 0
        return None
    d = Fraction(x) - Fraction(threshold)
    return (d > 0) - (d < 0)


def abs_at_least(x, eps):
    """``|x| >= eps`` as True/False, or ``None`` when the enclosure straddles eps."""
    if isinstance(x, Approx):
        t = _as_mpq(eps)
        a = abs(x.mid)
        if _DOWN.sub(a, x.rad) >= t:
            return True
        if _UP.add(a, x.rad) < t:
            return False
        return None
    return abs(Fraction(x)) >= eps


def midpoint(x) -> Fraction:
    """Exact rational representative of ``x`` (the midpoint for approximations)."""
    if isinstance(x, Approx):
        n, d = x.mid.as_integer_ratio()
        return Fraction(int(n), int(d))
    return Fraction(x)


def reduced_fraction(n: int, d: int) -> Fraction:
    """Fraction n/d with gcd(n, d) = 1 and d > 0 already known; skips normalisation."""
    f = object.__new__(Fraction)
    f._numerator, f._denominator = n, d
    return f


def scale_exact(c: Fraction, values: list) -> list:
    """c * v for every v, through gmpy2 for exact entries."""
    if c == 1:
        return list(values)
    if c == 0 and all(isinstance(v, (int, Fraction)) for v in values):
        return [Fraction(0)] * len(values)
    q, out = mpq(c.numerator, c.denominator), []
    for v in values:
        if isinstance(v, Fraction):
            r = q * mpq(v.numerator, v.denominator)
            out.append(reduced_fraction(int(r.numerator), int(r.denominator)))
        else:
            out.append(c * v)
    return out


def magnitude_bands(values):
    """Float64 arrays ``lo, hi`` with ``lo <= |x| <= hi`` for every value.

    Used to decide threshold comparisons in bulk; only values whose band
    straddles a threshold need an exact comparison.
    """
    import numpy as np

    n = len(values)
    lo = np.empty(n)
    hi = np.empty(n)
    for i, x in enumerate(values):
        if isinstance(x, Approx):
            a = abs(x.mid)
            lo[i] = max(float(_DOWN.sub(a, x.rad)), 0.0)
            hi[i] = float(_UP.add(a, x.rad))
        else:
            try:
                f = abs(float(x))
            except OverflowError:
                f = math.inf
            lo[i] = f
            hi[i] = f
    # float(Fraction) is correctly rounded: widen by one relative ulp
    lo = np.nextafter(lo * (1 - 2.0 ** -52), 0.0)
    hi = np.nextafter(hi * (1 + 2.0 ** -52), np.inf)
    return lo, hi


def signed_bands(values):
    """Float64 arrays ``lo, hi`` with ``lo <= x <= hi`` for every value."""
    import numpy as np

    mids = np.array([to_float(v.mid if isinstance(v, Approx) else v) for v in values], dtype=float)
    rad = np.array([float(v.rad) if isinstance(v, Approx) else 0.0 for v in values], dtype=float)
    slack = np.abs(mids) * 2.0 ** -50 + rad * (1 + 2.0 ** -50) + 1e-300
    # values that are floats already get a point band, so 0 stays inside [0, 1]
    slack[[_float_exact(v) for v in values]] = 0.0
    return mids - slack, mids + slack


def _float_exact(v) -> bool:
    if isinstance(v, Approx):
        return False
    if isinstance(v, int):
        return abs(v) <= 2 ** 53
    d = v.denominator
    return d & (d - 1) == 0 and d <= 2 ** 1000 and abs(v.numerator) <= 2 ** 53


def gap_magnitude_bands(bands, p: int, n: int):
    """Magnitude bands of ``x[k+p] - x[k]`` for k < n, from signed bands of x."""
    import numpy as np

    lo, hi = bands
    with np.errstate(invalid="ignore", over="ignore"):
        dlo = np.nextafter(lo[p:p + n] - hi[:n], -np.inf)
        dhi = np.nextafter(hi[p:p + n] - lo[:n], np.inf)
        mlo = np.where(dlo > 0, dlo, np.where(dhi < 0, -dhi, 0.0))
        mhi = np.maximum(np.abs(dlo), np.abs(dhi))
    # inf - inf: nothing known, leave it to the exact comparison
    bad = np.isnan(mlo) | np.isnan(mhi)
    mlo[bad], mhi[bad] = 0.0, np.inf
    return mlo, mhi


# exact elementary functions where possible --------------------------------

def _exact_sqrt(q: Fraction):
    if q < 0:
        return None
    rn, rd = math.isqrt(q.numerator), math.isqrt(q.denominator)
    if rn * rn == q.numerator and rd * rd == q.denominator:
        return Fraction(rn, rd)
    return None


def sqrt(x):
    if isinstance(x, Approx):
        if x.upper() < 0:
            raise DomainViolation("sqrt of a negative number")
        lo = x.lower()
        if lo > 0:
            mid = _MID.sqrt(x.mid)
            # |sqrt(y) - sqrt(m)| = |y - m| / (sqrt(y) + sqrt(m)) <= r / sqrt(lo)
            rad = _UP.div(x.rad, _DOWN.sqrt(lo))
        else:
            mid = _MID.sqrt(max(x.mid, mpfr(0, PRECISION)))
            rad = _UP.sqrt(_UP.add(abs(x.mid), x.rad))
        return Approx(mid, _UP.add(rad, _rounding(mid)))
    q = Fraction(x)
    if q < 0:
        raise DomainViolation(f"sqrt of negative value {q}")
    r = _exact_sqrt(q)
    if r is not None:
        return r
    mid = _MID.sqrt(_as_mpq(q))
    return Approx(mid, _rounding(mid))


def _lipschitz_unary(fn, x, lipschitz_bound):
    if isinstance(x, int) or (isinstance(x, Fraction) and x.denominator == 1):
        n = int(x)
        if abs(n) < 2 ** PRECISION:
            # exactly representable argument: only the final rounding matters
            mid = fn(mpfr(n, PRECISION))
            return Approx(mid, _rounding(mid))
    a = Approx.from_value(x)
    mid = fn(a.mid)
    rad = _UP.add(lipschitz_bound(a), _rounding(mid))
    return Approx(mid, rad)


def sin(x):
    if not isinstance(x, Approx) and x == 0:
        return Fraction(0)
    return _lipschitz_unary(_MID.sin, x, lambda a: min(a.rad, mpfr(2)))


def cos(x):
    if not isinstance(x, Approx) and x == 0:
        return Fraction(1)
    return _lipschitz_unary(_MID.cos, x, lambda a: min(a.rad, mpfr(2)))


def exp(x):
    if not isinstance(x, Approx) and x == 0:
        return Fraction(1)
    # |e^y - e^m| <= e^m (e^r - 1)
    return _lipschitz_unary(
        _MID.exp, x, lambda a: _UP.mul(_UP.exp(a.mid), _UP.expm1(a.rad))
    )


def log(x):
    if not isinstance(x, Approx):
        q = Fraction(x)
        if q <= 0:
            raise DomainViolation(f"log of non-positive value {q}")
        if q == 1:
            return Fraction(0)
    a = Approx.from_value(x)
    lo = a.lower()
    if lo <= 0:
        raise DomainViolation("log of a value that may be non-positive")
    # |log y - log m| <= r / (m - r)
    return _lipschitz_unary(_MID.log, a, lambda b: _UP.div(b.rad, lo))


def as_approx(x) -> Approx:
    return Approx.from_value(x)


# parsing ------------------------------------------------------------------

_RATIONAL_RE = re.compile(r"^\s*([+-]?\d+)\s*/\s*([+-]?\d+)\s*$")


def parse_rational(text) -> Fraction:
    """Parse ``a/b`` or a decimal literal exactly.

    >>> parse_rational("0.125")
    Fraction(1, 8)
    >>> parse_rational("-3/6")
    Fraction(-1, 2)
    """
    if isinstance(text, (int, Fraction)):
        return Fraction(text)
    s = str(text).strip()
    m = _RATIONAL_RE.match(s)
    if m:
        den = int(m.group(2))
        if den == 0:
            raise ValueError(f"zero denominator in {text!r}")
        return Fraction(int(m.group(1)), den)
    try:
        d = Decimal(s)
    except InvalidOperation:
        raise ValueError(f"not a rational number: {text!r}") from None
    if not d.is_finite():
        raise ValueError(f"not a finite number: {text!r}")
    return Fraction(d)


def format_value(x) -> str:
    """Stable text form: ``a/b`` for rationals, a 40-digit decimal otherwise."""
    if isinstance(x, Approx):
        return f"{x.mid:.40g}"
    q = Fraction(x)
    return str(q)
