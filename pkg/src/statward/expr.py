"""Real functions of one variable: grammar, canonical printer and evaluators.

Grammar (EBNF)::

    function := expr [ "on" domain ]
    domain   := "R" | ( "[" | "(" ) bound "," bound ( "]" | ")" )
    bound    := [ "-" ] ( NUMBER | "inf" )
    expr     := term { ( "+" | "-" ) term }
    term     := unary { ( "*" | "/" ) unary }
    unary    := "-" unary | power
    power    := atom [ "^" [ "-" ] INTEGER ]
    atom     := NUMBER | "x" | "(" expr ")" | NAME "(" expr { "," expr } ")"

NAME is one of abs, max, min, sqrt, sin, cos, exp, log.  ``**`` is accepted
for ``^``.  Numbers are read exactly, decimals included.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from . import numeric
from .lexer import DSLSyntaxError, TokenStream, UnknownIdentifier
from .numeric import Approx, DomainViolation

GRAMMAR_HINT = (
    "function grammar: expression in x with + - * / ^ and abs, max, min, sqrt, sin, cos, exp, log, "
    "optionally followed by a domain such as 'on [0,1]', 'on (0,1]' or 'on R'"
)


# AST -----------------------------------------------------------------------------

class Node:
    __slots__ = ()


@dataclass(frozen=True)
class Var(Node):
    pass


@dataclass(frozen=True)
class Const(Node):
    value: Fraction


@dataclass(frozen=True)
class Neg(Node):
    arg: Node


@dataclass(frozen=True)
class BinOp(Node):
    op: str  # + - * /
    left: Node
    right: Node


@dataclass(frozen=True)
class Pow(Node):
    base: Node
    exponent: int


@dataclass(frozen=True)
class Call(Node):
    name: str
    args: tuple


FUNCTIONS = {"abs": 1, "max": 2, "min": 2, "sqrt": 1, "sin": 1, "cos": 1, "exp": 1, "log": 1}


@dataclass(frozen=True)
class Interval:
    """Real interval; ``None`` bounds are infinite (and always open)."""

    lo: Optional[Fraction] = None
    hi: Optional[Fraction] = None
    lo_closed: bool = False
    hi_closed: bool = False

    def __post_init__(self):
        if self.lo is None and self.lo_closed or self.hi is None and self.hi_closed:
            raise ValueError("infinite endpoints are open")
        if self.lo is not None and self.hi is not None:
            if self.lo > self.hi or (self.lo == self.hi and not (self.lo_closed and self.hi_closed)):
                raise ValueError("empty domain")

    @property
    def bounded(self) -> bool:
        return self.lo is not None and self.hi is not None

    def contains(self, x) -> Optional[bool]:
        """True/False when decidable, None for approximate values on the boundary."""
        verdicts = []
        if self.lo is not None:
            c = numeric.compare(x, self.lo)
            verdicts.append(None if c is None else (c > 0 or (c == 0 and self.lo_closed)))
        if self.hi is not None:
            c = numeric.compare(x, self.hi)
            verdicts.append(None if c is None else (c < 0 or (c == 0 and self.hi_closed)))
        if False in verdicts:
            return False
        return None if None in verdicts else True

    def __str__(self):
        if self.lo is None and self.hi is None:
            return "R"
        lo = "-inf" if self.lo is None else _num(self.lo)
        hi = "inf" if self.hi is None else _num(self.hi)
        return f"{'[' if self.lo_closed else '('}{lo},{hi}{']' if self.hi_closed else ')'}"


REAL_LINE = Interval()

FLAGS = ("uniformlyContinuous", "continuous", "slowlyOscillatingContinuous")


@dataclass(frozen=True)
class FunctionSpec:
    ast: Node
    domain: Interval = REAL_LINE
    flags: frozenset = field(default=frozenset(), compare=False)

    def __post_init__(self):
        unknown = set(self.flags) - set(FLAGS)
        if unknown:
            raise ValueError(f"unknown property flags {sorted(unknown)}")
        object.__setattr__(self, "flags", frozenset(self.flags))

    def __str__(self):
        text = format_expr(self.ast)
        return text if self.domain == REAL_LINE else f"{text} on {self.domain}"

    def evaluate(self, value):
        return eval_function(self, value)

    def compile(self):
        return compile_numpy(self)

    def interval(self):
        return compile_interval(self)

    def with_flags(self, *flags) -> "FunctionSpec":
        return FunctionSpec(self.ast, self.domain, frozenset(flags))


# printer ---------------------------------------------------------------------------

def _num(q: Fraction) -> str:
    """Exact decimal when the denominator is 2^a 5^b, else a/b."""
    q = Fraction(q)
    d = q.denominator
    twos = fives = 0
    while d % 2 == 0:
        d //= 2
        twos += 1
    while d % 5 == 0:
        d //= 5
        fives += 1
    if d != 1:
        return f"{q.numerator}/{q.denominator}"
    if q.denominator == 1:
        return str(q.numerator)
    places = max(twos, fives)
    scaled = abs(q) * 10 ** places
    digits = str(int(scaled)).rjust(places + 1, "0")
    text = f"{digits[:-places]}.{digits[-places:]}"
    return "-" + text if q < 0 else text


_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}


def format_expr(node: Node, context: int = 0) -> str:
    """Canonical infix text with minimal parentheses."""
    if isinstance(node, Var):
        return "x"
    if isinstance(node, Const):
        text = _num(node.value)
        return text if node.value >= 0 and "/" not in text else f"({text})"
    if isinstance(node, Call):
        return f"{node.name}(" + ", ".join(format_expr(a) for a in node.args) + ")"
    if isinstance(node, Pow):
        base = format_expr(node.base, 4)
        if isinstance(node.base, Pow):
            base = f"({base})"
        return f"{base}^{node.exponent}"
    if isinstance(node, Neg):
        text = "-" + format_expr(node.arg, 3)
        return f"({text})" if context > 1 else text
    if isinstance(node, BinOp):
        prec = _PREC[node.op]
        left = format_expr(node.left, prec)
        right = format_expr(node.right, prec + 1)
        text = f"{left} {node.op} {right}"
        return f"({text})" if context > prec else text
    raise TypeError(f"not an expression node: {node!r}")


# parser ------------------------------------------------------------------------------

class _Parser:
    def __init__(self, text):
        self.ts = TokenStream(text)

    def parse(self) -> FunctionSpec:
        ast = self.expr()
        domain = REAL_LINE
        if self.ts.accept("on"):
            domain = self.domain()
        if self.ts.peek.kind != "EOF":
            self.ts.error("unexpected trailing input")
        return FunctionSpec(ast, domain)

    def domain(self) -> Interval:
        ts = self.ts
        if ts.accept("R"):
            return REAL_LINE
        tok = ts.peek
        if ts.accept("["):
            lo_closed = True
        elif ts.accept("("):
            lo_closed = False
        else:
            ts.error("expected 'R', '[' or '(' to open a domain")
        lo = self.bound(-1)
        ts.expect(",")
        hi = self.bound(1)
        if ts.accept("]"):
            hi_closed = True
        elif ts.accept(")"):
            hi_closed = False
        else:
            ts.error("expected ']' or ')' to close the domain")
        if (lo is None and lo_closed) or (hi is None and hi_closed):
            ts.error("infinite endpoints must be open", tok)
        if lo is None and hi is None:
            return REAL_LINE
        if lo is not None and hi is not None and (lo > hi or (lo == hi and not (lo_closed and hi_closed))):
            raise DSLSyntaxError("empty domain", ts.text, tok.pos)
        return Interval(lo, hi, lo_closed, hi_closed)

    def bound(self, side):
        ts = self.ts
        sign = -1 if ts.accept("-") else 1
        tok = ts.peek
        if ts.accept("inf"):
            if sign != side:
                ts.error("infinite endpoint on the wrong side", tok)
            return None
        tok = ts.next()
        if tok.kind != "NUMBER":
            ts.error("expected a number or inf", tok)
        return sign * numeric.parse_rational(tok.text)

    def expr(self):
        node = self.term()
        while True:
            tok = self.ts.accept("+") or self.ts.accept("-")
            if tok is None:
                return node
            node = BinOp(tok.text, node, self.term())

    def term(self):
        node = self.unary()
        while True:
            tok = self.ts.accept("*") or self.ts.accept("/")
            if tok is None:
                return node
            node = BinOp(tok.text, node, self.unary())

    def unary(self):
        if self.ts.accept("-"):
            arg = self.unary()
            if isinstance(arg, Const) and arg.value > 0:
                return Const(-arg.value)
            return Neg(arg)
        return self.power()

    def power(self):
        base = self.atom()
        if self.ts.accept("^"):
            sign = -1 if self.ts.accept("-") else 1
            tok = self.ts.next()
            if tok.kind != "NUMBER" or not tok.text.isdigit():
                self.ts.error("exponent must be an integer literal", tok)
            return Pow(base, sign * int(tok.text))
        return base

    def atom(self):
        ts = self.ts
        tok = ts.next()
        if tok.kind == "NUMBER":
            return Const(numeric.parse_rational(tok.text))
        if tok.kind == "OP" and tok.text == "(":
            node = self.expr()
            ts.expect(")")
            return node
        if tok.kind == "NAME":
            if tok.text == "x":
                return Var()
            if tok.text not in FUNCTIONS:
                ts.error(f"unknown identifier {tok.text!r}", tok, UnknownIdentifier)
            ts.expect("(")
            args = [self.expr()]
            while ts.accept(","):
                args.append(self.expr())
            ts.expect(")")
            if len(args) != FUNCTIONS[tok.text]:
                raise DSLSyntaxError(f"{tok.text} takes {FUNCTIONS[tok.text]} argument(s), got {len(args)}",
                                     ts.text, tok.pos)
            return Call(tok.text, tuple(args))
        ts.error("expected a number, x, a function call or '('", tok)


def parse_function(text: str) -> FunctionSpec:
    """Parse ``text`` into a :class:`FunctionSpec`; errors carry the character position."""
    return _Parser(text).parse()


def format_function(fspec: FunctionSpec) -> str:
    return str(fspec)


# exact / interval evaluation ---------------------------------------------------------

def _max(a, b):
    if numeric.is_exact(a) and numeric.is_exact(b):
        return max(a, b)
    a, b = numeric.as_approx(a), numeric.as_approx(b)
    # max is 1-Lipschitz in the sup norm, so the larger radius covers both errors
    return Approx(max(a.mid, b.mid), max(a.rad, b.rad))


def _min(a, b):
    return -_max(-a, -b)


def _div(a, b):
    if numeric.is_exact(b):
        if b == 0:
            raise DomainViolation("division by zero")
        return a / b
    return a * numeric.as_approx(b).reciprocal()


def _pow(a, n):
    if n >= 0:
        return a ** n
    if numeric.is_exact(a):
        if a == 0:
            raise DomainViolation("zero to a negative power")
        return Fraction(1) / a ** (-n)
    return numeric.as_approx(a).reciprocal() ** (-n)


def _sqrt(a):
    if numeric.compare(a, 0) == -1:
        raise DomainViolation("square root of a negative number")
    return numeric.sqrt(a)


_CALLS = {
    "abs": lambda a: abs(a),
    "max": _max,
    "min": _min,
    "sqrt": _sqrt,
    "sin": numeric.sin,
    "cos": numeric.cos,
    "exp": numeric.exp,
    "log": numeric.log,
}


def _eval(node, x):
    if isinstance(node, Var):
        return x
    if isinstance(node, Const):
        return node.value
    if isinstance(node, Neg):
        return -_eval(node.arg, x)
    if isinstance(node, BinOp):
        a, b = _eval(node.left, x), _eval(node.right, x)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        return _div(a, b)
    if isinstance(node, Pow):
        return _pow(_eval(node.base, x), node.exponent)
    if isinstance(node, Call):
        return _CALLS[node.name](*(_eval(a, x) for a in node.args))
    raise TypeError(f"not an expression node: {node!r}")


def _normalise(v):
    if isinstance(v, Approx):
        return v
    if isinstance(v, (int, Fraction)):
        return Fraction(v)
    if isinstance(v, str):
        return numeric.parse_rational(v)
    if isinstance(v, float):
        return Fraction(v)
    return numeric.as_approx(v)


def eval_function(fspec: FunctionSpec, value):
    """f(value): a Fraction when every step is rational, otherwise an :class:`Approx`."""
    x = _normalise(value)
    if fspec.domain.contains(x) is False:
        raise DomainViolation(f"{numeric.format_value(x)} is outside {fspec.domain}")
    try:
        out = _eval(fspec.ast, x)
    except ZeroDivisionError:
        raise DomainViolation("division by zero") from None
    return Fraction(out) if isinstance(out, int) else out


def is_rational_closed(node: Node) -> bool:
    """Whether exact inputs always give exact outputs (no transcendental step)."""
    if isinstance(node, Call):
        return node.name in ("abs", "max", "min") and all(is_rational_closed(a) for a in node.args)
    if isinstance(node, (Var, Const)):
        return True
    if isinstance(node, Neg):
        return is_rational_closed(node.arg)
    if isinstance(node, Pow):
        return is_rational_closed(node.base)
    return is_rational_closed(node.left) and is_rational_closed(node.right)


# float evaluation for searching ----------------------------------------------------

_NP = {"abs": np.abs, "max": np.maximum, "min": np.minimum, "sqrt": np.sqrt, "sin": np.sin,
       "cos": np.cos, "exp": np.exp, "log": np.log}


def _np_eval(node, x):
    if isinstance(node, Var):
        return x
    if isinstance(node, Const):
        return np.full_like(x, float(node.value))
    if isinstance(node, Neg):
        return -_np_eval(node.arg, x)
    if isinstance(node, BinOp):
        a, b = _np_eval(node.left, x), _np_eval(node.right, x)
        return {"+": np.add, "-": np.subtract, "*": np.multiply, "/": np.divide}[node.op](a, b)
    if isinstance(node, Pow):
        return np.power(_np_eval(node.base, x), float(node.exponent))
    return _NP[node.name](*(_np_eval(a, x) for a in node.args))


def _np_inside(domain: Interval, x):
    ok = np.ones(np.shape(x), dtype=bool)
    if domain.lo is not None:
        lo = float(domain.lo)
        ok &= (x >= lo) if domain.lo_closed else (x > lo)
    if domain.hi is not None:
        hi = float(domain.hi)
        ok &= (x <= hi) if domain.hi_closed else (x < hi)
    return ok


def compile_numpy(fspec: FunctionSpec):
    """Vectorised float64 evaluator; invalid points come back as nan."""
    ast = fspec.ast

    def f(x):
        x = np.asarray(x, dtype=float)
        with np.errstate(all="ignore"):
            y = _np_eval(ast, x)
        y = np.where(np.isfinite(y), y, np.nan)
        return np.where(_np_inside(fspec.domain, x), y, np.nan)

    return f


# interval extension ------------------------------------------------------------------
#
# Bulk enclosures for mapped streams: given float64 bounds on x, return float64
# bounds on f(x) with outward rounding.  Library transcendental functions are
# trusted to a few ulps and widened by more than that.  Anything not provably
# inside the domain, or produced from nan, becomes (-inf, inf), which leaves
# the decision to exact evaluation.

_ULPS = 8.0


def _down(v):
    return np.nextafter(v, -np.inf)


def _up(v):
    return np.nextafter(v, np.inf)


def _widen(lo, hi, ulps=_ULPS):
    return lo - ulps * np.spacing(np.abs(lo)), hi + ulps * np.spacing(np.abs(hi))


def _iv_mul(a, b):
    prods = np.stack([a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1]])
    return _down(prods.min(axis=0)), _up(prods.max(axis=0))


def _iv_recip(a):
    lo, hi = a
    spans_zero = (lo <= 0) & (hi >= 0)
    rlo, rhi = _down(1.0 / hi), _up(1.0 / lo)
    return np.where(spans_zero, -np.inf, rlo), np.where(spans_zero, np.inf, rhi)


def _iv_pow(a, n):
    if n == 0:
        return np.ones_like(a[0]), np.ones_like(a[0])
    lo, hi = a
    m = abs(n)
    plo, phi = np.power(lo, m), np.power(hi, m)
    if m % 2:
        rlo, rhi = plo, phi
    else:
        top = np.power(np.maximum(np.abs(lo), np.abs(hi)), m)
        rlo = np.where(lo >= 0, plo, np.where(hi <= 0, phi, 0.0))
        rhi = np.where(lo >= 0, phi, np.where(hi <= 0, plo, top))
    # float pow is not correctly rounded; allow a few ulps per multiplication
    rlo, rhi = _widen(rlo, rhi, _ULPS * m)
    return _iv_recip((rlo, rhi)) if n < 0 else (rlo, rhi)


def _iv_abs(a):
    lo, hi = a
    return (np.where(lo >= 0, lo, np.where(hi <= 0, -hi, 0.0)),
            np.where(lo >= 0, hi, np.where(hi <= 0, -lo, np.maximum(-lo, hi))))


def _iv_periodic(a, fn, peak):
    """Enclosure of sin or cos; ``peak`` is the phase of the maximum."""
    lo, hi = a
    two_pi = 2 * np.pi
    vlo, vhi = fn(lo), fn(hi)
    rlo, rhi = np.minimum(vlo, vhi), np.maximum(vlo, vhi)
    # pad the phase test so float error in the reduction can only add extrema
    pad = 1e-9 * np.maximum(1.0, np.maximum(np.abs(lo), np.abs(hi)))
    has_max = np.floor((hi + pad - peak) / two_pi) >= np.ceil((lo - pad - peak) / two_pi)
    has_min = np.floor((hi + pad - peak - np.pi) / two_pi) >= np.ceil((lo - pad - peak - np.pi) / two_pi)
    rhi = np.where(has_max, 1.0, rhi)
    rlo = np.where(has_min, -1.0, rlo)
    rlo, rhi = _widen(rlo, rhi)
    wide = (hi - lo >= two_pi) | (np.maximum(np.abs(lo), np.abs(hi)) > 2.0 ** 20)
    return np.clip(np.where(wide, -1.0, rlo), -1, 1), np.clip(np.where(wide, 1.0, rhi), -1, 1)


def _iv_monotone(a, fn, valid):
    lo, hi = a
    ok = valid(lo)
    with np.errstate(all="ignore"):
        rlo, rhi = _widen(fn(np.where(ok, lo, 1.0)), fn(np.where(ok, hi, 1.0)))
    return np.where(ok, rlo, -np.inf), np.where(ok, rhi, np.inf)


def _iv_eval(node, x):
    if isinstance(node, Var):
        return x
    if isinstance(node, Const):
        v = float(node.value)
        s = abs(v) * 2.0 ** -50 + 1e-300
        return np.full_like(x[0], v - s), np.full_like(x[0], v + s)
    if isinstance(node, Neg):
        lo, hi = _iv_eval(node.arg, x)
        return -hi, -lo
    if isinstance(node, BinOp):
        a, b = _iv_eval(node.left, x), _iv_eval(node.right, x)
        if node.op == "+":
            return _down(a[0] + b[0]), _up(a[1] + b[1])
        if node.op == "-":
            return _down(a[0] - b[1]), _up(a[1] - b[0])
        if node.op == "*":
            return _iv_mul(a, b)
        return _iv_mul(a, _iv_recip(b))
    if isinstance(node, Pow):
        return _iv_pow(_iv_eval(node.base, x), node.exponent)
    args = [_iv_eval(a, x) for a in node.args]
    name = node.name
    if name == "abs":
        return _iv_abs(args[0])
    if name == "max":
        return np.maximum(args[0][0], args[1][0]), np.maximum(args[0][1], args[1][1])
    if name == "min":
        return np.minimum(args[0][0], args[1][0]), np.minimum(args[0][1], args[1][1])
    if name == "sqrt":
        return _iv_monotone(args[0], np.sqrt, lambda lo: lo >= 0)
    if name == "exp":
        return _iv_monotone(args[0], np.exp, lambda lo: np.ones(lo.shape, dtype=bool))
    if name == "log":
        return _iv_monotone(args[0], np.log, lambda lo: lo > 0)
    if name == "sin":
        return _iv_periodic(args[0], np.sin, np.pi / 2)
    return _iv_periodic(args[0], np.cos, 0.0)


def compile_interval(fspec: FunctionSpec):
    """Vectorised enclosure ``(lo, hi) -> (flo, fhi)`` of ``f`` over float64 boxes."""
    ast, domain = fspec.ast, fspec.domain

    def f(lo, hi):
        lo, hi = np.asarray(lo, dtype=float), np.asarray(hi, dtype=float)
        with np.errstate(all="ignore"):
            rlo, rhi = _iv_eval(ast, (lo, hi))
        inside = _np_inside(domain, lo) & _np_inside(domain, hi)
        bad = ~inside | np.isnan(rlo) | np.isnan(rhi) | np.isnan(lo) | np.isnan(hi)
        return np.where(bad, -np.inf, rlo), np.where(bad, np.inf, rhi)

    return f
