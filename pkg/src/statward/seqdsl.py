"""Text form of sequence specs.

Grammar (informal)::

    expr    := term (("+" | "-") term)*
    term    := unary (("*" | "/") unary)*
    unary   := "-" unary | atom
    atom    := NUMBER | NAME | NAME "(" [arg ("," arg)*] ")" | "(" expr ")"
    arg     := [NAME "="] (expr | STRING | NAME)

Examples: ``periodic(0,1)``, ``repeat_each(harmonic, 3)``,
``thm1_witness(p=3, above)``, ``0.5*harmonic + periodic(0,1)``.
Numbers are exact (``0.5`` is 1/2).  A bare number is a constant sequence.
"""
from __future__ import annotations

from fractions import Fraction

from . import numeric
from .lexer import DSLSyntaxError, TokenStream, UnknownIdentifier
from .sequences import (
    Arithmetic, Constant, Delta, Explicit, Harmonic, InterleaveBlocks, LogIndex,
    Mapped, MalformedSpec, Periodic, RepeatEach, Scaled, SequenceSpec, Shifted,
    SparsePerturbed, SqrtIndex, Subsequence, SubsequenceSelector, Sum,
    Theorem1Witness,
)

GRAMMAR_HINT = (
    "sequence grammar: constant(c) | periodic(v1,...) | harmonic | sqrt_index | log_index | "
    "arithmetic(a,d) | explicit(v1,...; tail=SEQ) | sparse(SEQ, squares|cubes|powers_of_two|random, "
    "magnitude=SEQ, seed=N) | thm1_witness(p=N, above|below) | sum(SEQ,SEQ) | scaled(c,SEQ) | "
    "repeat_each(SEQ,p) | interleave(SEQ,SEQ,p) | delta(SEQ,p) | shift(SEQ,n) | "
    "subseq(SEQ, identity|evens|squares) | map(\"f(x) on I\", SEQ); combine with + - * /"
)

_ATOMS = {
    "harmonic": Harmonic,
    "sqrt_index": SqrtIndex,
    "log_index": LogIndex,
}


class _Parser:
    def __init__(self, text):
        self.ts = TokenStream(text)

    def parse(self):
        value = self.expr()
        if self.ts.peek.kind != "EOF":
            self.ts.error("unexpected trailing input")
        return _as_spec(value)

    def expr(self):
        value = self.term()
        while True:
            if self.ts.accept("+"):
                value = _add(value, self.term())
            elif self.ts.accept("-"):
                value = _add(value, _neg(self.term()))
            else:
                return value

    def term(self):
        value = self.unary()
        while True:
            tok = self.ts.peek
            if self.ts.accept("*"):
                rhs = self.unary()
                value = _mul(value, rhs, self.ts, tok)
            elif self.ts.accept("/"):
                rhs = self.unary()
                if not isinstance(rhs, Fraction):
                    self.ts.error("can only divide by a number", tok)
                if rhs == 0:
                    self.ts.error("division by zero", tok)
                value = _mul(value, 1 / rhs, self.ts, tok)
            else:
                return value

    def unary(self):
        if self.ts.accept("-"):
            return _neg(self.unary())
        if self.ts.accept("+"):
            return self.unary()
        return self.atom()

    def atom(self):
        tok = self.ts.peek
        if tok.kind == "NUMBER":
            self.ts.next()
            return numeric.parse_rational(tok.text)
        if self.ts.accept("("):
            value = self.expr()
            self.ts.expect(")")
            return value
        if tok.kind == "NAME":
            self.ts.next()
            name = tok.text.lower()
            if self.ts.peek.text == "(" and self.ts.peek.kind == "OP":
                self.ts.next()
                args, kwargs = self.arguments()
                return self.call(name, args, kwargs, tok)
            if name in _ATOMS:
                return _ATOMS[name]()
            self.ts.error(f"unknown sequence {tok.text!r}", tok, UnknownIdentifier)
        self.ts.error("expected a number, a sequence name or '('")

    def arguments(self):
        args, kwargs = [], {}
        if self.ts.accept(")"):
            return args, kwargs
        while True:
            tok = self.ts.peek
            if tok.kind == "NAME" and self.ts.ahead().text == "=":
                self.ts.next()
                self.ts.next()
                kwargs[tok.text.lower()] = (self.argument(), tok)
            else:
                args.append((self.argument(), tok))
            if self.ts.accept(")"):
                return args, kwargs
            if not (self.ts.accept(",") or self.ts.accept(";")):
                self.ts.error("expected ',' or ')'")

    def argument(self):
        tok = self.ts.peek
        if tok.kind == "STRING":
            self.ts.next()
            return tok.text[1:-1]
        nxt = self.ts.ahead()
        if tok.kind == "NAME" and tok.text.lower() not in _ATOMS and nxt.text in (",", ")", ";"):
            self.ts.next()
            return _Word(tok.text.lower())
        return self.expr()

    def call(self, name, args, kwargs, tok):
        try:
            return _CALLS[name](self, args, kwargs)
        except KeyError:
            if name not in _CALLS:
                self.ts.error(f"unknown sequence constructor {name!r}", tok, UnknownIdentifier)
            raise
        except (MalformedSpec, TypeError, ValueError) as exc:
            if isinstance(exc, DSLSyntaxError):
                raise
            raise DSLSyntaxError(f"bad arguments to {name}: {exc}", self.ts.text, tok.pos) from None


class _Word(str):
    """A bare identifier used as an argument (``above``, ``squares``)."""


def _as_spec(value):
    if isinstance(value, Fraction):
        return Constant(value)
    if isinstance(value, _Word):
        if value in _ATOMS:
            return _ATOMS[value]()
        raise MalformedSpec(f"{value!r} is not a sequence")
    return value


def _add(a, b):
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return a + b
    return Sum(_as_spec(a), _as_spec(b))


def _neg(a):
    if isinstance(a, Fraction):
        return -a
    if isinstance(a, Scaled):
        return Scaled(-a.c, a.a)
    return Scaled(Fraction(-1), _as_spec(a))


def _mul(a, b, ts, tok):
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return a * b
    if isinstance(a, Fraction):
        return Scaled(a, _as_spec(b))
    if isinstance(b, Fraction):
        return Scaled(b, _as_spec(a))
    ts.error("product of two sequences is not supported", tok)


def _number(v):
    if not isinstance(v, Fraction):
        raise MalformedSpec(f"expected a number, got {v!r}")
    return v


def _int(v):
    v = _number(v)
    if v.denominator != 1:
        raise MalformedSpec(f"expected an integer, got {v}")
    return int(v)


def _pos(args, i, kwargs, key, default=None):
    if key in kwargs:
        return kwargs[key][0]
    if i < len(args):
        return args[i][0]
    if default is not None:
        return default
    raise MalformedSpec(f"missing argument {key!r}")


def _bind(args, kwargs, names):
    """Positional arguments fill, in order, the names not given by keyword."""
    free = [n for n in names if n not in kwargs]
    if len(args) > len(free):
        raise MalformedSpec(f"too many arguments; expected {', '.join(names)}")
    out = dict(kwargs)
    out.update(zip(free, args))
    return out


def _c_constant(p, args, kw):
    return Constant(_number(_pos(args, 0, kw, "c")))


def _c_periodic(p, args, kw):
    return Periodic(tuple(_number(a) for a, _ in args))


def _c_arithmetic(p, args, kw):
    return Arithmetic(_number(_pos(args, 0, kw, "a")), _number(_pos(args, 1, kw, "d")))


def _c_explicit(p, args, kw):
    tail = kw.get("tail")
    return Explicit(tuple(_number(a) for a, _ in args), _as_spec(tail[0]) if tail else None)


def _c_sparse(p, args, kw):
    kw = _bind(args, kw, ("base", "exceptions", "magnitude", "seed"))
    base = _as_spec(_pos((), 0, kw, "base"))
    rule = str(_pos((), 0, kw, "exceptions", _Word("squares")))
    magnitude = _as_spec(_pos((), 0, kw, "magnitude", Fraction(1)))
    seed = _int(_pos((), 0, kw, "seed", Fraction(0)))
    return SparsePerturbed(base, rule, magnitude, seed)


def _c_thm1(p, args, kw):
    kw = _bind(args, kw, ("p", "direction"))
    pv = _int(_pos((), 0, kw, "p"))
    direction = str(_pos((), 0, kw, "direction", _Word("above")))
    return Theorem1Witness(pv, direction)


def _c_sum(p, args, kw):
    return Sum(_as_spec(_pos(args, 0, kw, "a")), _as_spec(_pos(args, 1, kw, "b")))


def _c_scaled(p, args, kw):
    return Scaled(_number(_pos(args, 0, kw, "c")), _as_spec(_pos(args, 1, kw, "a")))


def _c_repeat(p, args, kw):
    return RepeatEach(_as_spec(_pos(args, 0, kw, "inner")), _int(_pos(args, 1, kw, "p")))


def _c_interleave(p, args, kw):
    return InterleaveBlocks(_as_spec(_pos(args, 0, kw, "a")), _as_spec(_pos(args, 1, kw, "b")),
                            _int(_pos(args, 2, kw, "p")))


def _c_delta(p, args, kw):
    return Delta(_as_spec(_pos(args, 0, kw, "inner")), _int(_pos(args, 1, kw, "p")))


def _c_shift(p, args, kw):
    return Shifted(_as_spec(_pos(args, 0, kw, "inner")), _int(_pos(args, 1, kw, "offset")))


_SELECTOR_WORDS = {"identity": "identity", "evens": "evens", "squares": "squares-skip"}


def _c_subseq(p, args, kw):
    word = str(_pos(args, 1, kw, "selector"))
    if word not in _SELECTOR_WORDS:
        raise MalformedSpec(f"unknown selector {word!r}")
    return Subsequence(_as_spec(_pos(args, 0, kw, "inner")), SubsequenceSelector(_SELECTOR_WORDS[word]))


def _c_map(p, args, kw):
    from .expr import parse_function

    text = _pos(args, 0, kw, "f")
    if not isinstance(text, str) or isinstance(text, _Word):
        raise MalformedSpec("map expects a quoted function")
    return Mapped(parse_function(text), _as_spec(_pos(args, 1, kw, "inner")))


_CALLS = {
    "constant": _c_constant,
    "periodic": _c_periodic,
    "arithmetic": _c_arithmetic,
    "explicit": _c_explicit,
    "sparse": _c_sparse,
    "thm1_witness": _c_thm1,
    "sum": _c_sum,
    "scaled": _c_scaled,
    "repeat_each": _c_repeat,
    "interleave": _c_interleave,
    "delta": _c_delta,
    "shift": _c_shift,
    "subseq": _c_subseq,
    "map": _c_map,
}


def parse_sequence(text: str) -> SequenceSpec:
    """Parse the sequence DSL into a spec."""
    return _Parser(text).parse()


def _q(x: Fraction) -> str:
    return str(x) if x >= 0 else f"({x})"


def format_spec(spec: SequenceSpec) -> str:
    """Canonical text; ``parse_sequence(format_spec(s)) == s`` for DSL-expressible specs."""
    f = format_spec
    if isinstance(spec, Constant):
        return f"constant({_q(spec.c)})"
    if isinstance(spec, Periodic):
        return "periodic(" + ", ".join(_q(v) for v in spec.values) + ")"
    if isinstance(spec, Harmonic):
        return "harmonic"
    if isinstance(spec, SqrtIndex):
        return "sqrt_index"
    if isinstance(spec, LogIndex):
        return "log_index"
    if isinstance(spec, Arithmetic):
        return f"arithmetic({_q(spec.a)}, {_q(spec.d)})"
    if isinstance(spec, Explicit):
        body = ", ".join(_q(v) for v in spec.values)
        return f"explicit({body}; tail={f(spec.tail)})" if spec.tail else f"explicit({body})"
    if isinstance(spec, SparsePerturbed):
        return (f"sparse({f(spec.base)}, {spec.exceptions}, magnitude={f(spec.magnitude)}, "
                f"seed={spec.seed})")
    if isinstance(spec, Theorem1Witness):
        return f"thm1_witness(p={spec.p}, {spec.direction})"
    if isinstance(spec, Sum):
        return f"sum({f(spec.a)}, {f(spec.b)})"
    if isinstance(spec, Scaled):
        return f"scaled({_q(spec.c)}, {f(spec.a)})"
    if isinstance(spec, RepeatEach):
        return f"repeat_each({f(spec.inner)}, {spec.p})"
    if isinstance(spec, InterleaveBlocks):
        return f"interleave({f(spec.a)}, {f(spec.b)}, {spec.p})"
    if isinstance(spec, Delta):
        return f"delta({f(spec.inner)}, {spec.p})"
    if isinstance(spec, Shifted):
        return f"shift({f(spec.inner)}, {spec.offset})"
    if isinstance(spec, Subsequence):
        sel = spec.selector
        word = {"squares-skip": "squares"}.get(sel.method, sel.method)
        if sel.method == "bisection-convergent":
            word = f"bisection[{len(sel.indices)}]"
        return f"subseq({f(spec.inner)}, {word})"
    if isinstance(spec, Mapped):
        return f'map("{spec.function}", {f(spec.inner)})'
    raise TypeError(f"cannot format {spec!r}")
