from fractions import Fraction

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from statward import corpus, numeric
from statward.expr import (
    FUNCTIONS, BinOp, Call, Const, Interval, Neg, Pow, Var, compile_numpy, eval_function, format_expr,
    is_rational_closed, parse_function,
)
from statward.lexer import DSLSyntaxError, UnknownIdentifier
from statward.numeric import DomainViolation

F = Fraction

consts = st.fractions(-20, 20, max_denominator=16).map(Const)
leaves = st.one_of(st.just(Var()), consts)


def _extend(children):
    return st.one_of(
        children.map(Neg),
        st.tuples(st.sampled_from("+-*/"), children, children).map(lambda t: BinOp(*t)),
        st.tuples(children, st.integers(-3, 4)).map(lambda t: Pow(*t)),
        st.tuples(st.sampled_from(sorted(FUNCTIONS)), children, children).map(
            lambda t: Call(t[0], (t[1],) if FUNCTIONS[t[0]] == 1 else (t[1], t[2]))),
    )


asts = st.recursive(leaves, _extend, max_leaves=8)


@given(asts)
def test_print_parse_is_a_fixed_point(ast):
    text = format_expr(ast)
    once = parse_function(text)
    assert parse_function(str(once)) == once


@given(asts, st.fractions(-3, 3, max_denominator=7))
def test_reparsed_expression_evaluates_identically(ast, x):
    from statward.expr import FunctionSpec
    original = FunctionSpec(ast)
    reparsed = parse_function(format_expr(ast))
    try:
        a = eval_function(original, x)
    except (DomainViolation, ZeroDivisionError, OverflowError):
        assume(False)
    b = eval_function(reparsed, x)
    if numeric.is_exact(a):
        assert a == b
    else:
        assert abs(float(a.mid) - float(b.mid)) <= float(a.rad) + float(b.rad) + 1e-30


@pytest.mark.parametrize("text", corpus.PARSER_ROUNDTRIP)
def test_corpus_roundtrip(text):
    f = parse_function(text)
    assert parse_function(str(f)) == f


@pytest.mark.parametrize("text", corpus.PARSER_MALFORMED)
def test_corpus_malformed_positions(text):
    with pytest.raises(DSLSyntaxError) as info:
        parse_function(text)
    assert info.value.position is not None and 0 <= info.value.position <= len(text)


def test_unknown_identifier_is_specific():
    with pytest.raises(UnknownIdentifier):
        parse_function("foo(x)")


def test_decimal_constants_are_exact():
    f = parse_function("0.1 * x")
    assert eval_function(f, 3) == F(3, 10)
    assert str(f) == "0.1 * x"


def test_domains():
    f = parse_function("1/x on (0,1]")
    assert f.domain == Interval(F(0), F(1), False, True)
    assert eval_function(f, F(1, 4)) == 4
    with pytest.raises(DomainViolation):
        eval_function(f, 0)
    with pytest.raises(DomainViolation):
        eval_function(f, 2)
    assert str(parse_function("exp(-x) on [0,inf)").domain) == "[0,inf)"


@pytest.mark.parametrize("text", ["x on [1,0]", "x on (1,1)", "x on [-inf,0]"])
def test_bad_domains(text):
    with pytest.raises(DSLSyntaxError):
        parse_function(text)


def test_partial_operations_raise_domain_violation():
    with pytest.raises(DomainViolation):
        eval_function(parse_function("sqrt(x)"), -1)
    with pytest.raises(DomainViolation):
        eval_function(parse_function("log(x)"), 0)
    with pytest.raises(DomainViolation):
        eval_function(parse_function("1/(x - 1)"), 1)


def test_transcendental_values_are_enclosures():
    v = eval_function(parse_function("sin(1/x) on (0,1)"), F(2, 3))
    assert not numeric.is_exact(v)
    assert abs(float(v.mid) - np.sin(1.5)) < 1e-15


def test_rational_closed_detection():
    assert is_rational_closed(parse_function("abs(x - 1) / (1 + x^2)").ast)
    assert not is_rational_closed(parse_function("sin(x)").ast)


def test_compile_numpy_matches_exact():
    f = parse_function("max(x, 1 - x) + abs(x)^2")
    g = compile_numpy(f)
    xs = np.linspace(-2, 2, 41)
    exact = [float(eval_function(f, F(x).limit_denominator(1000))) for x in xs]
    assert np.allclose(g(xs), exact)


def test_compile_numpy_nan_outside_domain():
    g = compile_numpy(parse_function("sqrt(x) on [0,1]"))
    out = g(np.array([-1.0, 0.25, 2.0]))
    assert np.isnan(out[0]) and out[1] == 0.5 and np.isnan(out[2])


def test_negative_constant_printing():
    assert str(parse_function("x * -2")) == "x * (-2)"
    assert str(parse_function("x + 1/3")) == "x + 1 / 3"
    assert str(parse_function("(x^2)^3")) == "(x^2)^3"


@given(asts, st.floats(-50, 50), st.floats(0, 2), st.integers(0, 8))
def test_interval_extension_encloses_point_values(ast, centre, width, t):
    from statward.expr import FunctionSpec, compile_interval
    f = FunctionSpec(ast)
    lo, hi = centre, centre + width
    flo, fhi = compile_interval(f)(np.array([lo]), np.array([hi]))
    x = F(lo) + (F(hi) - F(lo)) * F(t, 8)
    try:
        v = eval_function(f, x)
    except (DomainViolation, ZeroDivisionError, OverflowError):
        return
    m = numeric.midpoint(v)
    if numeric.is_exact(v):
        assert (flo[0] == -np.inf or F(flo[0]) <= m) and (fhi[0] == np.inf or m <= F(fhi[0]))
    else:
        # both enclose the true value, so they must overlap
        r = F(*map(int, v.rad.as_integer_ratio()))
        assert flo[0] == -np.inf or F(flo[0]) <= m + r
        assert fhi[0] == np.inf or m - r <= F(fhi[0])


def test_interval_extension_respects_domain():
    from statward.expr import compile_interval
    g = compile_interval(parse_function("sqrt(x) on [0,1]"))
    lo, hi = g(np.array([-1.0, 0.25, 0.5]), np.array([-0.5, 0.36, 2.0]))
    assert lo[0] == -np.inf and hi[2] == np.inf
    assert lo[1] <= 0.5 <= hi[1] and lo[1] <= 0.6 <= hi[1]


def test_interval_sin_catches_interior_extrema():
    from statward.expr import compile_interval
    g = compile_interval(parse_function("sin(x)"))
    lo, hi = g(np.array([1.0]), np.array([2.0]))
    assert hi[0] >= 1.0 and lo[0] <= np.sin(1.0)


EXPR_TOKENS = ["x", "(", ")", ",", "+", "-", "*", "/", "^", "sin", "max", "abs", "on", "[", "]", "1",
               "0.5", "inf", "2^-3", "log", " "]


@given(st.lists(st.sampled_from(EXPR_TOKENS), max_size=12).map(" ".join) | st.text(max_size=20))
def test_arbitrary_function_text_fails_cleanly(text):
    try:
        parse_function(text)
    except DSLSyntaxError:
        pass
