from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from statward import corpus
from statward.lexer import DSLSyntaxError
from statward.seqdsl import format_spec, parse_sequence
from statward.sequences import (
    Harmonic, MalformedSpec, Mapped, Periodic, RepeatEach, Scaled, SparsePerturbed, Sum, Theorem1Witness, build_stream,
)

F = Fraction


@pytest.mark.parametrize("text,spec", [
    ("harmonic", Harmonic()),
    ("periodic(0,1)", Periodic((0, 1))),
    ("periodic(0, 1/2, -3)", Periodic((0, F(1, 2), -3))),
    ("repeat_each(harmonic, 3)", RepeatEach(Harmonic(), 3)),
    ("scaled(0.25, harmonic)", Scaled(F(1, 4), Harmonic())),
    ("thm1_witness(p=2, above)", Theorem1Witness(2, "above")),
])
def test_parse_known_forms(text, spec):
    assert parse_sequence(text) == spec


def test_operator_sugar():
    s = parse_sequence("harmonic + 2 * periodic(0,1)")
    vals = build_stream(s).prefix(4)
    assert vals == [1, F(1, 2) + 2, F(1, 3), F(1, 4) + 2]


def test_sparse_with_keywords():
    s = parse_sequence("sparse(constant(0), random, magnitude=constant(1), seed=9)")
    assert isinstance(s, SparsePerturbed) and s.seed == 9 and s.exceptions == "random"


def test_map_embeds_function():
    s = parse_sequence('map("x^2", harmonic)')
    assert isinstance(s, Mapped)
    assert build_stream(s).prefix(3) == [1, F(1, 4), F(1, 9)]


@pytest.mark.parametrize("bad", ["periodic(0,1", "harmonic +", "nosuch(1)", "repeat_each(harmonic, 0)",
                                 "sparse(constant(0), primes, magnitude=constant(1))", "periodic()"])
def test_malformed_sequences_have_positions(bad):
    with pytest.raises(DSLSyntaxError) as info:
        parse_sequence(bad)
    assert 0 <= info.value.position <= len(bad)


@given(st.integers(0, 10 ** 6), st.integers(1, 3))
def test_format_parse_roundtrip(seed, depth):
    spec = corpus.random_exact_spec(seed, depth)
    assert parse_sequence(format_spec(spec)) == spec


@pytest.mark.parametrize("entry", corpus.BUILTIN_SEQUENCES, ids=lambda e: e.name)
def test_builtin_roundtrip(entry):
    assert parse_sequence(format_spec(entry.spec)) == entry.spec


def test_sum_spec_prints_canonically():
    assert format_spec(Sum(Harmonic(), Periodic((0, 1)))) == "sum(harmonic, periodic(0, 1))"


TOKENS = ["periodic", "harmonic", "repeat_each", "sparse", "thm1_witness", "map", "(", ")", ",", ";", "=",
          "p", "above", "0", "1/2", "-", "+", "*", "0.5", '"x"', "squares", "seed", "interleave", "  "]


@given(st.lists(st.sampled_from(TOKENS), max_size=12).map(" ".join) | st.text(max_size=20))
def test_arbitrary_text_fails_cleanly(text):
    try:
        parse_sequence(text)
    except (DSLSyntaxError, MalformedSpec):
        pass
