from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from certquad.errors import EvaluationError, ParseError
from certquad.expr import Binary, Const, Jet3, Pow, Unary, Var, eval_jet, evaluate, parse, to_text


def jet(text: str, x: float) -> tuple[float, ...]:
    return tuple(float(v) for v in eval_jet(parse(text), x))


# -- parsing ---------------------------------------------------------------


def test_parse_examples():
    assert parse("cos(x)-x") == Binary("-", Unary("cos", Var()), Var())
    assert parse("ln(x^2+1)") == Unary("ln", Binary("+", Pow(Var(), 2.0), Const(1.0)))


def test_precedence():
    # ^ binds tighter than unary minus, which binds tighter than * and /
    assert parse("-x^2") == Unary("neg", Pow(Var(), 2.0))
    assert parse("2*x+1") == Binary("+", Binary("*", Const(2.0), Var()), Const(1.0))
    assert parse("x/2/4") == Binary("/", Binary("/", Var(), Const(2.0)), Const(4.0))
    assert parse("2^3^2") == Pow(Const(2.0), 9.0)
    assert parse("x^-1") == Pow(Var(), -1.0)
    assert evaluate(parse("2*pi - e"), 0.0) == pytest.approx(2 * math.pi - math.e)
    assert evaluate(parse("1.5e-3*x"), 2.0) == pytest.approx(3e-3)


@pytest.mark.parametrize(
    "text, offset",
    [("2+*3", 2), ("x^", 2), ("sin x", 4), ("(x+1", 4), ("x 2", 2), ("foo(x)", 0), ("x$", 1)],
)
def test_syntax_errors_report_offset(text, offset):
    with pytest.raises(ParseError) as info:
        parse(text)
    assert info.value.offset == offset


def test_syntax_error_expected_set():
    with pytest.raises(ParseError) as info:
        parse("2+*3")
    assert "number" in info.value.expected and "(" in info.value.expected


def test_unknown_identifier_and_nonconstant_exponent():
    with pytest.raises(ParseError, match="unknown identifier"):
        parse("y + 1")
    with pytest.raises(ParseError, match="constant"):
        parse("x^x")


def test_non_ascii_rejected():
    with pytest.raises(ParseError):
        parse("x²")


# -- jets ------------------------------------------------------------------


def test_jet_examples():
    assert jet("cos(x)-x", 0.0) == pytest.approx((1.0, -1.0, -1.0, 0.0))
    assert jet("x^3", 2.0) == (8.0, 12.0, 12.0, 6.0)
    assert jet("x", 7.0) == (7.0, 1.0, 0.0, 0.0)


def test_jet_product_rule_third_derivative():
    f, g = Jet3(1.0, 2.0, 3.0, 4.0), Jet3(5.0, 6.0, 7.0, 8.0)
    p = f * g
    assert p.v3 == 4 * 5 + 3 * 3 * 6 + 3 * 2 * 7 + 1 * 8


@pytest.mark.parametrize(
    "text, x, expected",
    [
        ("tan(x)", 0.3, (math.tan(0.3), 1 / math.cos(0.3) ** 2,
                         2 * math.tan(0.3) / math.cos(0.3) ** 2,
                         (2 + 4 * math.sin(0.3) ** 2) / math.cos(0.3) ** 4)),
        ("exp(2*x)", 0.5, tuple(2.0**k * math.exp(1.0) for k in range(4))),
        ("ln(x)", 2.0, (math.log(2.0), 0.5, -0.25, 0.25)),
        ("sqrt(x)", 4.0, (2.0, 0.25, -1 / 32, 3 / 256)),
        ("1/x", 2.0, (0.5, -0.25, 0.25, -0.375)),
        ("x^-2", 2.0, (0.25, -0.25, 0.375, -0.75)),
        ("x^2.5", 4.0, (32.0, 20.0, 7.5, 0.9375)),
    ],
)
def test_jet_known_derivatives(text, x, expected):
    assert jet(text, x) == pytest.approx(expected, rel=1e-13)


def test_jet_vectorised_matches_scalar():
    t = np.linspace(-1.0, 1.0, 7)
    j = eval_jet(parse("sin(3*x)*exp(x) + x^4"), t)
    for i, ti in enumerate(t):
        s = jet("sin(3*x)*exp(x) + x^4", float(ti))
        assert (j.v0[i], j.v1[i], j.v2[i], j.v3[i]) == pytest.approx(s, rel=1e-15)


@pytest.mark.parametrize(
    "text, x, node",
    [("ln(x)", 0.0, "ln(x)"), ("sqrt(x)", -1.0, "sqrt(x)"), ("1/x", 0.0, "(1.0 / x)"), ("tan(x)", math.pi / 2, "tan(x)")],
)
def test_domain_errors_name_the_node(text, x, node):
    with pytest.raises(EvaluationError) as info:
        eval_jet(parse(text), x)
    assert info.value.node == node
    with pytest.raises(EvaluationError):
        evaluate(parse(text), x)


# -- random expressions ----------------------------------------------------

# each builder keeps its result finite and smooth on [-1, 1]
_LEAVES = st.one_of(st.just("x"), st.integers(-3, 3).map(str), st.sampled_from(["0.5", "pi", "e"]))


def _extend(children):
    return st.one_of(
        st.tuples(children, st.sampled_from(["+", "-", "*"]), children).map(lambda t: f"({t[0]}){t[1]}({t[2]})"),
        children.map(lambda c: f"sin({c})"),
        children.map(lambda c: f"cos({c})"),
        children.map(lambda c: f"exp(0.2*sin({c}))"),
        children.map(lambda c: f"ln(1+({c})^2)"),
        children.map(lambda c: f"sqrt(2+cos({c}))"),
        children.map(lambda c: f"({c})/(2+sin({c}))"),
        children.map(lambda c: f"tan(0.5*sin({c}))"),
        st.tuples(children, st.integers(2, 4)).map(lambda t: f"({t[0]})^{t[1]}"),
    )


EXPRESSIONS = st.recursive(_LEAVES, _extend, max_leaves=6)


def _with_x(text: str) -> str:
    return f"({text}) + 0.1*x^3"


@settings(max_examples=50, deadline=None)
@given(EXPRESSIONS, st.floats(-0.9, 0.9))
def test_random_expression_derivatives_match_finite_differences(text, x):
    e = parse(_with_x(text))
    h = 1e-5
    lo, hi = eval_jet(e, x - h), eval_jet(e, x + h)
    j = eval_jet(e, x)
    # each order against the central difference of the order below
    for k, (der, below_lo, below_hi, rtol) in enumerate(
        [(j.v1, lo.v0, hi.v0, 1e-4), (j.v2, lo.v1, hi.v1, 1e-4), (j.v3, lo.v2, hi.v2, 1e-3)], start=1
    ):
        fd = (below_hi - below_lo) / (2 * h)
        scale = max(1.0, abs(j.v0), abs(j.v1), abs(j.v2))
        assert abs(float(der) - fd) <= rtol * max(abs(fd), 1e-2 * scale), (k, text, x)


@settings(max_examples=50, deadline=None)
@given(EXPRESSIONS)
def test_print_reparse_roundtrip(text):
    e = parse(_with_x(text))
    again = parse(to_text(e))
    assert again == e
    t = np.linspace(-1.0, 1.0, 100)
    a, b = eval_jet(e, t), eval_jet(again, t)
    for u, v in zip(a, b):
        np.testing.assert_allclose(v, u, rtol=1e-14, atol=0)


def test_parse_is_deterministic():
    text = "exp(2*x)*cos(exp(x))"
    assert jet(text, 0.3) == jet(text, 0.3)
    assert parse(text) == parse(text)
