import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from exprecog.expr import (BinOp, Call, ExpressionError, Neg, Num, Var, evaluate_expression,
                           expression_oracle, expression_to_ronkin, parse_expression, to_text)
from exprecog.exppoly import ExpPoly
from exprecog.oracle import FunctionOracle

DIM = 3


def _ast(depth):
    leaves = st.one_of(
        st.floats(0, 1e6, allow_nan=False, allow_infinity=False).map(Num),
        st.integers(1, DIM).map(Var),
    )
    if depth == 0:
        return leaves
    sub = _ast(depth - 1)
    return st.one_of(
        leaves,
        sub.map(Neg),
        st.builds(BinOp, st.sampled_from("+-*/^"), sub, sub),
        st.builds(Call, st.sampled_from(["exp", "log", "sin", "cos"]), sub),
    )


@settings(max_examples=500)
@given(_ast(6))
def test_print_parse_round_trip(node):
    text = to_text(node)
    assert parse_expression(text, DIM) == node
    assert to_text(parse_expression(text, DIM)) == text


def test_examples():
    assert parse_expression("exp(x1*x2)", 2) == Call("exp", BinOp("*", Var(1), Var(2)))
    with pytest.raises(ExpressionError) as info:
        parse_expression("x1 + ", 1)
    assert info.value.offset == 5
    assert evaluate_expression(parse_expression("2^3^2", 1), [[0.0]])[0] == pytest.approx(512)


def test_precedence():
    ev = lambda s: evaluate_expression(parse_expression(s, 1), [[2.0]])[0].real
    assert ev("-x1^2") == -4
    assert ev("2^-1") == 0.5
    assert ev("1 - 2 - 3") == -4
    assert ev("8 / 2 / 2") == 2
    assert ev("1 + 2 * 3") == 7
    assert ev("(1 + 2) * 3") == 9
    assert ev("2.5e-1 * 4") == 1


@pytest.mark.parametrize("text,kind,offset", [
    ("x1 @ 2", "lexical", 3),
    ("foo(x1)", "unknown-identifier", 0),
    ("x1 + x3", "variable-range", 5),
    ("x0", "variable-range", 0),
    ("sin()", "arity", 4),
    ("cos(x1, x2)", "arity", 6),
    ("exp x1", "arity", 4),
    ("(x1", "syntax", 3),
    ("x1 x2", "syntax", 3),
    ("é + x1", "lexical", 0),
    ("xé", "lexical", 1),
])
def test_errors_carry_kind_and_byte_offset(text, kind, offset):
    with pytest.raises(ExpressionError) as info:
        parse_expression(text, 2)
    assert info.value.kind == kind and info.value.offset == offset


def test_prefix_variables():
    node = parse_expression("-exp(h1)", 1, prefix="h")
    assert to_text(node, "h") == "(-exp(h1))"
    with pytest.raises(ExpressionError):
        parse_expression("x1", 1, prefix="h")


def test_expression_oracle_matches_exppoly():
    c = math.log(2)
    f = expression_oracle(f"3*exp({c!r}*x1)+1", 1)
    g = FunctionOracle.from_exppoly(ExpPoly.from_1d([([3.0], c), ([1.0], 0.0)]))
    x = np.random.default_rng(0).uniform(-3, 3, (100, 1))
    assert f.provenance == "closed-form"
    assert np.abs(f.evaluate_many(x) - g.evaluate_many(x)).max() <= 1e-9 * np.abs(g.evaluate_many(x)).max()


def test_evaluation_is_complex():
    v = evaluate_expression(parse_expression("log(-1)", 1), [[0.0]])[0]
    assert v == pytest.approx(1j * math.pi)


def test_ronkin_conversion_from_text():
    from exprecog.exppoly import RonkinRejection, ronkin_to_exppoly
    r = expression_to_ronkin(parse_expression("x1*exp(x1+x2) - 2*exp(3)", 2), 2)
    p = ronkin_to_exppoly(r)
    assert isinstance(p, ExpPoly)
    assert p([0.5, 0.25]) == pytest.approx(0.5 * math.exp(0.75) - 2 * math.exp(3))
    rej = ronkin_to_exppoly(expression_to_ronkin(parse_expression("exp(x1*x2*x3)+exp(x1)", 3), 3))
    assert isinstance(rej, RonkinRejection) and rej.degree == 3 and rej.witness == (1.0, 1.0, 1.0)
