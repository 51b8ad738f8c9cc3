from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from padicstrat.core import PadicContext
from padicstrat.defset import FiniteSet, dim_estimate, evaluate, parse, parse_poly, to_text
from padicstrat.errors import ExprSyntaxError, UnknownVariable
from padicstrat.fixtures import FIXTURES, get_fixture
from padicstrat.errors import UnknownFixture


def test_parse_fixture_expressions():
    assert to_text(parse("x2 - x1^2 = 0")) == to_text(parse(to_text(parse("x2 - x1^2 = 0"))))
    assert parse_poly("x1*x2 - 9", 2).eval_point((3, 3), 27) == 0


def test_syntax_error_names_expected_token():
    with pytest.raises(ExprSyntaxError) as err:
        parse("val(x1) >")
    assert "INT" in str(err.value) or "integer" in str(err.value)


def test_unknown_variable():
    with pytest.raises(UnknownVariable):
        evaluate("x3 = 0", PadicContext(3, 2, 2))


def test_parabola_points():
    ctx = PadicContext(3, 2, 2)
    X = evaluate("x2 - x1^2 = 0", ctx)
    assert sorted(X.points()) == sorted((a, a * a % 9) for a in range(9))


def test_valuation_atom_and_contradiction():
    ctx = PadicContext(3, 2, 1)
    assert evaluate("val(x1) >= 1", ctx).points() == [(0,), (3,), (6,)]
    assert not evaluate("x1 = 0 & val(x1) = 0", ctx)


def test_rv_atom():
    ctx = PadicContext(3, 3, 1)
    X = evaluate("rv(x1 - 1) = (1, 1)", ctx)
    assert X.points() == [(x,) for x in range(27) if (x - 1) % 9 == 3]


def test_boolean_connectives():
    ctx = PadicContext(2, 2, 2)
    A = evaluate("x1 = 0", ctx)
    B = evaluate("x2 = 1", ctx)
    assert evaluate("x1 = 0 | x2 = 1", ctx) == A | B
    assert evaluate("x1 = 0 & !(x2 = 1)", ctx) == A - B


def test_dim_estimate_examples():
    ctx = PadicContext(3, 2, 2)
    assert dim_estimate(FiniteSet.from_points(ctx, [(1, 2)])) == 0
    assert dim_estimate(FiniteSet.full(ctx)) == 2
    assert dim_estimate(evaluate("x2 - x1^2 = 0", ctx)) == 1


def test_fixture_strats():
    ctx = PadicContext(3, 3, 2)
    S = FIXTURES["parabola"].strat(ctx)
    X = FIXTURES["parabola"].set(ctx)
    assert S.stratum(0) == [(0, 0)]
    assert set(S.stratum(1)) == set(X.points()) - {(0, 0)}
    assert len(S.stratum(2)) == 729 - len(X)
    ctx1 = PadicContext(3, 3, 1)
    T = FIXTURES["ball-in-K"].strat(ctx1)
    assert T.stratum(0) == [(1,)]
    assert FIXTURES["hyperbola"].strat(PadicContext(3, 4, 2)).stratum(0) == [(0, 0)]
    with pytest.raises(UnknownFixture):
        get_fixture("ellipse")


def test_precision_refinement_stable_off_sensitive_points():
    # a point of the m-evaluation lifts to points whose (m+1)-membership can only change where flagged
    expr = "x2 - x1^2 = 0"
    lo = evaluate(expr, PadicContext(3, 2, 2))
    hi = evaluate(expr, PadicContext(3, 3, 2))
    for x in hi.points():
        low = tuple(a % 9 for a in x)
        assert low in lo or lo.sensitive[low]
    for x in lo.points():
        if lo.sensitive[x]:
            continue
        lifts = [(x[0] + 9 * a, x[1] + 9 * b) for a in range(3) for b in range(3)]
        assert any(y in hi for y in lifts)


_atoms = st.sampled_from(["x1 = 0", "x2 = x1^2", "val(x1 - 1) >= 1", "rv(x2) = (0, 1)", "x1*x2 = 3"])


@st.composite
def _exprs(draw, depth=2):
    if depth == 0 or draw(st.booleans()):
        return draw(_atoms)
    op = draw(st.sampled_from(["&", "|", "!"]))
    if op == "!":
        return f"!({draw(_exprs(depth=depth - 1))})"
    return f"({draw(_exprs(depth=depth - 1))}) {op} ({draw(_exprs(depth=depth - 1))})"


@settings(max_examples=100, deadline=None)
@given(_exprs())
def test_print_parse_roundtrip(text):
    ctx = PadicContext(3, 2, 2)
    node = parse(text, 2)
    again = parse(to_text(node), 2)
    assert to_text(again) == to_text(node)
    assert evaluate(again, ctx) == evaluate(text, ctx)
