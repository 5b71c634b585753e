from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hilbstab.chow import CycleBlowup, D_class, diag, integrate, mul_blowup
from hilbstab.cyclelang import (
    BinOp,
    Box,
    DConst,
    EvalError,
    NestingError,
    ParseError,
    Pow,
    evaluate,
    format_cycle,
    parse,
    parse_divisor,
)
from hilbstab.surface import CycleX, preset
from hilbstab.taut import hn_cubed

SURFACES = {"k3": preset("k3"), "elliptic": preset("elliptic"), "quintic": preset("quintic")}
CUBE = "(box(N*H,1)+box(1,N*H)-D)^3"

rational = st.one_of(st.integers(0, 5).map(str), st.tuples(st.integers(0, 5), st.integers(1, 4)).map(lambda t: f"{t[0]}/{t[1]}"))


def combine(children):
    pair = st.tuples(children, children)
    return st.one_of(
        pair.map(lambda p: f"{p[0]} + {p[1]}"),
        pair.map(lambda p: f"{p[0]} - {p[1]}"),
        pair.map(lambda p: f"({p[0]})*({p[1]})"),
        children.map(lambda c: f"-({c})"),
        st.tuples(children, st.integers(0, 3)).map(lambda p: f"({p[0]})^{p[1]}"),
    )


def surface_exprs(names):
    leaves = st.one_of(rational, st.sampled_from(["1", "pt", "N", *names]))
    return st.recursive(leaves, combine, max_leaves=4)


def blowup_exprs(names):
    sx = surface_exprs(names)
    leaves = st.one_of(
        rational,
        st.just("D"),
        st.just("N"),
        st.tuples(sx, sx).map(lambda p: f"box({p[0]},{p[1]})"),
        sx.map(lambda x: f"exc({x})"),
        sx.map(lambda x: f"diag({x})"),
    )
    return st.recursive(leaves, combine, max_leaves=5)


def surface_with(n):
    return st.sampled_from(sorted(SURFACES)).flatmap(
        lambda k: st.tuples(st.just(SURFACES[k]), *(blowup_exprs(SURFACES[k].known_names()) for _ in range(n)))
    )


def test_parse_examples():
    tree = parse("box(N*H,1) + box(1,N*H) - D")
    assert isinstance(tree, BinOp) and tree.op == "-"
    assert isinstance(tree.right, DConst)
    assert isinstance(tree.left, BinOp) and tree.left.op == "+"
    assert isinstance(tree.left.left, Box) and isinstance(tree.left.right, Box)
    assert isinstance(parse("D^2"), Pow)
    with pytest.raises(NestingError) as err:
        parse("box(exc(H),1)")
    assert err.value.column == 5


def test_precedence():
    s = SURFACES["k3"]
    assert evaluate("-D^2", s) == -evaluate("D^2", s)
    assert evaluate("2^3^2*D", s) == evaluate("512*D", s)
    assert evaluate("1 - D - D", s) == evaluate("1 - 2*D", s)


def test_eval_examples():
    for s in SURFACES.values():
        assert evaluate("D^2", s) == -diag(CycleX.one(s.rho))
        assert evaluate(CUBE, s) == hn_cubed(s)
        assert integrate(evaluate("box(pt,pt)", s)) == 1
        assert evaluate("D", s) == D_class(s.rho)


def test_format_examples():
    s = SURFACES["k3"]
    assert format_cycle(evaluate("D^2", s), s) == "- diag(1)"
    assert format_cycle(CycleBlowup.zero(1), s) == "0"
    assert format_cycle(evaluate("box(N*H,1) - 1/2*D", s), s) == "N*box(H,1) - 1/2*exc(1)"
    assert format_cycle(evaluate("(N^2 - 1)*diag(H)", s), s) == "(N^2 - 1)*diag(H)"
    assert format_cycle(evaluate("(1 - N^2)*diag(H)", s), s) == "- (N^2 - 1)*diag(H)"
    assert format_cycle(evaluate("D^4", s), s) == "24*box(pt,pt)"


@pytest.mark.parametrize(
    "text, column",
    [("box(H,", 6), ("D^^2", 3), ("2 $ D", 3), ("box(H,1) box(1,H)", 10), ("diag(1,2)", 7), ("H", 1), ("1/0*D", 3)],
)
def test_error_columns(text, column):
    with pytest.raises(ParseError) as err:
        parse(text)
    assert err.value.column == column


@given(st.text(alphabet="DNHbox(),+-*^/ 0123456789pt$", max_size=20))
def test_error_columns_stay_inside_input(text):
    try:
        parse(text)
    except ParseError as err:
        assert 1 <= err.column <= max(len(text), 1)


def test_eval_errors():
    s = SURFACES["k3"]
    with pytest.raises(EvalError, match="unknown divisor"):
        evaluate("box(Q,1)", s)
    with pytest.raises(EvalError):
        evaluate("(1+D)^1000", s)
    assert evaluate("D^1000000", s).is_zero()
    with pytest.raises(ParseError):
        parse("D^10^10")


@given(surface_with(1))
def test_round_trip(data):
    s, text = data
    value = evaluate(text, s)
    printed = format_cycle(value, s)
    assert evaluate(printed, s) == value
    assert format_cycle(evaluate(printed, s), s) == printed


@given(surface_with(2))
def test_evaluation_is_homomorphic(data):
    s, a, b = data
    u, v = evaluate(a, s), evaluate(b, s)
    assert evaluate(f"({a})*({b})", s) == mul_blowup(u, v, s)
    assert evaluate(f"({a}) + ({b})", s) == u + v
    assert evaluate(f"({a}) - ({b})", s) == u - v


def test_parse_divisor():
    e = SURFACES["elliptic"]
    assert parse_divisor("H", e) == (1, 4)
    assert parse_divisor("2*H - F", e) == (2, 7)
    assert parse_divisor("[1, -1/2]", e) == (1, Fraction(-1, 2))
    with pytest.raises(EvalError):
        parse_divisor("[1]", e)
    with pytest.raises(EvalError):
        parse_divisor("H^2", e)
    with pytest.raises(EvalError):
        parse_divisor("N*H", e)
