import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings

from gen import raw_trees, trees
from growthgauge import expr as E
from growthgauge.calculus import evaluate
from growthgauge.errors import (ArityError, DomainError, ExprSyntaxError, InputError,
                                UnknownFunction)
from growthgauge.expr import Add, Const, Exp, Ln, Mul, Pow, Var, canonicalize
from growthgauge.syntax import format_expr, parse

X, Y = Var("x"), Var("y")


def _well_formed(e):
    try:
        return canonicalize(e)
    except DomainError:
        return None


# --- parser examples -------------------------------------------------------

def test_x_log_x_parses_to_product():
    assert parse("x*log(x)") == canonicalize(Mul((X, Ln(X))))


def test_additive_identity_elided():
    assert parse("0 + x") == X


def test_constant_base_power_lowered_to_exp():
    assert parse("2^x") == canonicalize(Exp(Mul((Ln(Const(Fraction(2))), X))))
    assert isinstance(parse("2^x"), Exp)


def test_sugar_lowering():
    assert parse("sqrt(x)") == Pow(X, Const(Fraction(1, 2)))
    ln2_inv = Pow(Ln(Const(Fraction(2))), Const(Fraction(-1)))
    assert parse("log2(x)") == canonicalize(Mul((Ln(X), ln2_inv)))
    assert parse("-x") == canonicalize(Mul((Const(Fraction(-1)), X)))
    assert parse("x/y") == canonicalize(Mul((X, Pow(Y, Const(Fraction(-1))))))
    assert parse("log(x)") == parse("ln(x)")


def test_numbers_are_exact():
    assert parse("3.25") == Const(Fraction(13, 4))
    assert parse(".5") == Const(Fraction(1, 2))
    assert parse("1/3") == Const(Fraction(1, 3))
    assert parse("8^(2/3)") == Const(Fraction(4))


def test_precedence_and_associativity():
    assert parse("2^3^2") == Const(Fraction(512))
    assert parse("-2^2") == Const(Fraction(-4))
    assert parse("1 - 2 - 3") == Const(Fraction(-4))
    assert parse("12/3/2") == Const(Fraction(2))
    assert parse("2*3+4") == Const(Fraction(10))


def test_power_identities_fold():
    assert parse("2^log2(x)") == X
    assert parse("exp(ln(x))") == X
    assert parse("ln(exp(x))") == X
    assert parse("exp(x)*exp(y)") == canonicalize(Exp(Add((X, Y))))


@pytest.mark.parametrize("text, offset, expected", [
    ("x +", 3, {"number", "identifier", "(", "-", "+"}),
    ("x + * y", 4, {"number", "identifier", "(", "-", "+"}),
    ("(x", 2, {")"}),
    ("x y", 2, None),
    ("x # 2", 2, None),
])
def test_syntax_errors_carry_offset_and_expected(text, offset, expected):
    with pytest.raises(ExprSyntaxError) as info:
        parse(text)
    assert info.value.offset == offset
    if expected is not None:
        assert expected <= set(info.value.expected)


def test_offset_is_in_bytes():
    # 'é' is two bytes in UTF-8
    with pytest.raises(ExprSyntaxError) as info:
        parse("é")
    assert info.value.offset == 0
    with pytest.raises(ExprSyntaxError) as info:
        parse("x+é")
    assert info.value.offset == 2


def test_unknown_function_and_arity():
    with pytest.raises(UnknownFunction):
        parse("sin(x)")
    with pytest.raises(ArityError):
        parse("exp(x, y)")
    with pytest.raises(ArityError):
        parse("ln()")
    assert issubclass(UnknownFunction, InputError)


def test_empty_input():
    with pytest.raises(ExprSyntaxError):
        parse("")
    with pytest.raises(ExprSyntaxError):
        parse("   ")


def test_constant_division_by_zero():
    with pytest.raises(DomainError):
        parse("1/0")
    with pytest.raises(DomainError):
        parse("1/(x - x)")


# --- printer ---------------------------------------------------------------

@pytest.mark.parametrize("text, printed", [
    ("x", "x"),
    ("x*log(x)", "x * ln(x)"),
    ("1/x", "1/x"),
    ("x - 1", "x - 1"),
    ("(1-x)^(-1)", "1/(1 - x)"),
    ("2^x", "2^x"),
    ("2^sqrt(x)", "2^(x^(1/2))"),
    ("0.5^x", "(1/2)^x"),
    ("2^log2(log2(x))", "ln(x)/ln(2)"),
])
def test_format_examples(text, printed):
    assert format_expr(parse(text)) == printed


def test_str_uses_printer():
    assert str(X * E.ln(X)) == "x * ln(x)"


# --- canonicalize ----------------------------------------------------------

def test_canonicalize_examples():
    assert canonicalize(Add((Const(Fraction(1)), Const(Fraction(2))))) == Const(Fraction(3))
    assert canonicalize(Mul((Const(Fraction(1)), X))) == X
    e = Add((X, Add((X, Const(Fraction(0))))))
    c = canonicalize(e)
    assert c == Mul((Const(Fraction(2)), X))
    for x in (1, 2, 3):
        assert evaluate(c, {"x": x}) == evaluate(e, {"x": x})


def test_add_mul_have_two_or_more_operands_and_sorted():
    for e in raw_trees(300, seed=11):
        c = _well_formed(e)
        if c is None:
            continue
        stack = [c]
        while stack:
            n = stack.pop()
            if isinstance(n, (Add, Mul)):
                assert len(n.args) >= 2
                assert list(n.args) == sorted(n.args)
                assert not any(type(a) is type(n) for a in n.args)
            if isinstance(n, Const):
                assert isinstance(n.value, Fraction)
            stack.extend(n.children())


def test_substitute_examples():
    assert E.substitute(X + Y, "y", E.const(2)) == canonicalize(Add((X, Const(Fraction(2)))))
    assert E.substitute(X, "x", E.const(5)) == Const(Fraction(5))
    t = Var("t")
    e = E.substitute(X * E.ln(X), "x", E.exp(t))
    assert evaluate(e, {"t": 0}) == 0


def test_json_round_trip():
    for e in raw_trees(200, seed=5):
        c = _well_formed(e)
        if c is not None:
            assert E.from_json(E.to_json(c)) == c
    assert E.to_json(parse("x/3")) == {
        "op": "mul", "args": [{"op": "const", "args": ["1/3"]}, {"op": "var", "args": ["x"]}]}


# --- 1000-tree fuzz and properties -----------------------------------------

def test_round_trip_fuzz_1000_trees():
    checked = 0
    for e in raw_trees(1000, seed=2024):
        c = _well_formed(e)
        if c is None:
            continue
        text = format_expr(c)
        assert parse(text) == c, text
        assert parse(format_expr(e)) == c
        checked += 1
    assert checked > 950


@settings(max_examples=150, deadline=None)
@given(trees())
def test_canonicalize_idempotent(e):
    c = _well_formed(e)
    if c is not None:
        assert canonicalize(c) == c


@settings(max_examples=150, deadline=None)
@given(trees())
def test_round_trip_property(e):
    c = _well_formed(e)
    if c is not None:
        assert parse(format_expr(c)) == c


@settings(max_examples=100, deadline=None)
@given(trees(max_depth=3))
def test_value_preservation(e):
    c = _well_formed(e)
    if c is None:
        return
    rng = random.Random(hash(c) & 0xFFFF)
    for _ in range(20):
        b = {"x": rng.uniform(1, 100), "y": rng.uniform(1, 100)}
        try:
            raw = evaluate(e, b)
        except DomainError:
            continue
        if not math.isfinite(raw):
            continue
        got = evaluate(c, b)
        # relative, with a floor for results that cancel to (near) zero
        assert abs(got - raw) <= 1e-12 * max(abs(raw), abs(got), 1.0)


def test_nodes_hashable_and_immutable():
    a, b = parse("x + 2*y"), parse("2*y + x")
    assert a == b and hash(a) == hash(b)
    assert len({a, b}) == 1
    with pytest.raises(AttributeError):
        a.extra = 1
