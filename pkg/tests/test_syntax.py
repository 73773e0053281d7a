import pytest
from hypothesis import given, settings

from almostall import syntax
from almostall.syntax import (
    Add, And, Atom, Implies, Mul, Not, Num, Or, Pow, Q, Sub, Var,
    DuplicateBindingError, ExponentError, ParseError, SizeLimitError,
    desugar, free_vars, parse_formula, parse_sexpr, print_formula,
)

from .strategies import formulas


def test_parse_single_binder():
    f = parse_formula("Q x. x*x >= x")
    assert f == Q("x", Atom(Mul(Var("x"), Var("x")), ">=", Var("x")))


def test_parse_nested_binders():
    f = parse_formula("Q y. Q x. x*y < x + y")
    assert f == Q("y", Q("x", Atom(Mul(Var("x"), Var("y")), "<", Add(Var("x"), Var("y")))))


def test_duplicate_binding_rejected():
    with pytest.raises(DuplicateBindingError) as exc:
        parse_formula("Q x. Q x. x > 0")
    assert exc.value.span == syntax.SourceSpan(7, 8)


def test_sibling_binders_may_reuse_a_name():
    f = parse_formula("(Q x. x > 0) && (Q x. x < 1)")
    assert isinstance(f, And)


def test_exponent_must_be_literal():
    with pytest.raises(ExponentError):
        parse_formula("Q x. x^y > 0")
    with pytest.raises(ExponentError):
        parse_formula("x^(1+1) > 0")


def test_precedence():
    f = parse_formula("1 + 2 * x^2 - 3 < 0")
    assert f.lhs == Sub(Add(Num(1), Mul(Num(2), Pow(Var("x"), 2))), Num(3))
    g = parse_formula("!a < b && c = d || e > f -> a = a -> b = b")
    assert isinstance(g, Implies) and isinstance(g.right, Implies)
    assert isinstance(g.left, Or) and isinstance(g.left.left, And)
    assert isinstance(g.left.left.left, Not)


def test_q_body_extends_right():
    f = parse_formula("Q x. x > 0 && x < 1 -> x = 2")
    assert isinstance(f, Q) and isinstance(f.body, Implies)


def test_parenthesized_term_versus_formula():
    assert parse_formula("(x + 1) * 2 < 3").lhs == Mul(Add(Var("x"), Num(1)), Num(2))
    assert parse_formula("((x)) < 3") == Atom(Var("x"), "<", Num(3))
    assert parse_formula("(x < 3)") == Atom(Var("x"), "<", Num(3))
    assert parse_formula("!((x + 1) < 2 || y = 0)") == Not(
        Or(Atom(Add(Var("x"), Num(1)), "<", Num(2)), Atom(Var("y"), "=", Num(0))))


@pytest.mark.parametrize("text", [
    "", "x", "x <", "x < y z", "Q x x > 0", "Q. x > 0", "x ** 2 < 1", "-x < 1",
    "x < 1 &&", "(x < 1", "x < 1)", "Qx. x > 0", "X < 1", "x @ 1", "x < 1 ->",
])
def test_errors_carry_spans_inside_the_input(text):
    with pytest.raises(ParseError) as exc:
        parse_formula(text)
    span = exc.value.span
    assert 0 <= span.start <= span.end <= len(text.encode())


def test_spans_are_byte_offsets():
    with pytest.raises(ParseError) as exc:
        parse_formula("x < é")
    assert exc.value.span == syntax.SourceSpan(4, 6)


def test_render_points_at_error():
    text = "x < 1 && y >"
    with pytest.raises(ParseError) as exc:
        parse_formula(text)
    assert exc.value.render(text).endswith("^")


def test_size_guard():
    text = " + ".join(["x"] * 60) + " > 0"
    with pytest.raises(SizeLimitError):
        parse_formula(text, node_limit=50)
    parse_formula(text, node_limit=200)


def test_deep_nesting_is_a_size_error_not_a_crash():
    text = "(" * 20000 + "x" + ")" * 20000 + " > 0"
    with pytest.raises(SizeLimitError):
        parse_formula(text)


def test_print_text_and_sexpr():
    assert print_formula(Q("x", Atom(Var("x"), ">", Num(0)))) == "Q x. x > 0"
    assert print_formula(Atom(Add(Num(1), Num(1)), "=", Num(2)), "sexpr") == "(= (+ 1 1) 2)"


def test_print_parenthesizes_where_needed():
    f = Atom(Sub(Var("x"), Sub(Var("y"), Var("z"))), "<", Pow(Pow(Var("x"), 2), 3))
    assert print_formula(f) == "x - (y - z) < (x^2)^3"
    g = And(Q("x", Atom(Var("x"), ">", Num(0))), Implies(Atom(Num(0), "=", Num(0)), Atom(Num(1), "=", Num(1))))
    assert print_formula(g) == "(Q x. x > 0) && (0 = 0 -> 1 = 1)"


@settings(max_examples=300)
@given(formulas())
def test_text_round_trip(f):
    assert parse_formula(print_formula(f)) == f


@settings(max_examples=300)
@given(formulas())
def test_sexpr_round_trip(f):
    assert parse_sexpr(print_formula(f, "sexpr")) == f


def test_sexpr_rejects_duplicate_binding():
    with pytest.raises(DuplicateBindingError):
        parse_sexpr("(Q x (Q x (< x 1)))")


def test_free_vars():
    assert free_vars(Atom(Var("x"), "<", Var("y"))) == {"x", "y"}
    assert free_vars(Q("x", Atom(Var("x"), "<", Var("y")))) == {"y"}
    assert free_vars(parse_formula("Q x. x >= 0")) == frozenset()


def test_desugar_cases():
    x, y = Var("x"), Var("y")
    assert desugar(Atom(x, ">=", y)) == Not(Atom(x, "<", y))
    assert desugar(Atom(x, "<=", y)) == Not(Atom(y, "<", x))
    assert desugar(Atom(x, ">", y)) == Atom(y, "<", x)
    assert desugar(Atom(x, "!=", y)) == Not(Atom(x, "=", y))
    a, b = Atom(x, "<", y), Atom(x, "=", y)
    assert desugar(Implies(a, b)) == Or(Not(a), b)
    assert desugar(a) is a


def _core_only(f):
    if isinstance(f, Atom):
        return f.rel in ("<", "=")
    if isinstance(f, Not):
        return _core_only(f.arg)
    if isinstance(f, Q):
        return _core_only(f.body)
    if isinstance(f, Implies):
        return False
    return _core_only(f.left) and _core_only(f.right)


@given(formulas())
def test_desugar_properties(f):
    g = desugar(f)
    assert _core_only(g)
    assert desugar(g) == g
    assert free_vars(g) == free_vars(f)
