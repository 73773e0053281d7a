import random

import pytest
from hypothesis import given, settings

from almostall.poly import FALSE, Polynomial, QOr, positive_atom, to_qf, zero_atom
from almostall.qelim import eliminate_q
from almostall.semantics import (
    NotClosedError, ShapeError, Verdict, decide, eval_formula, eval_qf,
    oracle_decide_inner, oracle_decide_window, qf_equivalent, zt_elements, zt_eval_qf,
)
from almostall.poly import MissingVariableError
from almostall.syntax import SizeLimitError, parse_formula
from almostall.zt import ZtElement

from .oracles import eventually_true
from .strategies import envs, formulas

x, y = Polynomial.var("x"), Polynomial.var("y")
t = ZtElement.t()


def test_decide_pinned():
    assert decide(parse_formula("Q x. x^2 > 5*x + 6")).value is True
    assert decide(parse_formula("Q y. Q x. x*y < x + y")).value is False
    assert decide(parse_formula("Q x. 2*x = x + x")).value is True


def test_verdict_provenance():
    v = decide(parse_formula("Q x. x > 3"))
    assert v.method == "eliminator" and v.stable and len(v.trace.steps) == 1


def test_decide_requires_closed_input():
    with pytest.raises(NotClosedError) as exc:
        decide(parse_formula("Q x. x < y + z"))
    assert exc.value.names == ["y", "z"]


def test_decide_propagates_size_limit():
    with pytest.raises(SizeLimitError):
        decide(parse_formula("Q y. Q x. y*x^3 + x^2*y^2 > x*y + 1"), node_limit=4)


def test_qf_equivalent_examples():
    g = qf_equivalent(parse_formula("Q x. y*x^2 + x > 0"))
    assert g == QOr((positive_atom(y), zero_atom(y)))
    assert qf_equivalent(parse_formula("Q x. x < y")) == FALSE
    assert not any(eval_qf(qf_equivalent(parse_formula("Q x. x < y")), {"y": v}) for v in range(-5, 30))
    f = parse_formula("x < y || y = 3")
    assert qf_equivalent(f) == to_qf(f)


def test_qf_equivalent_agrees_over_naturals():
    # brute-force reading of Q over a range of natural y, with thresholds from instantiated bounds
    f = parse_formula("Q x. y*x^2 + x > 0 && x*y < 3*x + y")
    g = qf_equivalent(f)
    body = to_qf(f.body)
    for v in range(0, 12):
        assert eval_qf(g, {"y": v}) == all(eventually_true(a, "x", {"y": v}) for a in body.args)


def test_eval_qf_examples():
    g = QOr((positive_atom(y), zero_atom(y)))
    assert eval_qf(g, {"y": 0}) is True
    assert eval_qf(positive_atom(x * x - 1), {"x": 1}) is False
    with pytest.raises(MissingVariableError):
        eval_qf(g, {})


@settings(max_examples=200)
@given(formulas(depth=3, allow_q=False), envs)
def test_eval_qf_matches_term_level_evaluation(f, env):
    assert eval_qf(to_qf(f), env) == eval_formula(f, env)


def test_cauchy_oracle_examples():
    assert oracle_decide_inner(parse_formula("Q x. x^2 > 5*x + 6")) == Verdict(True, "cauchy_oracle", True)
    assert oracle_decide_inner(parse_formula("Q x. x < 5")).value is False
    assert oracle_decide_inner(parse_formula("Q x. 0 = 0")).value is True
    assert oracle_decide_inner(parse_formula("(Q x. x > 2) && !(Q x. x < 9)")).value is True


@pytest.mark.parametrize("text", [
    "Q y. Q x. x < y",
    "(Q x. x > 0) || (Q y. y > 0)",
])
def test_cauchy_oracle_shape_errors(text):
    with pytest.raises(ShapeError):
        oracle_decide_inner(parse_formula(text))


def test_window_oracle_examples():
    assert oracle_decide_window(parse_formula("Q y. Q x. x*y < x + y"), 32, 8) == Verdict(False, "window_oracle", True)
    assert oracle_decide_window(parse_formula("Q x. x >= 0")).value is True


def test_window_oracle_doubling_schedule():
    f = parse_formula("Q x. x^2 > 5*x + 6")
    # windows [2, 9] and [4, 11] straddle the root 6; [8, 15] does not
    assert oracle_decide_window(f, base=2, window=8, levels=1) == Verdict(True, "window_oracle", False)
    assert oracle_decide_window(f, base=2, window=8, levels=2) == Verdict(True, "window_oracle", True)


def test_window_oracle_reports_instability_instead_of_raising():
    f = parse_formula("Q x. x > 1000")
    v = oracle_decide_window(f, base=990, window=20, levels=0)
    assert v.stable is False


def test_window_oracle_scales_inner_base():
    # the inner threshold grows like y^2; a fixed inner base would wrongly settle on false
    f = parse_formula("Q y. Q x. x > 7*y^2")
    assert oracle_decide_window(f) == Verdict(True, "window_oracle", True)


def test_zt_order():
    assert ZtElement.from_int(10**9) < t < t * t
    assert -t < ZtElement.from_int(-10**9)
    assert t - 3 > 0 and (t * t - t) > 0
    assert ZtElement((1, 2, 3)) * ZtElement((0, 1)) == ZtElement((0, 1, 2, 3))
    assert str(ZtElement((-3, 0, 2))) == "2*t^2 - 3" and str(ZtElement()) == "0"


def _zt(rng):
    return ZtElement([rng.randint(-6, 6) for _ in range(rng.randint(1, 3))])


def test_zt_ordered_ring_axioms():
    rng = random.Random(3)
    for _ in range(2000):
        a, b, c = _zt(rng), _zt(rng), _zt(rng)
        assert [a < b, a == b, b < a].count(True) == 1
        if a > 0 and b > 0:
            assert a + b > 0 and a * b > 0
        if a < b:
            assert a + c < b + c
        assert (a + b) * c == a * c + b * c


def test_zt_eval_examples():
    assert zt_eval_qf(positive_atom(x - 3), {"x": t}) is True
    assert zt_eval_qf(positive_atom(x * x - x), {"x": t}) is True
    assert zt_eval_qf(zero_atom(x - x), {"x": t}) is True
    with pytest.raises(MissingVariableError):
        zt_eval_qf(positive_atom(y), {"x": t})


@settings(max_examples=200)
@given(formulas(depth=3, allow_q=False), envs)
def test_integer_points_of_zt_agree_with_integers(f, env):
    g = to_qf(f)
    assert zt_eval_qf(g, {k: ZtElement.from_int(v) for k, v in env.items()}) == eval_qf(g, env)


@settings(max_examples=200)
@given(formulas(depth=3, allow_q=False), envs)
def test_positive_infinite_points_match_eventual_truth(f, env):
    # an infinite positive x sits past every real root, so atoms take their eventual values
    g = to_qf(f)
    zenv = {k: ZtElement.from_int(v) for k, v in env.items()}
    zenv["x"] = t
    assert zt_eval_qf(g, zenv) == eval_qf(eliminate_q("x", g), env)


def test_zt_elements_enumeration():
    elems = zt_elements(1, 1)
    assert len(elems) == 9
    assert elems == sorted(elems) and elems[0] == -t - 1 and elems[-1] == t + 1
