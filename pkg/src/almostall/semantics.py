"""Deciding sentences, quantifier-free equivalents, evaluation and oracles.

``decide`` and ``qf_equivalent`` run the eliminator. The two oracles share
no code with it beyond parsing and term arithmetic:

* ``oracle_decide_inner`` evaluates a single-variable ``Q x. body`` at an
  explicit point past every root of every atom (a Cauchy bound), which is
  sound by definition of ``Q``;
* ``oracle_decide_window`` evaluates arbitrarily nested sentences over the
  naturals by probing finite windows of large values. It is a heuristic and
  flags results it could not confirm with ``stable=False``.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Mapping

from . import syntax
from .poly import (
    Const,
    Kind,
    MissingVariableError,
    QAnd,
    QFFormula,
    QNot,
    QOr,
    SignAtom,
    cauchy_bound,
    eval_poly,
    term_to_poly,
)
from .qelim import EliminationTrace, eliminate_all, simplify
from .syntax import FormulaError, Formula, Term
from .zt import ZtElement

DEFAULT_WINDOW_BASE = 32
DEFAULT_WINDOW = 8
DEFAULT_WINDOW_LEVELS = 6


class NotClosedError(FormulaError):
    def __init__(self, names):
        self.names = sorted(names)
        super().__init__(f"sentence has free variables: {', '.join(self.names)}")


class ShapeError(FormulaError):
    pass


@dataclass
class Verdict:
    value: bool
    method: str  # eliminator | cauchy_oracle | window_oracle | zt_sampler
    stable: bool = True
    trace: EliminationTrace | None = None

    def to_dict(self) -> dict:
        out = {"verdict": self.value, "method": self.method, "stable": self.stable}
        if self.trace is not None:
            out["trace"] = self.trace.to_list()
        return out


def _require_closed(f: Formula) -> None:
    names = syntax.free_vars(f)
    if names:
        raise NotClosedError(names)


# ------------------------------------------------------------- evaluation


def eval_qf(f: QFFormula, env: Mapping[str, int]) -> bool:
    """Truth of a quantifier-free formula under an integer assignment."""
    if isinstance(f, SignAtom):
        v = eval_poly(f.poly, env)
        return v > 0 if f.kind is Kind.POSITIVE else v == 0
    if isinstance(f, Const):
        return f.value
    if isinstance(f, QNot):
        return not eval_qf(f.arg, env)
    if isinstance(f, QAnd):
        return all(eval_qf(g, env) for g in f.args)
    if isinstance(f, QOr):
        return any(eval_qf(g, env) for g in f.args)
    raise TypeError(f"not a quantifier-free formula: {f!r}")


def eval_term(t: Term, env: Mapping[str, int]) -> int:
    if isinstance(t, syntax.Var):
        try:
            return env[t.name]
        except KeyError:
            raise MissingVariableError(t.name) from None
    if isinstance(t, syntax.Num):
        return t.value
    if isinstance(t, syntax.Add):
        return eval_term(t.left, env) + eval_term(t.right, env)
    if isinstance(t, syntax.Sub):
        return eval_term(t.left, env) - eval_term(t.right, env)
    if isinstance(t, syntax.Mul):
        return eval_term(t.left, env) * eval_term(t.right, env)
    if isinstance(t, syntax.Pow):
        return eval_term(t.base, env) ** t.exponent
    raise TypeError(f"not a term: {t!r}")


_COMPARE = {
    "<": lambda a, b: a < b,
    "<=": lambda a, b: a <= b,
    ">": lambda a, b: a > b,
    ">=": lambda a, b: a >= b,
    "=": lambda a, b: a == b,
    "!=": lambda a, b: a != b,
}


def eval_formula(f: Formula, env: Mapping[str, int]) -> bool:
    """Direct evaluation of a binder-free surface formula, without normalization."""
    if isinstance(f, syntax.Atom):
        return _COMPARE[f.rel](eval_term(f.lhs, env), eval_term(f.rhs, env))
    if isinstance(f, syntax.Not):
        return not eval_formula(f.arg, env)
    if isinstance(f, syntax.And):
        return eval_formula(f.left, env) and eval_formula(f.right, env)
    if isinstance(f, syntax.Or):
        return eval_formula(f.left, env) or eval_formula(f.right, env)
    if isinstance(f, syntax.Implies):
        return (not eval_formula(f.left, env)) or eval_formula(f.right, env)
    if isinstance(f, syntax.Q):
        raise ShapeError("eval_formula cannot evaluate a Q binder")
    raise TypeError(f"not a formula: {f!r}")


# -------------------------------------------------------------- deciding


def decide(f: Formula, node_limit: int | None = None) -> Verdict:
    """Truth value of a closed sentence, by elimination and ground evaluation."""
    _require_closed(f)
    trace = EliminationTrace()
    qf = eliminate_all(f, node_limit=node_limit, trace=trace)
    return Verdict(eval_qf(qf, {}), "eliminator", True, trace)


def qf_equivalent(f: Formula, node_limit: int | None = None,
                  trace: EliminationTrace | None = None) -> QFFormula:
    """Simplified quantifier-free formula agreeing with ``f`` at every point."""
    return simplify(eliminate_all(f, node_limit=node_limit, trace=trace))


# ---------------------------------------------------------------- oracles


def _atom_poly(a: syntax.Atom):
    return term_to_poly(a.lhs) - term_to_poly(a.rhs)


def _q_blocks(f: Formula):
    """Outermost Q subformulas of ``f``."""
    if isinstance(f, syntax.Q):
        yield f
    elif isinstance(f, syntax.Not):
        yield from _q_blocks(f.arg)
    elif not isinstance(f, syntax.Atom):
        yield from _q_blocks(f.left)
        yield from _q_blocks(f.right)


def oracle_decide_inner(f: Formula) -> Verdict:
    """Decide a Boolean combination of ``Q x. body`` blocks over one variable.

    Each block is evaluated at ``x = B`` where ``B`` is the largest Cauchy
    bound among its atoms; past ``B`` no atom changes sign.
    """
    _require_closed(f)
    blocks = list(_q_blocks(f))
    if len({g.var for g in blocks}) > 1:
        raise ShapeError("the Cauchy oracle handles a single quantified variable")
    for g in blocks:
        if syntax.quantifier_count(g.body):
            raise ShapeError("the Cauchy oracle does not handle nested Q")
        if syntax.free_vars(g.body) - {g.var}:
            raise ShapeError("the body may mention only the quantified variable")

    def go(g: Formula) -> bool:
        if isinstance(g, syntax.Atom):
            return eval_formula(g, {})
        if isinstance(g, syntax.Not):
            return not go(g.arg)
        if isinstance(g, syntax.And):
            return go(g.left) and go(g.right)
        if isinstance(g, syntax.Or):
            return go(g.left) or go(g.right)
        if isinstance(g, syntax.Implies):
            return (not go(g.left)) or go(g.right)
        bound = 1
        for a in syntax.atoms(g.body):
            p = _atom_poly(a)
            if not p.is_zero():
                bound = max(bound, cauchy_bound(p))
        return eval_formula(g.body, {g.var: bound})

    return Verdict(go(f), "cauchy_oracle", True)


def _term_degree(t: Term) -> int:
    if isinstance(t, syntax.Var):
        return 1
    if isinstance(t, syntax.Num):
        return 0
    if isinstance(t, syntax.Pow):
        return _term_degree(t.base) * t.exponent
    if isinstance(t, syntax.Mul):
        return _term_degree(t.left) + _term_degree(t.right)
    return max(_term_degree(t.left), _term_degree(t.right))


def _formula_degree(f: Formula) -> int:
    return max((max(_term_degree(a.lhs), _term_degree(a.rhs)) for a in syntax.atoms(f)), default=0)


def oracle_decide_window(
    f: Formula,
    base: int = DEFAULT_WINDOW_BASE,
    window: int = DEFAULT_WINDOW,
    levels: int = DEFAULT_WINDOW_LEVELS,
) -> Verdict:
    """Heuristic evaluation of a closed sentence over the naturals.

    ``Q x. body`` is probed at ``window`` consecutive values starting from a
    base point; if the probes disagree the base doubles, up to ``levels``
    times. The base point starts at ``base * (1 + m)^d``, where ``m`` is the
    largest value currently bound to an outer variable and ``d`` bounds the
    degree of the body, so that inner windows clear the roots that outer
    values push upward. ``stable`` is False when some binder never saw an
    agreeing window; the value is then the one at the last probe.
    """
    if base <= 0 or window <= 0 or levels < 0:
        raise ValueError("base and window must be positive and levels non-negative")
    _require_closed(f)
    degrees: dict[int, int] = {}

    def go(g: Formula, env: dict[str, int]) -> tuple[bool, bool]:
        if isinstance(g, syntax.Atom):
            return eval_formula(g, env), True
        if isinstance(g, syntax.Not):
            v, s = go(g.arg, env)
            return not v, s
        if isinstance(g, syntax.Q):
            d = degrees.get(id(g))
            if d is None:
                d = degrees[id(g)] = _formula_degree(g.body)
            start = base * (1 + max(env.values(), default=0)) ** d
            for _ in range(levels + 1):
                probes = [go(g.body, {**env, g.var: start + k}) for k in range(window)]
                values = {v for v, _ in probes}
                if len(values) == 1:
                    return probes[0][0], all(s for _, s in probes)
                start *= 2
            return probes[-1][0], False
        lv, ls = go(g.left, env)
        rv, rs = go(g.right, env)
        if isinstance(g, syntax.And):
            return lv and rv, ls and rs
        if isinstance(g, syntax.Or):
            return lv or rv, ls and rs
        return (not lv) or rv, ls and rs

    value, stable = go(f, {})
    return Verdict(value, "window_oracle", stable)


# ---------------------------------------------------------- the ring Z[t]


def zt_eval_poly(p, env: Mapping[str, ZtElement]) -> ZtElement:
    total = ZtElement()
    for m, c in p.terms.items():
        v = ZtElement.from_int(c)
        for name, e in m:
            try:
                v = v * env[name] ** e
            except KeyError:
                raise MissingVariableError(name) from None
        total = total + v
    return total


def zt_eval_qf(f: QFFormula, env: Mapping[str, ZtElement]) -> bool:
    """Truth of a quantifier-free formula with variables ranging over Z[t]."""
    if isinstance(f, SignAtom):
        s = zt_eval_poly(f.poly, env).sign()
        return s > 0 if f.kind is Kind.POSITIVE else s == 0
    if isinstance(f, Const):
        return f.value
    if isinstance(f, QNot):
        return not zt_eval_qf(f.arg, env)
    if isinstance(f, QAnd):
        return all(zt_eval_qf(g, env) for g in f.args)
    if isinstance(f, QOr):
        return any(zt_eval_qf(g, env) for g in f.args)
    raise TypeError(f"not a quantifier-free formula: {f!r}")


def zt_elements(coeff_bound: int = 5, max_degree: int = 2) -> list[ZtElement]:
    """Every element of degree at most ``max_degree`` with ``|coefficients| <= coeff_bound``, ascending."""
    span = range(-coeff_bound, coeff_bound + 1)
    elems = {ZtElement(cs) for cs in product(span, repeat=max_degree + 1)}
    return sorted(elems)
