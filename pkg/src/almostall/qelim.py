"""Elimination of the almost-all quantifier.

Every sign atom is eventually constant as its variable grows, so
``Q x. body`` is equivalent to ``body`` with each atom replaced by the
condition on the other variables under which the atom holds at +oo. For
``p > 0`` that is the leading-coefficient cascade over the coefficients of
``p`` in ``x``; for ``p = 0`` it is the vanishing of every coefficient.
"""
from __future__ import annotations

import os
from dataclasses import asdict, dataclass, field

from . import syntax
from .poly import (
    FALSE,
    TRUE,
    Const,
    Kind,
    QAnd,
    QFFormula,
    QNot,
    QOr,
    SignAtom,
    _core_to_qf,
    coeffs_in,
    positive_atom,
    qf_node_count,
    sign_atoms,
    zero_atom,
)
from .syntax import SizeLimitError

DEFAULT_NODE_LIMIT = 1_000_000
NODE_LIMIT_ENV = "ALMOSTALL_NODE_LIMIT"


def default_node_limit() -> int:
    raw = os.environ.get(NODE_LIMIT_ENV)
    if raw:
        try:
            value = int(raw)
        except ValueError:
            raise ValueError(f"{NODE_LIMIT_ENV} must be a positive integer, got {raw!r}") from None
        if value <= 0:
            raise ValueError(f"{NODE_LIMIT_ENV} must be a positive integer, got {raw!r}")
        return value
    return DEFAULT_NODE_LIMIT


def atom_at_infinity(a: SignAtom, x: str) -> QFFormula:
    """Condition on the other variables for ``a`` to hold at every large enough ``x``.

    Constant coefficients are left in place; :func:`simplify` folds them.
    """
    cs = coeffs_in(a.poly, x)  # c_d, ..., c_0
    if len(cs) == 1:
        return a
    if a.kind is Kind.ZERO:
        return QAnd(tuple(zero_atom(c) for c in reversed(cs)))
    branches = []
    for i, c in enumerate(cs):
        branches.append(QAnd(tuple(zero_atom(h) for h in cs[:i]) + (positive_atom(c),)))
    return QOr(tuple(branches))


@dataclass
class TraceStep:
    variable: str
    degree: int
    atoms_before: int
    atoms_substituted: int
    atoms_after: int
    nodes_before: int
    nodes_after: int
    branches: int
    within_bound: bool


@dataclass
class EliminationTrace:
    """One step per eliminated binder, innermost first."""

    steps: list[TraceStep] = field(default_factory=list)

    def within_bounds(self) -> bool:
        return all(s.within_bound for s in self.steps)

    def to_list(self) -> list[dict]:
        return [asdict(s) for s in self.steps]


def cost_bound(atoms_before: int, degree: int) -> tuple[int, int]:
    """Upper bounds ``(branches, atoms)`` for substituting ``atoms_before`` atoms.

    An atom of degree ``d`` in the eliminated variable yields at most ``d + 1``
    cascade branches (so fewer than ``d + 2``), the ``i``-th holding ``i + 1``
    atoms, for ``(d + 1)(d + 2) / 2`` atoms in all.
    """
    d = max(degree, 0)
    return atoms_before * (d + 2), atoms_before * (d + 1) * (d + 2) // 2


def eliminate_q(x: str, body: QFFormula) -> QFFormula:
    """Replace every atom of ``body`` by :func:`atom_at_infinity` (no simplification)."""
    return _substitute(x, body)[0]


def _substitute(x: str, body: QFFormula) -> tuple[QFFormula, dict]:
    memo: dict[SignAtom, QFFormula] = {}
    stats = {"branches": 0, "atoms": 0, "degree": 0}

    def sub(g: QFFormula) -> QFFormula:
        if isinstance(g, SignAtom):
            r = memo.get(g)
            if r is None:
                r = memo[g] = atom_at_infinity(g, x)
            d = g.poly.degree(x)
            stats["degree"] = max(stats["degree"], d)
            if isinstance(r, SignAtom):
                stats["atoms"] += 1
            elif g.kind is Kind.ZERO:
                stats["branches"] += 1
                stats["atoms"] += len(r.args)
            else:
                stats["branches"] += len(r.args)
                stats["atoms"] += sum(len(b.args) for b in r.args)
            return r
        if isinstance(g, QNot):
            return QNot(sub(g.arg))
        if isinstance(g, QAnd):
            return QAnd(tuple(sub(h) for h in g.args))
        if isinstance(g, QOr):
            return QOr(tuple(sub(h) for h in g.args))
        return g

    return sub(body), stats


def eliminate_all(
    f: syntax.Formula,
    node_limit: int | None = None,
    trace: EliminationTrace | None = None,
) -> QFFormula:
    """Quantifier-free equivalent of ``f``, eliminating innermost binders first.

    The result is simplified after each elimination step; a formula without
    binders comes back merely normalized. Steps are appended to ``trace``.
    Raises SizeLimitError when an intermediate result exceeds ``node_limit``.
    """
    if node_limit is None:
        node_limit = default_node_limit()
    if trace is None:
        trace = EliminationTrace()
    core = syntax.desugar(f)
    return _elim(core, node_limit, trace)


def _elim(f: syntax.Formula, limit: int, trace: EliminationTrace) -> QFFormula:
    if isinstance(f, syntax.Atom):
        return _core_to_qf(f)
    if isinstance(f, syntax.Not):
        return QNot(_elim(f.arg, limit, trace))
    if isinstance(f, syntax.And):
        return QAnd((_elim(f.left, limit, trace), _elim(f.right, limit, trace)))
    if isinstance(f, syntax.Or):
        return QOr((_elim(f.left, limit, trace), _elim(f.right, limit, trace)))
    if isinstance(f, syntax.Q):
        body = _elim(f.body, limit, trace)
        atoms_before = sum(1 for _ in sign_atoms(body))
        nodes_before = qf_node_count(body)
        raw, stats = _substitute(f.var, body)
        _check_size(raw, limit, trace, f.var)
        out = simplify(raw)
        branch_cap, atom_cap = cost_bound(atoms_before, stats["degree"])
        trace.steps.append(TraceStep(
            variable=f.var,
            degree=stats["degree"],
            atoms_before=atoms_before,
            atoms_substituted=stats["atoms"],
            atoms_after=sum(1 for _ in sign_atoms(out)),
            nodes_before=nodes_before,
            nodes_after=qf_node_count(out),
            branches=stats["branches"],
            within_bound=stats["branches"] <= branch_cap and stats["atoms"] <= atom_cap,
        ))
        return out
    raise TypeError(f"not a core formula: {f!r}")


def _check_size(g: QFFormula, limit: int, trace: EliminationTrace, var: str) -> None:
    n = qf_node_count(g)
    if n > limit:
        raise SizeLimitError(
            f"eliminating {var!r} produced {n} nodes, over the limit of {limit}", trace)


# ------------------------------------------------------------ simplification


def _constant_atom_value(a: SignAtom) -> bool | None:
    if not a.poly.is_constant():
        return None
    c = a.poly.constant_value()
    return c > 0 if a.kind is Kind.POSITIVE else c == 0


def _contradicts(a: SignAtom, b: SignAtom) -> bool:
    # p = 0 against p > 0 or -p > 0, and p > 0 against -p > 0
    if a.kind is Kind.ZERO and b.kind is Kind.POSITIVE:
        return a.poly == b.poly or a.poly == -b.poly
    if a.kind is Kind.POSITIVE and b.kind is Kind.ZERO:
        return _contradicts(b, a)
    if a.kind is b.kind is Kind.POSITIVE:
        return a.poly == -b.poly
    return False


def simplify(f: QFFormula) -> QFFormula:
    """Cheap truth-preserving cleanup.

    Folds ground atoms, absorbs constants, flattens nested conjunctions and
    disjunctions, removes duplicate operands and double negations, and spots
    a few directly contradictory atom pairs. Not a normal form.
    """
    memo: dict[QFFormula, QFFormula] = {}

    def go(g: QFFormula) -> QFFormula:
        hit = memo.get(g)
        if hit is not None:
            return hit
        r = _simplify_node(g, go)
        memo[g] = r
        return r

    return go(f)


def _simplify_node(g: QFFormula, go) -> QFFormula:
    if isinstance(g, SignAtom):
        v = _constant_atom_value(g)
        return g if v is None else (TRUE if v else FALSE)
    if isinstance(g, Const):
        return g
    if isinstance(g, QNot):
        a = go(g.arg)
        if isinstance(a, Const):
            return FALSE if a.value else TRUE
        if isinstance(a, QNot):
            return a.arg
        return QNot(a)
    is_and = isinstance(g, QAnd)
    unit, zero = (TRUE, FALSE) if is_and else (FALSE, TRUE)
    cls = QAnd if is_and else QOr
    seen: dict[QFFormula, None] = {}
    for h in g.args:
        h = go(h)
        parts = h.args if isinstance(h, cls) else (h,)
        for p in parts:
            if p == zero:
                return zero
            if p != unit:
                seen[p] = None
    args = list(seen)
    negated = {a.arg for a in args if isinstance(a, QNot)}
    if any(a in negated for a in args):
        return zero
    if is_and:
        atoms_ = [a for a in args if isinstance(a, SignAtom)]
        for i, a in enumerate(atoms_):
            for b in atoms_[i + 1:]:
                if _contradicts(a, b):
                    return FALSE
    if not args:
        return unit
    if len(args) == 1:
        return args[0]
    return cls(tuple(args))
