from __future__ import annotations

from hypothesis import strategies as st

from almostall import syntax
from almostall.poly import Polynomial

NAMES = ("x", "y", "z")

names = st.sampled_from(NAMES)


def terms(max_leaves: int = 8):
    leaves = st.one_of(names.map(syntax.Var), st.integers(0, 20).map(syntax.Num))

    def extend(inner):
        return st.one_of(
            st.builds(syntax.Add, inner, inner),
            st.builds(syntax.Sub, inner, inner),
            st.builds(syntax.Mul, inner, inner),
            st.builds(syntax.Pow, inner, st.integers(0, 3)),
        )

    return st.recursive(leaves, extend, max_leaves=max_leaves)


atoms = st.builds(syntax.Atom, terms(6), st.sampled_from(syntax.RELATIONS), terms(6))


@st.composite
def formulas(draw, depth: int = 4, bound: frozenset = frozenset(), allow_q: bool = True):
    """Well-formed formulas; Q never rebinds a variable already in scope."""
    options = ["atom"]
    if depth > 0:
        options += ["not", "and", "or", "implies"]
        if allow_q and len(bound) < len(NAMES):
            options.append("q")
    kind = draw(st.sampled_from(options))
    if kind == "atom":
        return draw(atoms)
    sub = lambda: formulas(depth - 1, bound, allow_q)  # noqa: E731
    if kind == "not":
        return syntax.Not(draw(sub()))
    if kind == "q":
        var = draw(st.sampled_from([n for n in NAMES if n not in bound]))
        return syntax.Q(var, draw(formulas(depth - 1, bound | {var}, allow_q)))
    node = {"and": syntax.And, "or": syntax.Or, "implies": syntax.Implies}[kind]
    return node(draw(sub()), draw(sub()))


monomials = st.dictionaries(names, st.integers(1, 3), max_size=3).map(lambda d: tuple(sorted(d.items())))

polynomials = st.dictionaries(monomials, st.integers(-20, 20), max_size=6).map(Polynomial)

envs = st.fixed_dictionaries({n: st.integers(-15, 15) for n in NAMES})
