"""Exact multivariate integer polynomials and quantifier-free sign formulas.

A Polynomial maps monomials to nonzero Python ints. A monomial is a tuple of
``(variable, exponent)`` pairs sorted by variable name, with every exponent
at least 1; the empty tuple is the constant monomial.

Monomials are ordered graded-lexicographically, with alphabetically earlier
variables taking priority. That order fixes the printed term order and the
orientation of ``p = 0`` atoms.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Iterator, Mapping, Union

from . import syntax
from .syntax import Term

Monomial = tuple  # tuple[tuple[str, int], ...]


class MissingVariableError(KeyError):
    def __init__(self, name: str):
        super().__init__(name)
        self.name = name

    def __str__(self) -> str:
        return f"no value bound for variable {self.name!r}"


def _var_key(name: str) -> tuple[int, ...]:
    # reverses alphabetical order; the trailing 1 makes a prefix sort after its extensions
    return tuple(-ord(c) for c in name) + (1,)


def monomial_key(m: Monomial) -> tuple:
    """Sort key realizing graded lex order (larger key = larger monomial)."""
    return (sum(e for _, e in m), tuple((_var_key(v), e) for v, e in m))


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    exps = dict(a)
    for v, e in b:
        exps[v] = exps.get(v, 0) + e
    return tuple(sorted(exps.items()))


class Polynomial:
    """Immutable polynomial with integer coefficients in canonical form."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[Monomial, int] | Iterable[tuple[Monomial, int]] = ()):
        acc: dict[Monomial, int] = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        for mono, coeff in items:
            mono = tuple(sorted((v, e) for v, e in mono if e))
            acc[mono] = acc.get(mono, 0) + coeff
        self._terms = {m: c for m, c in acc.items() if c}
        self._hash = None

    @classmethod
    def _raw(cls, terms: dict[Monomial, int]) -> Polynomial:
        # trusted constructor: terms already canonical and zero-free
        p = object.__new__(cls)
        p._terms = terms
        p._hash = None
        return p

    @classmethod
    def const(cls, c: int) -> Polynomial:
        return cls._raw({(): c} if c else {})

    @classmethod
    def var(cls, name: str) -> Polynomial:
        return cls._raw({((name, 1),): 1})

    # -- inspection

    @property
    def terms(self) -> Mapping[Monomial, int]:
        return self._terms

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return not self._terms or (len(self._terms) == 1 and () in self._terms)

    def constant_value(self) -> int:
        """Value of a constant polynomial."""
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        return self._terms.get((), 0)

    def variables(self) -> frozenset[str]:
        return frozenset(v for m in self._terms for v, _ in m)

    def degree(self, x: str | None = None) -> int:
        """Total degree, or degree in ``x``; -1 for the zero polynomial."""
        if not self._terms:
            return -1
        if x is None:
            return max(sum(e for _, e in m) for m in self._terms)
        return max(dict(m).get(x, 0) for m in self._terms)

    def sorted_terms(self) -> list[tuple[Monomial, int]]:
        """Terms in decreasing monomial order."""
        return sorted(self._terms.items(), key=lambda mc: monomial_key(mc[0]), reverse=True)

    def leading_coefficient(self) -> int:
        if not self._terms:
            return 0
        return max(self._terms.items(), key=lambda mc: monomial_key(mc[0]))[1]

    # -- ring operations

    def __add__(self, other: Polynomial | int) -> Polynomial:
        if isinstance(other, int):
            other = Polynomial.const(other)
        acc = dict(self._terms)
        for m, c in other._terms.items():
            s = acc.get(m, 0) + c
            if s:
                acc[m] = s
            else:
                acc.pop(m, None)
        return Polynomial._raw(acc)

    __radd__ = __add__

    def __neg__(self) -> Polynomial:
        return Polynomial._raw({m: -c for m, c in self._terms.items()})

    def __sub__(self, other: Polynomial | int) -> Polynomial:
        if isinstance(other, int):
            other = Polynomial.const(other)
        return self + (-other)

    def __rsub__(self, other: int) -> Polynomial:
        return Polynomial.const(other) - self

    def __mul__(self, other: Polynomial | int) -> Polynomial:
        if isinstance(other, int):
            return Polynomial._raw({m: c * other for m, c in self._terms.items()} if other else {})
        acc: dict[Monomial, int] = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                m = _mono_mul(m1, m2)
                acc[m] = acc.get(m, 0) + c1 * c2
        return Polynomial._raw({m: c for m, c in acc.items() if c})

    __rmul__ = __mul__

    def __pow__(self, n: int) -> Polynomial:
        if n < 0:
            raise ValueError("negative exponent")
        result, base = Polynomial.const(1), self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    # -- equality and display

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            other = Polynomial.const(other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __repr__(self) -> str:
        return f"Polynomial({self})"

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for i, (m, c) in enumerate(self.sorted_terms()):
            body = _monomial_text(abs(c), m)
            if i == 0:
                parts.append(body if c > 0 else f"-{body}")
            else:
                parts.append(f" + {body}" if c > 0 else f" - {body}")
        return "".join(parts)


def _monomial_text(c: int, m: Monomial) -> str:
    factors = [v if e == 1 else f"{v}^{e}" for v, e in m]
    if c != 1 or not factors:
        factors.insert(0, str(c))
    return "*".join(factors)


def poly_add(a: Polynomial, b: Polynomial) -> Polynomial:
    return a + b


def poly_mul(a: Polynomial, b: Polynomial) -> Polynomial:
    return a * b


def poly_neg(a: Polynomial) -> Polynomial:
    return -a


def term_to_poly(t: Term) -> Polynomial:
    """The polynomial denoted by a surface term."""
    if isinstance(t, syntax.Var):
        return Polynomial.var(t.name)
    if isinstance(t, syntax.Num):
        return Polynomial.const(t.value)
    if isinstance(t, syntax.Add):
        return term_to_poly(t.left) + term_to_poly(t.right)
    if isinstance(t, syntax.Sub):
        return term_to_poly(t.left) - term_to_poly(t.right)
    if isinstance(t, syntax.Mul):
        return term_to_poly(t.left) * term_to_poly(t.right)
    if isinstance(t, syntax.Pow):
        return term_to_poly(t.base) ** t.exponent
    raise TypeError(f"not a term: {t!r}")


def coeffs_in(p: Polynomial, x: str) -> list[Polynomial]:
    """Coefficients ``[c_d, ..., c_0]`` of ``p`` viewed as a polynomial in ``x``.

    No coefficient mentions ``x``; for ``p`` free of ``x`` the result is ``[p]``.
    The zero polynomial gives ``[0]``.
    """
    d = max(p.degree(x), 0)
    buckets: list[dict[Monomial, int]] = [{} for _ in range(d + 1)]
    for m, c in p.terms.items():
        k = 0
        rest = m
        for i, (v, e) in enumerate(m):
            if v == x:
                k = e
                rest = m[:i] + m[i + 1:]
                break
        buckets[d - k][rest] = c
    return [Polynomial._raw(b) for b in buckets]


def eval_poly(p: Polynomial, env: Mapping[str, int]) -> int:
    """Exact value of ``p`` under an integer assignment."""
    total = 0
    for m, c in p.terms.items():
        v = c
        for name, e in m:
            try:
                v *= env[name] ** e
            except KeyError:
                raise MissingVariableError(name) from None
        total += v
    return total


def cauchy_bound(p: Polynomial) -> int:
    """``B = 1 + max_{i<d} ceil(|c_i| / |c_d|)`` for univariate ``p``.

    Every real root of ``p`` lies in ``(-B, B)``, so ``p`` has the sign of its
    leading coefficient on ``[B, oo)``. Constant nonzero ``p`` gives 1.
    """
    if p.is_zero():
        raise ValueError("the zero polynomial has no root bound")
    names = p.variables()
    if len(names) > 1:
        raise ValueError(f"cauchy_bound needs a univariate polynomial, got variables {sorted(names)}")
    by_degree = {sum(e for _, e in m): c for m, c in p.terms.items()}
    d = max(by_degree)
    lead = abs(by_degree[d])
    ratios = [-(-abs(c) // lead) for k, c in by_degree.items() if k < d]
    return 1 + max(ratios, default=0)


# ------------------------------------------------ quantifier-free formulas


class Kind(Enum):
    POSITIVE = ">"
    ZERO = "="


def canonical_zero(p: Polynomial) -> Polynomial:
    """Orientation of ``p`` used in ``p = 0`` atoms: positive leading coefficient."""
    return -p if p.leading_coefficient() < 0 else p


@dataclass(frozen=True)
class SignAtom:
    """``poly > 0`` or ``poly = 0``. Build zero atoms with :func:`zero_atom`."""

    poly: Polynomial
    kind: Kind

    def __str__(self) -> str:
        return f"{self.poly} {self.kind.value} 0"


@dataclass(frozen=True)
class Const:
    value: bool

    def __str__(self) -> str:
        return "true" if self.value else "false"


TRUE = Const(True)
FALSE = Const(False)


@dataclass(frozen=True)
class QNot:
    arg: QFFormula


@dataclass(frozen=True)
class QAnd:
    args: tuple


@dataclass(frozen=True)
class QOr:
    args: tuple


QFFormula = Union[Const, SignAtom, QNot, QAnd, QOr]


def positive_atom(p: Polynomial) -> SignAtom:
    return SignAtom(p, Kind.POSITIVE)


def zero_atom(p: Polynomial) -> SignAtom:
    return SignAtom(canonical_zero(p), Kind.ZERO)


def atom_to_sign_literal(lhs: Term, rel: str, rhs: Term) -> SignAtom:
    """Normalize a core atom (``<`` or ``=``) to a sign condition on a difference."""
    diff = term_to_poly(rhs) - term_to_poly(lhs)
    if rel == "<":
        return positive_atom(diff)
    if rel == "=":
        return zero_atom(diff)
    raise ValueError(f"atom_to_sign_literal expects '<' or '=', got {rel!r}")


def to_qf(f: syntax.Formula) -> QFFormula:
    """Normalize a quantifier-free surface formula."""
    f = syntax.desugar(f)
    return _core_to_qf(f)


def _core_to_qf(f: syntax.Formula) -> QFFormula:
    if isinstance(f, syntax.Atom):
        return atom_to_sign_literal(f.lhs, f.rel, f.rhs)
    if isinstance(f, syntax.Not):
        return QNot(_core_to_qf(f.arg))
    if isinstance(f, syntax.And):
        return QAnd((_core_to_qf(f.left), _core_to_qf(f.right)))
    if isinstance(f, syntax.Or):
        return QOr((_core_to_qf(f.left), _core_to_qf(f.right)))
    if isinstance(f, syntax.Q):
        raise ValueError("formula contains a Q binder")
    raise TypeError(f"not a core formula: {f!r}")


def sign_atoms(f: QFFormula) -> Iterator[SignAtom]:
    """Atom occurrences of ``f``, with multiplicity."""
    stack = [f]
    while stack:
        g = stack.pop()
        if isinstance(g, SignAtom):
            yield g
        elif isinstance(g, QNot):
            stack.append(g.arg)
        elif isinstance(g, (QAnd, QOr)):
            stack.extend(reversed(g.args))


def qf_node_count(f: QFFormula) -> int:
    count = 0
    stack = [f]
    while stack:
        g = stack.pop()
        count += 1
        if isinstance(g, QNot):
            stack.append(g.arg)
        elif isinstance(g, (QAnd, QOr)):
            stack.extend(g.args)
    return count


def qf_free_vars(f: QFFormula) -> frozenset[str]:
    names: set[str] = set()
    for a in sign_atoms(f):
        names |= a.poly.variables()
    return frozenset(names)


# -------------------------------------------------- back to surface syntax


def poly_to_term(p: Polynomial) -> Term:
    """Surface term for a polynomial whose coefficients are all positive."""
    terms = p.sorted_terms()
    if not terms:
        return syntax.Num(0)
    out = None
    for m, c in terms:
        if c < 0:
            raise ValueError("poly_to_term needs positive coefficients")
        factors: list[Term] = [syntax.Var(v) if e == 1 else syntax.Pow(syntax.Var(v), e) for v, e in m]
        if c != 1 or not factors:
            factors.insert(0, syntax.Num(c))
        mono = factors[0]
        for fac in factors[1:]:
            mono = syntax.Mul(mono, fac)
        out = mono if out is None else syntax.Add(out, mono)
    return out


def _split(p: Polynomial) -> tuple[Term, Term]:
    pos = Polynomial._raw({m: c for m, c in p.terms.items() if c > 0})
    neg = Polynomial._raw({m: -c for m, c in p.terms.items() if c < 0})
    return poly_to_term(pos), poly_to_term(neg)


def qf_to_formula(f: QFFormula) -> syntax.Formula:
    """Surface formula that normalizes back to ``f``.

    ``p > 0`` prints as ``P > N`` with ``p = P - N`` and both sides carrying
    positive coefficients; the constants print as ``0 = 0`` and ``1 = 0``.
    """
    if isinstance(f, Const):
        return syntax.Atom(syntax.Num(0 if f.value else 1), "=", syntax.Num(0))
    if isinstance(f, SignAtom):
        lhs, rhs = _split(f.poly)
        return syntax.Atom(lhs, f.kind.value, rhs)
    if isinstance(f, QNot):
        return syntax.Not(qf_to_formula(f.arg))
    if isinstance(f, (QAnd, QOr)):
        if not f.args:
            return qf_to_formula(TRUE if isinstance(f, QAnd) else FALSE)
        node = syntax.And if isinstance(f, QAnd) else syntax.Or
        out = qf_to_formula(f.args[0])
        for g in f.args[1:]:
            out = node(out, qf_to_formula(g))
        return out
    raise TypeError(f"not a quantifier-free formula: {f!r}")


def print_qf(f: QFFormula, format: str = "text") -> str:
    return syntax.print_formula(qf_to_formula(f), format)
