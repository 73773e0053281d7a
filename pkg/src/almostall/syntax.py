"""Surface syntax for formulas built from ordered-ring atoms, Boolean
connectives and the almost-all quantifier ``Q``.

Grammar (ASCII)::

    formula := 'Q' IDENT '.' formula | disj ('->' formula)?
    disj    := conj ('||' conj)*
    conj    := neg ('&&' neg)*
    neg     := '!' neg | '(' formula ')' | atom
    atom    := term REL term
    term    := factor (('+'|'-') factor)*
    factor  := power ('*' power)*
    power   := base ('^' NUMERAL)?
    base    := IDENT | NUMERAL | '(' term ')'
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, Union

DEFAULT_PARSE_NODE_LIMIT = 100_000

RELATIONS = ("<", "<=", ">", ">=", "=", "!=")


# ---------------------------------------------------------------- errors


@dataclass(frozen=True)
class SourceSpan:
    """Byte offsets ``[start, end)`` into the parsed text."""

    start: int
    end: int


class FormulaError(Exception):
    """Base class for all input errors raised by this package."""


class ParseError(FormulaError):
    def __init__(self, message: str, span: SourceSpan):
        super().__init__(message)
        self.message = message
        self.span = span

    def __str__(self) -> str:
        return f"{self.message} (at bytes {self.span.start}..{self.span.end})"

    def render(self, text: str) -> str:
        """Message plus the offending line with a caret marker underneath."""
        raw = text.encode()
        start = min(self.span.start, len(raw))
        end = max(min(self.span.end, len(raw)), start)
        line_start = raw.rfind(b"\n", 0, start) + 1
        line_end = raw.find(b"\n", start)
        if line_end < 0:
            line_end = len(raw)
        line = raw[line_start:line_end].decode(errors="replace")
        pad = len(raw[line_start:start].decode(errors="replace"))
        width = max(1, len(raw[start:min(end, line_end)].decode(errors="replace")))
        return f"{self}\n  {line}\n  {' ' * pad}{'^' * width}"


class DuplicateBindingError(ParseError):
    pass


class ExponentError(ParseError):
    pass


class SizeLimitError(FormulaError):
    def __init__(self, message: str, trace=None):
        super().__init__(message)
        self.trace = trace


# ------------------------------------------------------------------ terms


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Num:
    value: int

    def __post_init__(self):
        if self.value < 0:
            raise ValueError("numerals are non-negative")


@dataclass(frozen=True)
class Add:
    left: Term
    right: Term


@dataclass(frozen=True)
class Sub:
    left: Term
    right: Term


@dataclass(frozen=True)
class Mul:
    left: Term
    right: Term


@dataclass(frozen=True)
class Pow:
    base: Term
    exponent: int

    def __post_init__(self):
        if not isinstance(self.exponent, int) or self.exponent < 0:
            raise ValueError("exponents are non-negative integer literals")


Term = Union[Var, Num, Add, Sub, Mul, Pow]


# --------------------------------------------------------------- formulas


@dataclass(frozen=True)
class Atom:
    lhs: Term
    rel: str
    rhs: Term

    def __post_init__(self):
        if self.rel not in RELATIONS:
            raise ValueError(f"unknown relation {self.rel!r}")


@dataclass(frozen=True)
class Not:
    arg: Formula


@dataclass(frozen=True)
class And:
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or:
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Implies:
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Q:
    """``Q var. body``: body holds for all sufficiently large values of var."""

    var: str
    body: Formula


Formula = Union[Atom, Not, And, Or, Implies, Q]

_BINARY_TERMS = {Add: "+", Sub: "-", Mul: "*"}
_BINARY_FORMULAS = {And: "&&", Or: "||", Implies: "->"}


# ---------------------------------------------------------------- helpers


def free_vars(f: Formula | Term) -> frozenset[str]:
    """Variables occurring outside the scope of any ``Q`` binding them."""
    if isinstance(f, Var):
        return frozenset((f.name,))
    if isinstance(f, Num):
        return frozenset()
    if isinstance(f, Pow):
        return free_vars(f.base)
    if isinstance(f, (Add, Sub, Mul, And, Or, Implies)):
        return free_vars(f.left) | free_vars(f.right)
    if isinstance(f, Atom):
        return free_vars(f.lhs) | free_vars(f.rhs)
    if isinstance(f, Not):
        return free_vars(f.arg)
    if isinstance(f, Q):
        return free_vars(f.body) - {f.var}
    raise TypeError(f"not a formula or term: {f!r}")


def node_count(f: Formula | Term) -> int:
    if isinstance(f, (Var, Num)):
        return 1
    if isinstance(f, Pow):
        return 1 + node_count(f.base)
    if isinstance(f, (Add, Sub, Mul, And, Or, Implies)):
        return 1 + node_count(f.left) + node_count(f.right)
    if isinstance(f, Atom):
        return 1 + node_count(f.lhs) + node_count(f.rhs)
    if isinstance(f, Not):
        return 1 + node_count(f.arg)
    if isinstance(f, Q):
        return 1 + node_count(f.body)
    raise TypeError(f"not a formula or term: {f!r}")


def quantifier_count(f: Formula) -> int:
    if isinstance(f, Atom):
        return 0
    if isinstance(f, Not):
        return quantifier_count(f.arg)
    if isinstance(f, Q):
        return 1 + quantifier_count(f.body)
    return quantifier_count(f.left) + quantifier_count(f.right)


def atoms(f: Formula) -> Iterator[Atom]:
    if isinstance(f, Atom):
        yield f
    elif isinstance(f, Not):
        yield from atoms(f.arg)
    elif isinstance(f, Q):
        yield from atoms(f.body)
    else:
        yield from atoms(f.left)
        yield from atoms(f.right)


def desugar(f: Formula) -> Formula:
    """Rewrite into atoms over ``<``/``=`` and the connectives ``!``, ``&&``, ``||``.

    Terms are left alone; numerals, minus and powers are absorbed later by
    polynomial normalization.
    """
    if isinstance(f, Atom):
        a, rel, b = f.lhs, f.rel, f.rhs
        if rel in ("<", "="):
            return f
        if rel == ">":
            return Atom(b, "<", a)
        if rel == "<=":
            return Not(Atom(b, "<", a))
        if rel == ">=":
            return Not(Atom(a, "<", b))
        return Not(Atom(a, "=", b))
    if isinstance(f, Not):
        return Not(desugar(f.arg))
    if isinstance(f, And):
        return And(desugar(f.left), desugar(f.right))
    if isinstance(f, Or):
        return Or(desugar(f.left), desugar(f.right))
    if isinstance(f, Implies):
        return Or(Not(desugar(f.left)), desugar(f.right))
    if isinstance(f, Q):
        return Q(f.var, desugar(f.body))
    raise TypeError(f"not a formula: {f!r}")


# ---------------------------------------------------------------- lexing

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>[0-9]+)
  | (?P<ident>[a-z][A-Za-z0-9_]*)
  | (?P<word>[A-Z][A-Za-z0-9_]*)
  | (?P<op>->|&&|\|\||<=|>=|!=|[<>=!().+\-*^])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str  # "num", "ident", "Q", an operator string, or "eof"
    text: str
    start: int
    end: int


def _tokenize(text: str) -> list[Token]:
    # spans are reported in bytes; only non-ASCII input needs the translation
    offsets = None
    if not text.isascii():
        offsets, acc = [], 0
        for ch in text:
            offsets.append(acc)
            acc += len(ch.encode())
        offsets.append(acc)

    def at(i: int) -> int:
        return i if offsets is None else offsets[i]

    tokens: list[Token] = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", SourceSpan(at(pos), at(pos + 1)))
        kind = m.lastgroup
        start, pos = m.start(), m.end()
        if kind == "ws":
            continue
        value = m.group()
        if kind == "word":
            if value != "Q":
                raise ParseError(f"unknown keyword {value!r}; only 'Q' is reserved",
                                 SourceSpan(at(start), at(pos)))
            kind = "Q"
        elif kind == "op":
            kind = value
        tokens.append(Token(kind, value, at(start), at(pos)))
    tokens.append(Token("eof", "", at(len(text)), at(len(text))))
    return tokens


# ---------------------------------------------------------------- parsing


class _Backtrack(Exception):
    pass


class _Parser:
    def __init__(self, text: str, node_limit: int):
        self.text = text
        self.tokens = _tokenize(text)
        self.pos = 0
        self.node_limit = node_limit
        self.nodes = 0
        self.bound: list[str] = []
        # furthest failure seen while trying the atom reading of '('
        self.speculating = 0

    # token helpers

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind: str, what: str | None = None) -> Token:
        tok = self.peek()
        if tok.kind != kind:
            self.fail(f"expected {what or repr(kind)}, found {self._describe(tok)}", tok)
        return self.advance()

    def fail(self, message: str, tok: Token, cls=ParseError):
        if self.speculating and cls is ParseError:
            raise _Backtrack(message, tok)
        raise cls(message, SourceSpan(tok.start, tok.end))

    @staticmethod
    def _describe(tok: Token) -> str:
        return "end of input" if tok.kind == "eof" else repr(tok.text)

    def node(self, value):
        self.nodes += 1
        if self.nodes > self.node_limit:
            raise SizeLimitError(f"formula exceeds the node limit of {self.node_limit}")
        return value

    # formulas

    def formula(self) -> Formula:
        tok = self.peek()
        if tok.kind == "Q":
            self.advance()
            name = self.expect("ident", "a variable after 'Q'")
            if name.text in self.bound:
                self.fail(f"variable {name.text!r} is already bound by an enclosing Q",
                          name, DuplicateBindingError)
            self.expect(".", "'.' after the bound variable")
            self.bound.append(name.text)
            try:
                body = self.formula()
            finally:
                self.bound.pop()
            return self.node(Q(name.text, body))
        left = self.disj()
        if self.peek().kind == "->":
            self.advance()
            return self.node(Implies(left, self.formula()))
        return left

    def disj(self) -> Formula:
        left = self.conj()
        while self.peek().kind == "||":
            self.advance()
            left = self.node(Or(left, self.conj()))
        return left

    def conj(self) -> Formula:
        left = self.neg()
        while self.peek().kind == "&&":
            self.advance()
            left = self.node(And(left, self.neg()))
        return left

    def neg(self) -> Formula:
        tok = self.peek()
        if tok.kind == "!":
            self.advance()
            return self.node(Not(self.neg()))
        if tok.kind == "(":
            # '(' opens either a parenthesized formula or the first term of an atom
            saved = (self.pos, self.nodes)
            self.speculating += 1
            try:
                return self.atom()
            except _Backtrack:
                self.pos, self.nodes = saved
            finally:
                self.speculating -= 1
            self.advance()
            inner = self.formula()
            self.expect(")", "')'")
            return inner
        return self.atom()

    def atom(self) -> Formula:
        lhs = self.term()
        tok = self.peek()
        if tok.kind not in RELATIONS:
            self.fail(f"expected a relation (<, <=, >, >=, =, !=), found {self._describe(tok)}", tok)
        self.advance()
        rhs = self.term()
        return self.node(Atom(lhs, tok.kind, rhs))

    # terms

    def term(self) -> Term:
        left = self.factor()
        while self.peek().kind in ("+", "-"):
            op = self.advance().kind
            right = self.factor()
            left = self.node(Add(left, right) if op == "+" else Sub(left, right))
        return left

    def factor(self) -> Term:
        left = self.power()
        while self.peek().kind == "*":
            self.advance()
            left = self.node(Mul(left, self.power()))
        return left

    def power(self) -> Term:
        base = self.base()
        if self.peek().kind == "^":
            self.advance()
            tok = self.peek()
            if tok.kind == "num":
                self.advance()
                return self.node(Pow(base, int(tok.text)))
            if tok.kind in ("ident", "("):
                self.fail("exponents must be integer literals", tok, ExponentError)
            self.fail(f"expected an integer exponent after '^', found {self._describe(tok)}", tok)
        return base

    def base(self) -> Term:
        tok = self.peek()
        if tok.kind == "ident":
            self.advance()
            return self.node(Var(tok.text))
        if tok.kind == "num":
            self.advance()
            return self.node(Num(int(tok.text)))
        if tok.kind == "(":
            self.advance()
            inner = self.term()
            self.expect(")", "')'")
            return inner
        self.fail(f"expected a variable, numeral or '(', found {self._describe(tok)}", tok)


def parse_formula(text: str, node_limit: int = DEFAULT_PARSE_NODE_LIMIT) -> Formula:
    """Parse ``text`` in the ASCII grammar above.

    Raises ParseError (with a SourceSpan), DuplicateBindingError when a ``Q``
    rebinds a variable already in scope, ExponentError for non-literal
    exponents, and SizeLimitError past ``node_limit`` nodes.
    """
    p = _Parser(text, node_limit)
    try:
        f = p.formula()
    except RecursionError:
        raise SizeLimitError("formula nests too deeply to parse") from None
    tok = p.peek()
    if tok.kind != "eof":
        raise ParseError(f"unexpected {p._describe(tok)} after a complete formula",
                         SourceSpan(tok.start, tok.end))
    return f


# --------------------------------------------------------------- printing

# binding strength of term operators; higher binds tighter
_TERM_PREC = {Add: 1, Sub: 1, Mul: 2, Pow: 3}


def _term_text(t: Term, out: list[str]) -> None:
    if isinstance(t, Var):
        out.append(t.name)
    elif isinstance(t, Num):
        out.append(str(t.value))
    elif isinstance(t, Pow):
        wrap = not isinstance(t.base, (Var, Num))
        out.append("(" if wrap else "")
        _term_text(t.base, out)
        out.append(f")^{t.exponent}" if wrap else f"^{t.exponent}")
    else:
        prec = _TERM_PREC[type(t)]
        # operators are left associative: the right operand needs strictly tighter binding
        lwrap = _TERM_PREC.get(type(t.left), 4) < prec
        rwrap = _TERM_PREC.get(type(t.right), 4) <= prec
        _wrapped(t.left, lwrap, out)
        out.append(f" {_BINARY_TERMS[type(t)]} ")
        _wrapped(t.right, rwrap, out)


def _wrapped(t: Term, wrap: bool, out: list[str]) -> None:
    if wrap:
        out.append("(")
        _term_text(t, out)
        out.append(")")
    else:
        _term_text(t, out)


# formula levels: 0 = formula (Q, ->), 1 = disj, 2 = conj, 3 = neg
_FORMULA_LEVEL = {Q: 0, Implies: 0, Or: 1, And: 2, Not: 3, Atom: 3}


def _formula_text(f: Formula, level: int, out: list[str]) -> None:
    if _FORMULA_LEVEL[type(f)] < level:
        out.append("(")
        _formula_text(f, 0, out)
        out.append(")")
        return
    if isinstance(f, Atom):
        _term_text(f.lhs, out)
        out.append(f" {f.rel} ")
        _term_text(f.rhs, out)
    elif isinstance(f, Not):
        out.append("!")
        _formula_text(f.arg, 3, out)
    elif isinstance(f, Q):
        out.append(f"Q {f.var}. ")
        _formula_text(f.body, 0, out)
    elif isinstance(f, Implies):
        _formula_text(f.left, 1, out)
        out.append(" -> ")
        _formula_text(f.right, 0, out)
    else:
        lvl = _FORMULA_LEVEL[type(f)]
        _formula_text(f.left, lvl, out)
        out.append(f" {_BINARY_FORMULAS[type(f)]} ")
        _formula_text(f.right, lvl + 1, out)


def _sexpr(f: Formula | Term, out: list[str]) -> None:
    if isinstance(f, Var):
        out.append(f.name)
    elif isinstance(f, Num):
        out.append(str(f.value))
    elif isinstance(f, Pow):
        out.append("(^ ")
        _sexpr(f.base, out)
        out.append(f" {f.exponent})")
    elif isinstance(f, Atom):
        out.append(f"({f.rel} ")
        _sexpr(f.lhs, out)
        out.append(" ")
        _sexpr(f.rhs, out)
        out.append(")")
    elif isinstance(f, Not):
        out.append("(! ")
        _sexpr(f.arg, out)
        out.append(")")
    elif isinstance(f, Q):
        out.append(f"(Q {f.var} ")
        _sexpr(f.body, out)
        out.append(")")
    else:
        head = _BINARY_TERMS.get(type(f)) or _BINARY_FORMULAS[type(f)]
        out.append(f"({head} ")
        _sexpr(f.left, out)
        out.append(" ")
        _sexpr(f.right, out)
        out.append(")")


def print_formula(f: Formula, format: str = "text") -> str:
    """Render ``f`` so that it parses back to an identical tree.

    ``format`` is ``"text"`` (the ASCII grammar, minimal parentheses) or
    ``"sexpr"`` (fully parenthesized prefix form, read by parse_sexpr).
    """
    out: list[str] = []
    if format == "text":
        _formula_text(f, 0, out)
    elif format == "sexpr":
        _sexpr(f, out)
    else:
        raise ValueError(f"unknown format {format!r}")
    return "".join(out)


def print_term(t: Term) -> str:
    out: list[str] = []
    _term_text(t, out)
    return "".join(out)


# ------------------------------------------------------- s-expression input

_SEXPR_RE = re.compile(r"\s+|\(|\)|[^\s()]+")
_SEXPR_TERMS = {"+": Add, "-": Sub, "*": Mul}
_SEXPR_FORMULAS = {"&&": And, "||": Or, "->": Implies}


def parse_sexpr(text: str) -> Formula:
    """Read the prefix form written by ``print_formula(f, "sexpr")``."""
    tokens = [(m.group(), m.start(), m.end()) for m in _SEXPR_RE.finditer(text)
              if not m.group().isspace()]
    pos = 0
    bound: list[str] = []

    def span(i: int) -> SourceSpan:
        if i < len(tokens):
            return SourceSpan(tokens[i][1], tokens[i][2])
        return SourceSpan(len(text), len(text))

    def take(expected: str | None = None) -> str:
        nonlocal pos
        if pos >= len(tokens):
            raise ParseError("unexpected end of input", span(pos))
        tok = tokens[pos][0]
        if expected is not None and tok != expected:
            raise ParseError(f"expected {expected!r}, found {tok!r}", span(pos))
        pos += 1
        return tok

    def term() -> Term:
        at = pos
        tok = take()
        if tok.isdigit():
            return Num(int(tok))
        if re.fullmatch(r"[a-z][A-Za-z0-9_]*", tok):
            return Var(tok)
        if tok != "(":
            raise ParseError(f"expected a term, found {tok!r}", span(at))
        head = take()
        if head in _SEXPR_TERMS:
            node = _SEXPR_TERMS[head](term(), term())
        elif head == "^":
            base = term()
            exp_at = pos
            exp = take()
            if not exp.isdigit():
                raise ExponentError("exponents must be integer literals", span(exp_at))
            node = Pow(base, int(exp))
        else:
            raise ParseError(f"unknown term operator {head!r}", span(at + 1))
        take(")")
        return node

    def formula() -> Formula:
        at = pos
        take("(")
        head = take()
        if head in RELATIONS:
            node = Atom(term(), head, term())
        elif head == "!":
            node = Not(formula())
        elif head in _SEXPR_FORMULAS:
            node = _SEXPR_FORMULAS[head](formula(), formula())
        elif head == "Q":
            var_at = pos
            var = take()
            if not re.fullmatch(r"[a-z][A-Za-z0-9_]*", var):
                raise ParseError(f"expected a variable, found {var!r}", span(var_at))
            if var in bound:
                raise DuplicateBindingError(
                    f"variable {var!r} is already bound by an enclosing Q", span(var_at))
            bound.append(var)
            node = Q(var, formula())
            bound.pop()
        else:
            raise ParseError(f"unknown formula operator {head!r}", span(at + 1))
        take(")")
        return node

    try:
        result = formula()
    except RecursionError:
        raise SizeLimitError("formula nests too deeply to parse") from None
    if pos != len(tokens):
        raise ParseError(f"unexpected {tokens[pos][0]!r} after a complete formula", span(pos))
    return result
