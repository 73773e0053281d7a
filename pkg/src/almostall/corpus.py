"""Random sentence corpora and the reports comparing eliminator and oracles."""
from __future__ import annotations

import random
import time
from dataclasses import dataclass, field

from . import syntax
from .poly import to_qf
from .semantics import (
    DEFAULT_WINDOW,
    DEFAULT_WINDOW_BASE,
    DEFAULT_WINDOW_LEVELS,
    ShapeError,
    decide,
    eval_qf,
    oracle_decide_inner,
    oracle_decide_window,
    zt_elements,
    zt_eval_qf,
)
from .syntax import Add, Atom, Formula, Mul, Num, Pow, Sub, Term, Var

VARIABLE_NAMES = ("x", "y", "z", "u", "v", "w")


@dataclass
class CorpusReport:
    seed: int | None
    instances: int
    agreements: int = 0
    disagreements: list[dict] = field(default_factory=list)
    unstable: list[dict] = field(default_factory=list)
    parameters: dict = field(default_factory=dict)
    wall_clock: dict | None = None

    @property
    def stable_disagreements(self) -> list[dict]:
        return [d for d in self.disagreements if d.get("stable", True)]

    @property
    def ok(self) -> bool:
        return not self.stable_disagreements

    def to_dict(self) -> dict:
        out = {
            "seed": self.seed,
            "instances": self.instances,
            "agreements": self.agreements,
            "disagreements": self.disagreements,
            "unstable": self.unstable,
            "parameters": self.parameters,
        }
        if self.wall_clock is not None:
            out["wall_clock"] = self.wall_clock
        return out


# ------------------------------------------------------------- generators


def _monomial(rng: random.Random, variables: list[str], degree: int, focus: str | None) -> Term | None:
    if not variables or degree == 0:
        return None
    d = rng.randint(0, degree)
    if d == 0:
        return None
    exps: dict[str, int] = {}
    for k in range(d):
        # lean toward the innermost variable so the bound variable really occurs
        name = focus if focus and (k == 0 or rng.random() < 0.5) else rng.choice(variables)
        exps[name] = exps.get(name, 0) + 1
    factors: list[Term] = [Var(v) if e == 1 else Pow(Var(v), e) for v, e in sorted(exps.items())]
    out = factors[0]
    for fac in factors[1:]:
        out = Mul(out, fac)
    return out


def random_term(rng: random.Random, variables: list[str], degree: int,
                max_numeral: int = 9, focus: str | None = None) -> Term:
    """A sum or difference of one to three scaled monomials.

    With two or more variables it sometimes emits ``(p - c) * m`` so that the
    coefficient of ``m`` in the focus variable can vanish for a parameter value.
    """
    out: Term | None = None
    params = [v for v in variables if v != focus]
    for _ in range(rng.randint(1, 3)):
        if params and degree >= 2 and rng.random() < 0.2:
            # the extra linear factor leaves room for one degree less in the monomial
            mono = _monomial(rng, variables, degree - 1, focus) or Var(focus or params[0])
            piece: Term = Mul(Sub(Var(rng.choice(params)), Num(rng.randint(0, max_numeral))), mono)
        else:
            mono = _monomial(rng, variables, degree, focus)
            c = rng.randint(0, max_numeral)
            if mono is None:
                piece = Num(c)
            elif c == 1 and rng.random() < 0.7:
                piece = mono
            else:
                piece = Mul(Num(c), mono)
        if out is None:
            out = piece
        else:
            out = Add(out, piece) if rng.random() < 0.6 else Sub(out, piece)
    return out


def random_atom(rng: random.Random, variables: list[str], degree: int,
                max_numeral: int = 9, focus: str | None = None) -> Atom:
    d = 1 if rng.random() < 0.5 else degree
    lhs = random_term(rng, variables, d, max_numeral, focus)
    rhs = random_term(rng, variables, d, max_numeral, focus)
    return Atom(lhs, rng.choice(syntax.RELATIONS), rhs)


def random_boolean(rng: random.Random, leaves: list[Formula]) -> Formula:
    """Combine ``leaves`` (each used once) with random connectives."""
    items = list(leaves)
    rng.shuffle(items)
    items = [syntax.Not(g) if rng.random() < 0.2 else g for g in items]
    while len(items) > 1:
        i = rng.randrange(len(items) - 1)
        a, b = items[i], items[i + 1]
        node = rng.choice((syntax.And, syntax.Or, syntax.Or, syntax.Implies))
        g = node(a, b)
        if rng.random() < 0.15:
            g = syntax.Not(g)
        items[i:i + 2] = [g]
    return items[0]


def random_sentence(rng: random.Random, degree: int, quantifiers: int, atoms: int,
                    max_numeral: int = 9, combine: bool = True) -> Formula:
    """A closed sentence with ``quantifiers`` nested binders and at most ``atoms`` atoms.

    Level ``i`` binds ``VARIABLE_NAMES[i]``; its body mixes fresh atoms over the
    variables in scope with the next binder. Single-binder sentences may come
    as a Boolean combination of two blocks when ``combine`` is set.
    """
    if quantifiers < 1:
        raise ValueError("need at least one quantifier")
    atoms = max(atoms, quantifiers)
    names = list(VARIABLE_NAMES[:quantifiers])
    if quantifiers == 1 and combine and atoms >= 2 and rng.random() < 0.25:
        split = rng.randint(1, atoms - 1)
        blocks = [
            syntax.Q(names[0], random_boolean(rng, [random_atom(rng, names, degree, max_numeral, names[0])
                                                    for _ in range(rng.randint(1, n))]))
            for n in (split, atoms - split)
        ]
        return random_boolean(rng, blocks)

    # atoms left over after every level has one
    extra = rng.randint(0, atoms - quantifiers)
    per_level = [1] * quantifiers
    for _ in range(extra):
        per_level[rng.randrange(quantifiers)] += 1

    inner: Formula | None = None
    for level in range(quantifiers - 1, -1, -1):
        scope = names[:level + 1]
        leaves: list[Formula] = [random_atom(rng, scope, degree, max_numeral, names[level])
                                 for _ in range(per_level[level])]
        if inner is not None:
            leaves.append(inner)
        inner = syntax.Q(names[level], random_boolean(rng, leaves))
    if combine and rng.random() < 0.1:
        inner = syntax.Not(inner)
    return inner


def _random_ground_term(rng: random.Random, depth: int, max_numeral: int) -> Term:
    if depth == 0 or rng.random() < 0.3:
        return Num(rng.randint(0, max_numeral))
    pick = rng.random()
    if pick < 0.15:
        return Pow(_random_ground_term(rng, 0, max_numeral), rng.randint(0, 3))
    node = rng.choice((Add, Sub, Mul))
    return node(_random_ground_term(rng, depth - 1, max_numeral),
                _random_ground_term(rng, depth - 1, max_numeral))


def random_ground_formula(rng: random.Random, atoms: int = 4, depth: int = 3,
                          max_numeral: int = 9) -> Formula:
    """A variable-free, binder-free formula."""
    leaves = [Atom(_random_ground_term(rng, depth, max_numeral), rng.choice(syntax.RELATIONS),
                   _random_ground_term(rng, depth, max_numeral))
              for _ in range(rng.randint(1, atoms))]
    return random_boolean(rng, leaves)


def instance_seed(seed: int, index: int) -> int:
    return seed * 1_000_003 + index


def generate_instance(seed: int, degree: int, depth: int, atoms: int,
                      min_depth: int = 1, max_numeral: int = 9) -> Formula:
    """The sentence a corpus run builds from an instance seed."""
    rng = random.Random(seed)
    q = rng.randint(min_depth, depth)
    return random_sentence(rng, degree, q, atoms, max_numeral)


# ------------------------------------------------------------ cross-check


def _outer_blocks(f: Formula):
    if isinstance(f, syntax.Q):
        yield f
    elif isinstance(f, syntax.Not):
        yield from _outer_blocks(f.arg)
    elif not isinstance(f, Atom):
        yield from _outer_blocks(f.left)
        yield from _outer_blocks(f.right)


def cross_check(
    seed: int,
    count: int,
    degree: int = 2,
    depth: int = 1,
    atoms: int = 4,
    *,
    min_depth: int = 1,
    max_numeral: int = 9,
    base: int = DEFAULT_WINDOW_BASE,
    window: int = DEFAULT_WINDOW,
    levels: int = DEFAULT_WINDOW_LEVELS,
    timing: bool = False,
) -> CorpusReport:
    """Compare ``decide`` against the oracles on ``count`` random sentences.

    Sentences with one binder are checked against the Cauchy oracle, where
    agreement is mandatory. Nested ones go to the window oracle; a
    disagreement there counts as a failure only when the oracle claims
    stability. Instance ``i`` is generated from ``instance_seed(seed, i)``.
    Wall-clock figures are included only with ``timing`` since they would
    break byte-identical reruns.
    """
    if count < 0 or degree < 1 or depth < 1 or atoms < 1 or not 1 <= min_depth <= depth:
        raise ValueError("corpus parameters must be positive, with 1 <= min_depth <= depth")
    report = CorpusReport(seed=seed, instances=count, parameters={
        "degree": degree, "depth": depth, "min_depth": min_depth, "atoms": atoms,
        "max_numeral": max_numeral, "base": base, "window": window, "levels": levels,
    })
    elim_time = oracle_time = 0.0
    worst = 0.0
    for i in range(count):
        s = instance_seed(seed, i)
        f = generate_instance(s, degree, depth, atoms, min_depth, max_numeral)
        nested = any(syntax.quantifier_count(b.body) for b in _outer_blocks(f))

        t0 = time.perf_counter()
        verdict = decide(f)
        t1 = time.perf_counter()
        if not nested:
            other = oracle_decide_inner(f)
        else:
            other = oracle_decide_window(f, base, window, levels)
        t2 = time.perf_counter()
        elim_time += t1 - t0
        oracle_time += t2 - t1
        worst = max(worst, t1 - t0)

        entry = {
            "index": i,
            "seed": s,
            "sentence": syntax.print_formula(f),
            "eliminator": verdict.value,
            "oracle": other.value,
            "method": other.method,
            "stable": other.stable,
        }
        if not verdict.trace.within_bounds():
            entry["cost_bound_violated"] = True
            report.disagreements.append(entry)
            continue
        if verdict.value == other.value:
            report.agreements += 1
        else:
            report.disagreements.append(entry)
        if not other.stable:
            report.unstable.append(entry)
    if timing:
        report.wall_clock = {
            "eliminator_seconds": round(elim_time, 6),
            "oracle_seconds": round(oracle_time, 6),
            "max_decide_seconds": round(worst, 6),
        }
    return report


# ------------------------------------------------------- Z[t] consistency


def zt_tail_consistency(f: Formula, coeff_bound: int = 5, max_degree: int = 2) -> CorpusReport:
    """Check ``decide(f)`` against the body of ``f = Q x. body`` evaluated in Z[t].

    Every positive infinite element of Z[t] lies beyond all real roots of the
    body's atoms, so the body must take the decided value at each of them.
    Each sampled positive infinite element is one instance; the parameters
    record the largest sampled element where the body disagrees with the
    verdict, which must be finite.
    """
    if not isinstance(f, syntax.Q) or syntax.quantifier_count(f.body):
        raise ShapeError("zt_tail_consistency expects Q x. body with a quantifier-free body")
    if syntax.free_vars(f.body) - {f.var}:
        raise ShapeError("the body may mention only the quantified variable")
    verdict = decide(f).value
    body = to_qf(f.body)
    elems = zt_elements(coeff_bound, max_degree)
    truths = [zt_eval_qf(body, {f.var: e}) for e in elems]
    threshold = None
    for e, v in zip(elems, truths):
        if v != verdict:
            threshold = e
    report = CorpusReport(seed=None, instances=0, parameters={
        "sentence": syntax.print_formula(f),
        "verdict": verdict,
        "coeff_bound": coeff_bound,
        "max_degree": max_degree,
        "sampled": len(elems),
        "threshold": None if threshold is None else str(threshold),
    })
    for e, v in zip(elems, truths):
        if e.is_infinite() and e.sign() > 0:
            report.instances += 1
            if v == verdict:
                report.agreements += 1
            else:
                report.disagreements.append({"element": str(e), "body": v, "verdict": verdict})
    return report


def ground_ring_agreement(f: Formula) -> bool:
    """Whether a ground formula has the same truth value in Z and in Z[t]."""
    qf = to_qf(f)
    return eval_qf(qf, {}) == zt_eval_qf(qf, {})
