"""Command-line entry point.

Exit codes: 0 success (or a true sentence for ``decide``), 1 a false
sentence (``decide`` only), 2 usage or input error, 3 resource limit.
"""
from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

from . import syntax
from .corpus import cross_check
from .poly import MissingVariableError, print_qf
from .qelim import EliminationTrace, default_node_limit
from .semantics import (
    DEFAULT_WINDOW,
    DEFAULT_WINDOW_BASE,
    DEFAULT_WINDOW_LEVELS,
    decide,
    eval_qf,
    oracle_decide_inner,
    oracle_decide_window,
    qf_equivalent,
)

EXIT_OK, EXIT_FALSE, EXIT_INPUT, EXIT_RESOURCE = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _positive(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}") from None
    if value <= 0:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return value


def _non_negative(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text!r}")
    return value


def _binding(text: str) -> tuple[str, int]:
    name, sep, value = text.partition("=")
    name = name.strip()
    if not sep or not name:
        raise argparse.ArgumentTypeError(f"bindings look like x=3, got {text!r}")
    try:
        return name, int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"binding value must be an integer, got {value!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--node-limit", type=_positive, default=None,
                        help="max nodes per intermediate formula (env ALMOSTALL_NODE_LIMIT)")
    common.add_argument("--input-limit", type=_positive, default=syntax.DEFAULT_PARSE_NODE_LIMIT,
                        help="max nodes in the parsed input")

    formula_args = argparse.ArgumentParser(add_help=False)
    formula_args.add_argument("formula", nargs="?", help="formula text, or - for standard input")
    formula_args.add_argument("--file", help="read the formula from a file (- for standard input)")

    p = _Parser(prog="almostall", description="Decide and eliminate the almost-all quantifier Q.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sub.add_parser("decide", parents=[common, formula_args], help="decide a closed sentence")
    sub.add_parser("qe", parents=[common, formula_args], help="quantifier-free equivalent")
    sub.add_parser("trace", parents=[common, formula_args], help="show the elimination trace")

    ev = sub.add_parser("eval", parents=[common, formula_args], help="evaluate at integer values")
    ev.add_argument("--bind", action="append", type=_binding, default=[], metavar="VAR=INT")

    orc = sub.add_parser("oracle", parents=[common, formula_args], help="decide with an oracle")
    orc.add_argument("--method", choices=("cauchy", "window"), default="cauchy")
    orc.add_argument("--base", type=_positive, default=DEFAULT_WINDOW_BASE)
    orc.add_argument("--window", type=_positive, default=DEFAULT_WINDOW)
    orc.add_argument("--levels", type=_non_negative, default=DEFAULT_WINDOW_LEVELS)

    fz = sub.add_parser("fuzz", parents=[common], help="cross-check the eliminator on a random corpus")
    fz.add_argument("--seed", type=int, default=42)
    fz.add_argument("--count", type=_non_negative, default=100)
    fz.add_argument("--degree", type=_positive, default=2)
    fz.add_argument("--depth", type=_positive, default=1, help="max nesting of Q")
    fz.add_argument("--min-depth", type=_positive, default=1)
    fz.add_argument("--atoms", type=_positive, default=4)
    fz.add_argument("--max-numeral", type=_non_negative, default=9)
    fz.add_argument("--base", type=_positive, default=DEFAULT_WINDOW_BASE)
    fz.add_argument("--window", type=_positive, default=DEFAULT_WINDOW)
    fz.add_argument("--levels", type=_non_negative, default=DEFAULT_WINDOW_LEVELS)
    fz.add_argument("--timing", action="store_true", help="include wall-clock figures")
    return p


def _read_formula(args, stdin) -> str:
    if args.file is not None and args.formula is not None:
        raise UsageError("give the formula either as an argument or with --file, not both")
    if args.file is not None:
        if args.file == "-":
            return stdin.read()
        try:
            with open(args.file, encoding="utf-8") as fh:
                return fh.read()
        except OSError as exc:
            raise UsageError(f"cannot read {args.file}: {exc.strerror}") from None
    if args.formula is None:
        raise UsageError("missing formula argument")
    if args.formula == "-":
        return stdin.read()
    return args.formula


def _emit(out, args, payload: dict, text: str) -> None:
    if args.format == "json":
        out.write(json.dumps(payload, sort_keys=True) + "\n")
    else:
        out.write(text + "\n")


def _trace_text(trace: EliminationTrace) -> str:
    rows = ["step  var  deg  atoms(before>subst>after)  nodes(before>after)  branches  bound"]
    for i, s in enumerate(trace.steps, 1):
        rows.append(
            f"{i:>4}  {s.variable:<3}  {s.degree:>3}  "
            f"{s.atoms_before:>7} > {s.atoms_substituted:>5} > {s.atoms_after:<7}  "
            f"{s.nodes_before:>8} > {s.nodes_after:<8}  {s.branches:>8}  "
            f"{'ok' if s.within_bound else 'VIOLATED'}"
        )
    return "\n".join(rows)


def _dispatch(args, text: str | None, out) -> int:
    limit = args.node_limit if args.node_limit is not None else default_node_limit()
    f = syntax.parse_formula(text, node_limit=args.input_limit) if text is not None else None

    if args.command == "decide":
        v = decide(f, node_limit=limit)
        payload = v.to_dict()
        _emit(out, args, payload, "true" if v.value else "false")
        return EXIT_OK if v.value else EXIT_FALSE

    if args.command in ("qe", "trace"):
        trace = EliminationTrace()
        qf = qf_equivalent(f, node_limit=limit, trace=trace)
        rendered = print_qf(qf)
        payload = {"qf": rendered, "stable": True, "trace": trace.to_list()}
        if args.command == "qe":
            _emit(out, args, payload, rendered)
        else:
            _emit(out, args, payload, f"{_trace_text(trace)}\nresult: {rendered}")
        return EXIT_OK

    if args.command == "eval":
        env = dict(args.bind)
        qf = qf_equivalent(f, node_limit=limit)
        value = eval_qf(qf, env)
        _emit(out, args, {"verdict": value, "qf": print_qf(qf)}, "true" if value else "false")
        return EXIT_OK

    if args.command == "oracle":
        if args.method == "cauchy":
            v = oracle_decide_inner(f)
        else:
            v = oracle_decide_window(f, args.base, args.window, args.levels)
        suffix = "" if v.stable else " (unstable)"
        _emit(out, args, v.to_dict(), f"{'true' if v.value else 'false'}{suffix}")
        return EXIT_OK

    if args.command == "fuzz":
        if args.min_depth > args.depth:
            raise UsageError("--min-depth must not exceed --depth")
        report = cross_check(
            args.seed, args.count, args.degree, args.depth, args.atoms,
            min_depth=args.min_depth, max_numeral=args.max_numeral,
            base=args.base, window=args.window, levels=args.levels, timing=args.timing,
        )
        lines = [
            f"seed {report.seed}: {report.agreements}/{report.instances} agree, "
            f"{len(report.unstable)} unstable, {len(report.stable_disagreements)} stable disagreements"
        ]
        for d in report.disagreements:
            lines.append(f"  [{d['index']}] seed {d['seed']}: eliminator={d['eliminator']} "
                         f"{d['method']}={d['oracle']} stable={d['stable']}  {d['sentence']}")
        if report.wall_clock is not None:
            lines.append("  " + ", ".join(f"{k}={v}" for k, v in report.wall_clock.items()))
        _emit(out, args, {"report": report.to_dict(), "stable": not report.unstable},
              "\n".join(lines))
        return EXIT_OK

    raise UsageError(f"unknown command {args.command!r}")


def _wants_json(argv: Sequence[str]) -> bool:
    argv = list(argv)
    for i, a in enumerate(argv):
        if a == "--format=json" or (a == "--format" and argv[i + 1:i + 2] == ["json"]):
            return True
    return False


def run(argv: Sequence[str] | None = None, stdin=None, stdout=None, stderr=None) -> int:
    stdin = stdin or sys.stdin
    out = stdout or sys.stdout
    err = stderr or sys.stderr
    # errors before argument parsing finishes still honour an explicit --format json
    fmt = "json" if _wants_json(argv or []) else "text"

    def fail(code: int, kind: str, message: str, span=None, detail: str | None = None) -> int:
        err.write(f"error: {detail or message}\n")
        if fmt == "json":
            body = {"kind": kind, "message": message}
            if span is not None:
                body["span"] = [span.start, span.end]
            out.write(json.dumps({"error": body}, sort_keys=True) + "\n")
        return code

    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        return fail(EXIT_INPUT, "usage", str(exc))
    except SystemExit as exc:  # --help
        return exc.code if isinstance(exc.code, int) else EXIT_OK
    fmt = args.format

    text = None
    try:
        if args.command != "fuzz":
            text = _read_formula(args, stdin)
        return _dispatch(args, text, out)
    except UsageError as exc:
        return fail(EXIT_INPUT, "usage", str(exc))
    except syntax.ParseError as exc:
        return fail(EXIT_INPUT, "parse", exc.message, exc.span, exc.render(text or ""))
    except syntax.SizeLimitError as exc:
        return fail(EXIT_RESOURCE, "size_limit", str(exc))
    except RecursionError:
        return fail(EXIT_RESOURCE, "size_limit", "formula nests too deeply")
    except MissingVariableError as exc:
        return fail(EXIT_INPUT, "missing_variable", str(exc))
    except (syntax.FormulaError, ValueError) as exc:
        return fail(EXIT_INPUT, type(exc).__name__, str(exc))


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
