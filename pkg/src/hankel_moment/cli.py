"""Command-line front end.

Exit codes: 0 verdict true, 1 verdict false or indeterminate, 2 malformed
input, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import logging
import os
import sys

from . import selftest
from .decomposition import strong_hankel_decompose, verify_decomposition
from .explorer import FitOptions, preset_family, search_counterexample
from .io import MalformedInput, dumps, family_from_json, load_json, sequence_from_json, write_atomic
from .psd import DEFAULT_TOL, moment_sequence_check, strong_hankel_check
from .scalars import (
    EXACT,
    FLOAT,
    CoverageError,
    InconsistencyError,
    LengthError,
    NumericalFailure,
    PreconditionError,
    normalize,
    to_json_scalar,
)
from .sequence import (
    generating_vector_from_sequence,
    is_hankel_sequence,
    sequence_from_generating_vector,
)
from .tensor import hankel_tensor, polynomial_eval

log = logging.getLogger("hankel_moment")

OK, FALSE, MALFORMED, NUMERICAL = 0, 1, 2, 3


def _setup_logging():
    level = {"quiet": logging.WARNING, "info": logging.INFO, "debug": logging.DEBUG}.get(
        os.environ.get("HMK_LOG", "quiet").lower(), logging.WARNING)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)


def _common(p):
    p.add_argument("--mode", choices=[FLOAT, EXACT], help="scalar mode (default: exact for rational input)")
    p.add_argument("--tol", type=float, help="tolerance (PSD: 1e-10, decomposition/fit: 1e-8)")
    p.add_argument("--pmax", type=int, help="size of the largest Hankel matrix checked")
    p.add_argument("--m", type=int, help="tensor order")
    p.add_argument("--n", type=int, help="tensor dimension")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="write the JSON result here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hmk", description=__doc__.splitlines()[0])
    parser.add_argument("--selftest", action="store_true", help="run the built-in oracle corpus")
    sub = parser.add_subparsers(dest="command")

    for name, help_ in [("check", "certify the truncated moment / strong Hankel property"),
                        ("decompose", "sum-of-powers decomposition of a strong Hankel tensor"),
                        ("eval", "evaluate the degree-m form by both paths")]:
        p = sub.add_parser(name, help=help_)
        src = p.add_mutually_exclusive_group(required=True)
        src.add_argument("--vector", help="generating-vector JSON")
        src.add_argument("--sequence", help="sequence JSON (table or hankel-rule)")
        _common(p)
        if name == "eval":
            p.add_argument("--x", required=True, help="comma-separated point x_0,...,x_{n-1}")

    p = sub.add_parser("explore", help="search truncated families for non-strong decomposable tensors")
    p.add_argument("--family", help="family JSON (default: built-in preset)")
    p.add_argument("--m-list", default="3,4", help="comma-separated orders to fit")
    p.add_argument("--restarts", type=int, default=FitOptions.restarts)
    p.add_argument("--max-iter", type=int, default=FitOptions.max_iter)
    _common(p)

    p = sub.add_parser("selftest", help="run the built-in oracle corpus")
    return parser


def _emit(args, doc) -> None:
    text = dumps(doc) + "\n"
    if getattr(args, "out", None):
        write_atomic(args.out, text)
    else:
        sys.stdout.write(text)


def _config(args) -> dict:
    keys = ["command", "vector", "sequence", "family", "mode", "tol", "pmax", "m", "n", "seed",
            "x", "m_list", "restarts", "max_iter"]
    return {k: getattr(args, k) for k in keys if getattr(args, k, None) is not None}


def _load_sequence(args):
    path = args.vector or args.sequence
    S = sequence_from_json(load_json(path))
    if args.n is not None and S.kind == "hankel-rule":
        S = sequence_from_generating_vector(S.generator, args.n)
    if args.mode == EXACT and S.mode != EXACT:
        raise MalformedInput("exact mode needs rational input (integers or 'p/q' strings)")
    if args.mode is None:
        args.mode = S.mode
    return S


def _generating_vector(S):
    if S.generator is not None:
        return S.generator
    return generating_vector_from_sequence(S, (S.n - 1) * S.max_degree)


def cmd_check(args) -> int:
    S = _load_sequence(args)
    tol = args.tol if args.tol is not None else DEFAULT_TOL
    doc = {"config": _config(args)}
    if S.kind == "table":
        ok, pair = is_hankel_sequence(S, S.max_degree)
        doc["hankel_sequence"] = {"holds": ok, "violating_pair": [list(j) for j in pair] if pair else None}
        if not ok:
            print(f"not a Hankel sequence: b_{pair[0]} != b_{pair[1]}", file=sys.stderr)
            _emit(args, doc)
            return FALSE
    v = _generating_vector(S)
    check = moment_sequence_check(v, args.pmax, args.mode, tol)
    doc["moment_check"] = check.to_json()
    verdict = check.consistent
    if args.m is not None:
        n = args.n if args.n is not None else S.n
        cert = strong_hankel_check(v, n, args.m, args.mode, tol)
        doc["strong_check"] = cert.to_json()
        verdict = verdict and cert.valid
    report = check.report
    if report.witness is not None:
        print(f"H_{report.p} is not PSD; witness x = {[to_json_scalar(x) for x in report.witness]}",
              file=sys.stderr)
    doc["verdict"] = verdict
    _emit(args, doc)
    return OK if verdict else FALSE


def cmd_decompose(args) -> int:
    if args.m is None:
        raise MalformedInput("decompose needs --m")
    S = _load_sequence(args)
    n = args.n if args.n is not None else S.n
    v = _generating_vector(S)
    tol = args.tol if args.tol is not None else 1e-8
    H = hankel_tensor(v, n, args.m)
    doc = {"config": _config(args)}
    try:
        D = strong_hankel_decompose(H, args.mode, tol)
    except PreconditionError as exc:
        print(f"precondition failed: {exc}", file=sys.stderr)
        doc["error"] = f"precondition failed: {exc}"
        _emit(args, doc)
        return FALSE
    residual = verify_decomposition(H, D, tol)
    doc.update(D.to_json(residual))
    _emit(args, doc)
    return OK if residual.passed else FALSE


def cmd_eval(args) -> int:
    if args.m is None:
        raise MalformedInput("eval needs --m")
    S = _load_sequence(args)
    try:
        x = normalize(s for s in args.x.split(","))
    except (TypeError, ValueError) as exc:
        raise MalformedInput(f"bad --x: {exc}") from None
    if len(x) != S.n:
        raise MalformedInput(f"--x has {len(x)} entries, dimension is {S.n}")
    a = polynomial_eval(S, args.m, x, "direct")
    b = polynomial_eval(S, args.m, x, "tensor")
    diff = a - b
    print(f"direct {to_json_scalar(a)}  tensor {to_json_scalar(b)}  difference {to_json_scalar(diff)}")
    if args.out:
        _emit(args, {"config": _config(args), "direct": to_json_scalar(a),
                     "tensor": to_json_scalar(b), "difference": to_json_scalar(diff)})
    return OK


def cmd_explore(args) -> int:
    f = family_from_json(load_json(args.family)) if args.family else preset_family()
    try:
        m_list = [int(m) for m in args.m_list.split(",")]
    except ValueError:
        raise MalformedInput(f"bad --m-list {args.m_list!r}") from None
    opts = FitOptions(restarts=args.restarts, max_iter=args.max_iter,
                      tol=args.tol if args.tol is not None else 1e-8, seed=args.seed)
    try:
        report = search_counterexample(f, m_list, opts)
    except ValueError as exc:
        raise MalformedInput(str(exc)) from None
    _emit(args, {"config": _config(args), "report": report.to_json()})
    return OK


COMMANDS = {"check": cmd_check, "decompose": cmd_decompose, "eval": cmd_eval, "explore": cmd_explore}


def main(argv=None) -> int:
    _setup_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.selftest or args.command == "selftest":
        return OK if selftest.run() else FALSE
    if args.command is None:
        parser.print_help()
        return MALFORMED
    log.info("running %s", args.command)
    try:
        return COMMANDS[args.command](args)
    except (MalformedInput, LengthError, CoverageError, InconsistencyError) as exc:
        print(f"malformed input: {exc}", file=sys.stderr)
        return MALFORMED
    except NumericalFailure as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
