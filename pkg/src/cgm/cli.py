"""Command-line front end.

    cgm laws <instance> [--samples N] [--seed S] [--category file.cat]
    cgm run <file.gp> [--store N]
    cgm ahl <file.ahl>
    cgm roundtrip --states N
    cgm translate <from> <to> <instance>

Exit codes: 0 success/valid, 1 law-or-verification failure,
2 type/grade/config error, 3 parse error.  Identical inputs and seeds
produce byte-identical output.
"""

from __future__ import annotations

import argparse
import sys

from .ahlcheck import check_ahl_file
from .catfile import parse_cat_file
from .core import LawReport, check_laws
from .errors import (
    CgmError,
    CompositionMismatch,
    GradeMismatch,
    ParseError,
    RangeError,
    SpawnGradeError,
    UnknownPrim,
)
from .instances import (
    InstanceBundle,
    build_instance,
    concst_instance,
    graded_list_graded_monad,
    identity_instance,
    instance_names,
    list_monad,
    typed_state_param,
)
from .metalang import eval_term, infer_program, parse_program, start_object
from .translations import (
    check_param_laws,
    discrete_param_to_catgraded,
    graded_to_catgraded,
    monad_to_catgraded,
    param_to_catgraded_genunit,
    pograded_to_2catgraded,
    roundtrip_param,
)
from .values import vint


def _emit(text: str) -> None:
    sys.stdout.write(text + "\n")


def _report_exit(report: LawReport, fmt: str) -> int:
    _emit(report.render_machine() if fmt == "machine" else report.render_text())
    return 0 if report.ok() else 1


def cmd_laws(args) -> int:
    name = args.instance
    if args.samples < 1:
        _emit("error: --samples must be at least 1")
        return 2
    if args.category is not None:
        try:
            with open(args.category, "r", encoding="utf-8") as fh:
                cat = parse_cat_file(fh.read())
        except OSError as exc:
            _emit(f"error: {exc}")
            return 2
        except ParseError as exc:
            _emit(f"parse error: {exc}")
            return 3
        if name != "identity":
            _emit("error: --category only applies to the identity instance")
            return 2
        bundle = InstanceBundle("identity", identity_instance(cat))
    else:
        try:
            bundle = build_instance(name)
        except KeyError:
            _emit(f"error: unknown instance {name!r}; "
                  f"known: {', '.join(instance_names())}")
            return 2
    _emit(f"instance: {name}")
    _emit(f"samples: {args.samples}")
    _emit(f"seed: {args.seed}")
    return _report_exit(bundle.law_report(samples=args.samples, seed=args.seed),
                        args.format)


def cmd_run(args) -> int:
    try:
        with open(args.path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        _emit(f"error: {exc}")
        return 2
    try:
        program = parse_program(text)
    except ParseError as exc:
        _emit(f"parse error: {exc}")
        return 3
    try:
        if program.instance == "concst" and program.store is not None:
            lo, hi = program.store
            bundle = InstanceBundle(
                "concst", concst_instance(tuple(vint(n) for n in range(lo, hi + 1))))
        else:
            bundle = build_instance(program.instance)
    except KeyError:
        _emit(f"error: unknown instance {program.instance!r}")
        return 2
    try:
        start = start_object(bundle, program)
        gt = infer_program(bundle, program)
    except (GradeMismatch, UnknownPrim, SpawnGradeError, CompositionMismatch) as exc:
        _emit(f"grade error: {exc}")
        return 2
    _emit(f"grade: {gt.index}")
    try:
        result = eval_term(bundle, program.body, {}, start)
    except RangeError as exc:
        _emit(f"runtime error: {exc}")
        return 2
    if args.store is not None:
        payload = result.payload
        key = vint(args.store)
        if not payload.has(key):
            _emit(f"store {args.store}: undefined (branch left the store domain)")
            return 2
        step = payload.get(key)
        _emit(f"store {args.store}: result {step.fst.show()}, final {step.snd.show()}")
    else:
        _emit(f"result: {result.payload.show()}")
    return 0


def cmd_ahl(args) -> int:
    try:
        with open(args.path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        _emit(f"error: {exc}")
        return 2
    try:
        verdict = check_ahl_file(text)
    except ParseError as exc:
        _emit(f"parse error: {exc}")
        return 3
    except CgmError as exc:
        _emit(f"{type(exc).__name__}: {exc}")
        _emit("verdict: invalid")
        return 1
    _emit(verdict.render())
    return 0 if verdict.valid else 1


def cmd_roundtrip(args) -> int:
    n = args.states
    if not 1 <= n <= 3:
        _emit(f"error: --states must be between 1 and 3, got {n}")
        return 2
    P = typed_state_param({"A": n, "B": max(1, n - 1) if n > 1 else 1})
    report = roundtrip_param(P, samples=args.samples, seed=args.seed)
    _emit(f"states: {n}")
    return _report_exit(report, args.format)


_TRANSLATIONS = {
    ("monad", "catgraded"): ("list", lambda: check_laws(
        monad_to_catgraded(list_monad()))),
    ("graded", "catgraded"): ("glist", lambda: check_laws(
        graded_to_catgraded(graded_list_graded_monad()))),
    ("pograded", "2catgraded"): ("glist", lambda: check_laws(
        pograded_to_2catgraded(graded_list_graded_monad()))),
    ("discrete-param", "catgraded"): ("tstate", lambda: check_laws(
        discrete_param_to_catgraded(typed_state_param({"A": 2, "B": 2},
                                                      discrete=True)))),
    ("param", "catgraded"): ("tstate", lambda: _param_forward_report()),
}


def _param_forward_report() -> LawReport:
    P = typed_state_param({"A": 2, "B": 2})
    T, G = param_to_catgraded_genunit(P)
    return check_param_laws(P, samples=60).merge(
        check_laws(T, samples=60)).merge(check_laws(G, samples=60))


def cmd_translate(args) -> int:
    key = (args.source, args.target)
    if key not in _TRANSLATIONS:
        known = ", ".join(f"{a}->{b}" for a, b in _TRANSLATIONS)
        _emit(f"error: unsupported translation {args.source} -> {args.target}; "
              f"known: {known}")
        return 2
    expected_instance, runner = _TRANSLATIONS[key]
    if args.instance != expected_instance:
        _emit(f"error: translation {args.source} -> {args.target} is built in "
              f"for instance {expected_instance!r}")
        return 2
    _emit(f"translate: {args.source} -> {args.target} ({args.instance})")
    return _report_exit(runner(), args.format)


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cgm")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("laws", help="run an instance's law suite")
    p.add_argument("instance")
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=("text", "machine"), default="text")
    p.add_argument("--category", default=None,
                   help=".cat file for the identity instance")
    p.set_defaults(fn=cmd_laws)

    p = sub.add_parser("run", help="typecheck and evaluate a program file")
    p.add_argument("path")
    p.add_argument("--store", type=int, default=None,
                   help="apply the computation to this initial store")
    p.set_defaults(fn=cmd_run)

    p = sub.add_parser("ahl", help="verify a derivation file")
    p.add_argument("path")
    p.set_defaults(fn=cmd_ahl)

    p = sub.add_parser("roundtrip", help="typed-state forward/backward comparison")
    p.add_argument("--states", type=int, required=True)
    p.add_argument("--samples", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=("text", "machine"), default="text")
    p.set_defaults(fn=cmd_roundtrip)

    p = sub.add_parser("translate", help="build a translation and check its laws")
    p.add_argument("source")
    p.add_argument("target")
    p.add_argument("instance")
    p.add_argument("--format", choices=("text", "machine"), default="text")
    p.set_defaults(fn=cmd_translate)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = make_parser().parse_args(argv)
    code = args.fn(args)
    return code


if __name__ == "__main__":
    sys.exit(main())
