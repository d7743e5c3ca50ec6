"""``counterprog`` command line.

Exit codes: 0 success or suite pass, 1 suite fail, 2 suite inconclusive,
64 usage error, 65 malformed input file, 66 unreadable input file.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import gadgets, verify
from .ir import (
    Checking,
    Configuration,
    General,
    ProgramSyntaxError,
    classify,
    counters,
    dimension,
    parse,
    render,
    size,
)
from .semantics import ExplorationPolicy, reach_set
from .vass import HasInteriorTests, export_vass

EX_USAGE, EX_DATAERR, EX_NOINPUT = 64, 65, 66


class UsageError(Exception):
    pass


class InputError(Exception):
    def __init__(self, msg, code):
        super().__init__(msg)
        self.code = code


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}", EX_NOINPUT) from e


def _read_program(path: str):
    text = _read(path)
    try:
        return parse(text)
    except ProgramSyntaxError as e:
        raise InputError(f"{path}:{e.line}:{e.col}: {e.msg}", EX_DATAERR) from e


def _read_spec(path: str) -> gadgets.PreamplifierSpec:
    try:
        return gadgets.PreamplifierSpec.from_json(_read(path))
    except (ValueError, KeyError, TypeError) as e:
        raise InputError(f"{path}: not a preamplifier spec ({e})", EX_DATAERR) from e


def _emit(text: str, out):
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _csv(text: str) -> list:
    return [t for t in text.split(",") if t]


# -- gadget -----------------------------------------------------------------------


def _cmd_gadget(a) -> int:
    spec = None
    kind = a.kind
    if kind == "simtest":
        prog = gadgets.build_simtest(a.budget, _csv(a.block), a.pair, tested=a.tested)
    elif kind == "loopatmost":
        prog = gadgets.build_loop_at_most(a.c, a.cp, parse(a.body))
    elif kind == "evalf":
        L = gadgets.GoodConfigLayout(a.params[0])
        if a.branch is None:
            prog = gadgets.build_evalf(L)
        else:
            prog = gadgets.build_evalf_branch(L, a.branch)
    elif kind == "updateb":
        prog = gadgets.build_update_b(gadgets.GoodConfigLayout(a.params[0] if a.params else 1))
    elif kind in ("ack", "ack-reduced"):
        if len(a.params) != 2:
            raise UsageError(f"gadget {kind} expects D N")
        build = gadgets.build_ack if kind == "ack" else gadgets.build_ack_reduced
        prog, spec = build(*a.params)
    else:
        if len(a.params) != 1:
            raise UsageError("gadget trivial-preamp expects K")
        prog, spec = gadgets.build_trivial_preamplifier(a.params[0])
    _emit(render(prog), a.output)
    if spec is not None:
        target = a.spec_out
        if target is None and a.output not in (None, "-"):
            target = a.output + ".spec.json"
        if target is not None:
            Path(target).write_text(spec.to_json() + "\n")
    return 0


# -- reach / stats / export / compose ---------------------------------------------


def _policy(a) -> ExplorationPolicy:
    kw = {}
    if a.max_states is not None:
        kw["max_states"] = a.max_states
    return ExplorationPolicy(sum_bound=a.sum_bound, **kw)


def _cmd_reach(a) -> int:
    prog = _read_program(a.program)
    try:
        start = Configuration.from_json(a.start)
    except (ValueError, TypeError) as e:
        raise UsageError(f"--from: not a configuration ({e})") from e
    res = reach_set(prog, start, _policy(a), witnesses=a.witness)
    print(res.to_json())
    return 0


def _cmd_stats(a) -> int:
    prog = _read_program(a.program)
    cls = classify(prog)
    obj = {
        "size": size(prog),
        "dimension": dimension(prog),
        "classification": type(cls).__name__,
        "counters": list(counters(prog)),
    }
    if isinstance(cls, Checking):
        obj["tested"] = list(cls.tested)
    print(json.dumps(obj, sort_keys=True))
    return 0


def _cmd_export(a) -> int:
    prog = _read_program(a.program)
    try:
        v = export_vass(prog)
    except HasInteriorTests as e:
        raise InputError(f"{a.program}: {e}", EX_DATAERR) from e
    _emit(v.to_text(), a.output)
    return 0


def _cmd_compose(a) -> int:
    A = _read_program(a.preamp)
    spec = _read_spec(a.spec)
    M = _read_program(a.target)
    if isinstance(classify(A), General):
        raise InputError(f"{a.preamp}: preamplifier must be a checking program", EX_DATAERR)
    _emit(render(gadgets.compose(A, spec, M)), a.output)
    return 0


# -- verify -----------------------------------------------------------------------


def _resolve_preamp(a):
    if a.ack is not None:
        return gadgets.build_ack(*a.ack)
    if a.ack_reduced is not None:
        return gadgets.build_ack_reduced(*a.ack_reduced)
    if a.trivial is not None:
        return gadgets.build_trivial_preamplifier(a.trivial)
    if a.program and a.spec:
        return _read_program(a.program), _read_spec(a.spec)
    raise UsageError("choose one of --ack, --ack-reduced, --trivial or --program with --spec")


def _parse_case(text: str):
    try:
        v, n, s = text.split(";")
        return tuple(int(e) for e in _csv(v)), int(n), int(s)
    except ValueError as e:
        raise UsageError(f"--case expects 'v1,..,vd;n;xscale', got {text!r}") from e


def _cmd_verify(a) -> int:
    suite = a.suite
    if suite == "simtest":
        reports = [verify.suite_simtest(a.max_b, a.max_val)]
    elif suite == "loopatmost":
        variants = [a.variant] if a.variant else [1, 2, 3, 4]
        reports = [verify.suite_loop_at_most(v, a.max_c) for v in variants]
    elif suite == "evalf":
        cases = [_parse_case(c) for c in a.case] or verify.DEFAULT_EVALF_CASES[a.d]
        reports = [
            verify.suite_evalf(a.d, cases, ExplorationPolicy(max_states=a.max_states or 10**7)),
            verify.suite_update_b(5, 3),
        ]
    elif suite == "preamp":
        A, spec = _resolve_preamp(a)
        reports = [verify.check_preamplifier(A, spec, a.lmax, _policy(a))]
    else:
        if a.preamp_program and a.spec:
            A, spec = _read_program(a.preamp_program), _read_spec(a.spec)
        else:
            A, spec = gadgets.build_trivial_preamplifier(a.K)
        M = _read_program(a.target)
        reports = [verify.suite_compose(M, a.K, A, spec, sum_bound=a.sum_bound)]
    for r in reports:
        print(r.to_json() if a.json else r.table())
    codes = [r.exit_code for r in reports]
    return 1 if 1 in codes else max(codes)


# -- argument parsing -------------------------------------------------------------


def _nat(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a natural number: {text!r}")
    if v < 0:
        raise argparse.ArgumentTypeError(f"not a natural number: {text!r}")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="counterprog", description="Counter program gadgets and reachability.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("gadget", help="emit a gadget program")
    g.add_argument("kind", choices=["simtest", "loopatmost", "evalf", "updateb", "ack",
                                    "ack-reduced", "trivial-preamp"])
    g.add_argument("params", nargs="*", type=_nat, help="D N for ack, D for evalf, K for trivial-preamp")
    g.add_argument("-o", "--output")
    g.add_argument("--spec-out", help="where to write the preamplifier spec JSON")
    g.add_argument("--budget", default="y")
    g.add_argument("--block", default="b0,b1")
    g.add_argument("--pair", default="x")
    g.add_argument("--tested")
    g.add_argument("--c", default="c")
    g.add_argument("--cp", default="cp")
    g.add_argument("--body", default="inc z")
    g.add_argument("--branch", type=int)
    g.set_defaults(func=_cmd_gadget)

    r = sub.add_parser("reach", help="reachable final configurations")
    r.add_argument("-p", "--program", required=True)
    r.add_argument("--from", dest="start", default="{}")
    r.add_argument("--sum-bound", type=_nat)
    r.add_argument("--max-states", type=_nat)
    r.add_argument("--witness", action="store_true")
    r.set_defaults(func=_cmd_reach)

    v = sub.add_parser("verify", help="run a verification suite")
    v.add_argument("suite", choices=["simtest", "loopatmost", "evalf", "preamp", "compose"])
    v.add_argument("--json", action="store_true")
    v.add_argument("--max-b", type=_nat, default=3)
    v.add_argument("--max-val", type=_nat, default=3)
    v.add_argument("--variant", type=int, choices=[1, 2, 3, 4])
    v.add_argument("--max-c", type=_nat, default=6)
    v.add_argument("--d", type=int, choices=[1, 2], default=1)
    v.add_argument("--case", action="append", default=[], help="'v1,..,vd;n;xscale'")
    v.add_argument("--ack", type=_nat, nargs=2, metavar=("D", "N"))
    v.add_argument("--ack-reduced", type=_nat, nargs=2, metavar=("D", "N"))
    v.add_argument("--trivial", type=_nat, metavar="K")
    v.add_argument("--program")
    v.add_argument("--spec")
    v.add_argument("--preamp-program")
    v.add_argument("--target")
    v.add_argument("--K", type=_nat, default=2)
    v.add_argument("--lmax", type=_nat, default=2)
    v.add_argument("--sum-bound", type=_nat)
    v.add_argument("--max-states", type=_nat)
    v.set_defaults(func=_cmd_verify)

    c = sub.add_parser("compose", help="build A |> M")
    c.add_argument("--preamp", required=True)
    c.add_argument("--spec", required=True)
    c.add_argument("--target", required=True)
    c.add_argument("-o", "--output")
    c.set_defaults(func=_cmd_compose)

    s = sub.add_parser("stats", help="size, dimension and classification")
    s.add_argument("-p", "--program", required=True)
    s.set_defaults(func=_cmd_stats)

    e = sub.add_parser("export-vass", help="lower a checking program to a VASS")
    e.add_argument("-p", "--program", required=True)
    e.add_argument("-o", "--output")
    e.set_defaults(func=_cmd_export)
    return p


def main(argv=None) -> int:
    try:
        a = build_parser().parse_args(argv)
        if a.command == "verify":
            if a.suite == "preamp" and a.sum_bound is None:
                a.sum_bound = 16
            if a.suite == "compose" and not a.target:
                raise UsageError("verify compose needs --target")
        return a.func(a)
    except UsageError as e:
        print(e, file=sys.stderr)
        return EX_USAGE
    except InputError as e:
        print(e, file=sys.stderr)
        return e.code
    except (ValueError, IndexError, ProgramSyntaxError) as e:
        print(f"counterprog: {e}", file=sys.stderr)
        return EX_USAGE


if __name__ == "__main__":
    sys.exit(main())
