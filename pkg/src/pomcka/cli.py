"""``pomcka`` command line.

Exit codes: 0 the checked property holds (or the command succeeded), 1 it
does not, 2 usage or input error, 3 a precondition of the operation failed.
"""

from __future__ import annotations

import argparse
import json
import os
import shlex
import subprocess
import sys
import tempfile
from pathlib import Path

from .core import Join
from .encoder import EncodingInput, count_constraints, emit, encode, encode_cubic, encode_quadratic, equisat_check
from .errors import MalformedRf, ParseError, PreconditionError
from .lfp import lfp_query
from .memory import check_axioms, find_races, lift_rf, sc_relaxed_restrict, with_initializers
from .program import enumerate_closure, prog_refines
from .refine import emit_cnf, find_morphism
from .textio import dump_ps, load_prog, load_ps, load_rf

OUT_DIR_ENV = "POMCKA_OUT_DIR"

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_PRECONDITION = 0, 1, 2, 3


class _Report:
    def __init__(self, as_json: bool) -> None:
        self.as_json = as_json
        self.data: dict = {}
        self.lines: list[str] = []

    def line(self, text: str) -> None:
        self.lines.append(text)

    def flush(self) -> None:
        if self.as_json:
            print(json.dumps(self.data, indent=2, sort_keys=True))
        else:
            for text in self.lines:
                print(text)


def _verdict(ok: bool) -> int:
    return EXIT_OK if ok else EXIT_FAIL


def cmd_refine(args, rep: _Report) -> int:
    x, y = load_ps(args.x), load_ps(args.y)
    m = find_morphism(x, y, args.method)
    rep.data.update(refines=m is not None, method=args.method)
    rep.line(f"{args.x} {'refines' if m else 'does not refine'} {args.y} ({args.method})")
    if m is not None and args.witness:
        rep.data["witness"] = dict(m.pairs())
        for src, dst in m.pairs():
            rep.line(f"  {src} -> {dst}")
    if args.cnf:
        inst = emit_cnf(x, y)
        Path(args.cnf).write_text(inst.to_dimacs(), encoding="utf-8")
        Path(args.cnf + ".map").write_text(inst.variable_map(), encoding="utf-8")
        rep.data["cnf"] = args.cnf
    return _verdict(m is not None)


def cmd_prog_refine(args, rep: _Report) -> int:
    X, Y = load_prog(args.X), load_prog(args.Y)
    ok = prog_refines(X, Y)
    rep.data["refines"] = ok
    rep.line(f"{args.X} {'⊆' if ok else '⊄'} {args.Y}")
    return _verdict(ok)


def cmd_lfp_refine(args, rep: _Report) -> int:
    X, Y = load_prog(args.X), load_prog(args.Y)
    q = lfp_query(X, Y, args.join)
    rep.data.update(n=q.n, l_x=q.l_x, l_y=q.l_y, join=q.join.value, refines=q.verdict)
    rep.line(f"n={q.n} l_X={q.l_x} l_Y={q.l_y}")
    rep.line(f"verdict: {'holds' if q.verdict else 'fails'}")
    return _verdict(q.verdict)


def _print_strings(strings, rep: _Report) -> None:
    rep.data["strings"] = [dump_ps(s) for s in strings]
    for i, s in enumerate(strings):
        rep.line(f"# string {i}")
        rep.line(dump_ps(s).rstrip("\n"))


def cmd_closure(args, rep: _Report) -> int:
    strings = enumerate_closure(load_prog(args.X), args.max_events)
    rep.data["count"] = len(strings)
    rep.line(f"{len(strings)} strings up to isomorphism")
    _print_strings(strings, rep)
    return EXIT_OK


def cmd_restrict(args, rep: _Report) -> int:
    strings = sc_relaxed_restrict(load_prog(args.X), args.max_events)
    rep.data["count"] = len(strings)
    rep.line(f"{len(strings)} SC-relaxed strings up to isomorphism")
    _print_strings(strings, rep)
    return EXIT_OK


def cmd_axioms(args, rep: _Report) -> int:
    x = load_ps(args.ps)
    rf = load_rf(args.rf, x)
    if args.init:
        x2, inits = with_initializers(x)
        rf = lift_rf(x, rf, inits)
        x = x2
    report = check_axioms(x, rf, args.scope)
    rep.data.update(report.to_dict(x))
    for flag in ("sw", "wc", "fr", "weak_rc", "strong_rc", "sc_relaxed"):
        rep.line(f"{flag}: {'ok' if getattr(report, flag) else 'violated'}")
    for w in report.to_dict(x)["witnesses"]:
        rep.line("  witness: " + " ".join(str(v) for v in w))
    return _verdict(report.sw and report.wc and report.fr)


def cmd_races(args, rep: _Report) -> int:
    x = load_ps(args.ps)
    races = find_races(x)
    rep.data["races"] = [[x.name(a), x.name(b)] for a, b in races]
    for a, b in races:
        rep.line(f"race: {x.name(a)} ({x.labels[a]}) || {x.name(b)} ({x.labels[b]})")
    if not races:
        rep.line("no races")
    return _verdict(not races)


def _run_solver(solver: str, script: Path) -> str:
    cmd = shlex.split(solver) + [str(script)]
    proc = subprocess.run(cmd, capture_output=True, text=True, check=False)
    words = proc.stdout.split()
    if not words or words[0] not in ("sat", "unsat", "unknown"):
        raise RuntimeError(f"solver produced no verdict: {proc.stdout.strip() or proc.stderr.strip()}")
    return words[0]


def _output_path(args, suffix: str) -> Path | None:
    if args.output:
        return Path(args.output)
    out_dir = os.environ.get(OUT_DIR_ENV)
    if out_dir:
        return Path(out_dir) / f"{Path(args.ps).stem}.{args.encoding}.{suffix}"
    return None


def cmd_encode(args, rep: _Report) -> int:
    f = encode(load_ps(args.ps), args.encoding, init=not args.no_init)
    data = emit(f, args.format)
    out = _output_path(args, "smt2" if args.format == "smt2" else "txt")
    if out is not None:
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_bytes(data)
        rep.data["output"] = str(out)
        rep.line(f"wrote {out}")
    elif not args.solver:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
    rep.data["census"] = count_constraints(f).to_dict()
    if args.solver:
        if args.format != "smt2":
            raise PreconditionError("--solver needs --format smt2")
        if out is None:
            with tempfile.TemporaryDirectory() as tmp:
                script = Path(tmp) / "query.smt2"
                script.write_bytes(data)
                verdict = _run_solver(args.solver, script)
        else:
            verdict = _run_solver(args.solver, out)
        rep.data["solver"] = verdict
        rep.line(verdict)
        return _verdict(verdict == "sat")
    return EXIT_OK


def cmd_equisat(args, rep: _Report) -> int:
    inp = EncodingInput(load_ps(args.ps), init=not args.no_init)
    if args.solver:
        verdicts = {}
        with tempfile.TemporaryDirectory() as tmp:
            for name, f in (("cubic", encode_cubic(inp)), ("quadratic", encode_quadratic(inp))):
                script = Path(tmp) / f"{name}.smt2"
                script.write_bytes(emit(f, "smt2"))
                verdicts[name] = _run_solver(args.solver, script)
        ok = verdicts["cubic"] == verdicts["quadratic"]
        rep.data.update(verdicts)
        rep.line(f"cubic: {verdicts['cubic']}  quadratic: {verdicts['quadratic']}")
    else:
        ok = equisat_check(inp)
    rep.data["equisatisfiable"] = ok
    rep.line("equisatisfiable" if ok else "NOT equisatisfiable")
    return _verdict(ok)


def cmd_stats(args, rep: _Report) -> int:
    inp = EncodingInput(load_ps(args.ps), init=not args.no_init)
    for name, f in (("cubic", encode_cubic(inp)), ("quadratic", encode_quadratic(inp))):
        census = count_constraints(f)
        rep.data[name] = census.to_dict()
        counts = " ".join(f"{t}={n}" for t, n in census.counts.items())
        rep.line(f"{name}: {counts} total={sum(census.counts.values())}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pomcka", description=__doc__.splitlines()[0])
    parser.add_argument("--json", action="store_true", help="machine-readable report")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("refine", help="decide x ⊑ y for two .ps files")
    p.add_argument("x")
    p.add_argument("y")
    p.add_argument("--method", choices=("backtrack", "sat"), default="backtrack")
    p.add_argument("--witness", action="store_true", help="print the morphism from y to x")
    p.add_argument("--cnf", metavar="PATH", help="also write the DIMACS instance (and PATH.map)")
    p.set_defaults(func=cmd_refine)

    p = sub.add_parser("prog-refine", help="decide X ⊆ Y for two .prog files")
    p.add_argument("X")
    p.add_argument("Y")
    p.set_defaults(func=cmd_prog_refine)

    p = sub.add_parser("lfp-refine", help="decide X* ⊆ Y* under ; or ∥")
    p.add_argument("X")
    p.add_argument("Y")
    p.add_argument("--join", choices=[j.value for j in Join], required=True)
    p.set_defaults(func=cmd_lfp_refine)

    for name, func, text in (("closure", cmd_closure, "list the downward closure"),
                             ("restrict", cmd_restrict, "list SC-relaxed members of the closure")):
        p = sub.add_parser(name, help=text)
        p.add_argument("X")
        p.add_argument("--max-events", type=int, default=6)
        p.set_defaults(func=func)

    p = sub.add_parser("axioms", help="check memory axioms for a .ps and .rf pair")
    p.add_argument("ps")
    p.add_argument("rf")
    p.add_argument("--init", action="store_true", help="prepend initializer releases; bottom reads them")
    p.add_argument("--scope", choices=("sync", "all"), default="sync")
    p.set_defaults(func=cmd_axioms)

    p = sub.add_parser("races", help="report unordered conflicting plain accesses")
    p.add_argument("ps")
    p.set_defaults(func=cmd_races)

    p = sub.add_parser("encode", help="emit the cubic or quadratic constraint system")
    p.add_argument("ps")
    p.add_argument("--encoding", choices=("cubic", "quadratic"), default="quadratic")
    p.add_argument("--format", choices=("smt2", "text"), default="smt2")
    p.add_argument("-o", "--output")
    p.add_argument("--no-init", action="store_true", help="omit initializer releases")
    p.add_argument("--solver", help="SMT-LIB2 solver command to run on the script")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("equisat", help="check both encodings agree on satisfiability")
    p.add_argument("ps")
    p.add_argument("--no-init", action="store_true")
    p.add_argument("--solver", help="use this SMT-LIB2 solver instead of brute force")
    p.set_defaults(func=cmd_equisat)

    p = sub.add_parser("stats", help="constraint census of both encodings")
    p.add_argument("ps")
    p.add_argument("--no-init", action="store_true")
    p.set_defaults(func=cmd_stats)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    rep = _Report(args.json)
    try:
        code = args.func(args, rep)
    except (ParseError, MalformedRf) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except PreconditionError as exc:
        print(f"precondition violated: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except (OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    rep.flush()
    return code


if __name__ == "__main__":
    sys.exit(main())
