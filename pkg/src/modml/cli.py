"""Command-line driver: ``modml check|elab|run|model|test-corpus``.

Exit codes: 0 success, 1 static error, 2 runtime error, 3 model-check
failure, 64 usage error.  ``--json`` prints one JSON document whose shape
is given by ``SCHEMAS``.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from modml import equality
from modml.errors import ModmlError
from modml.pretty import pretty
from modml.runtime import EXIT_OK, EXIT_STATIC, EXIT_STUCK, run_elaborated, to_json
from modml.syntax import Context

EXIT_MODEL, EXIT_USAGE = 3, 64


# -- JSON schemas of --json output ---------------------------------------------------

_ERROR = {
    "type": ["object", "null"],
    "required": ["code", "message", "span"],
    "properties": {"code": {"type": "string"}, "message": {"type": "string"},
                   "span": {"type": ["array", "null"], "items": {"type": "integer"}}},
}
_DECL = {
    "type": "object",
    "required": ["name", "classifier", "sort", "opaque"],
    "properties": {"name": {"type": "string"}, "classifier": {"type": "string"},
                   "sort": {"enum": ["TP", "KIND", "SIG"]}, "opaque": {"type": "boolean"},
                   "kernel": {"type": "string"}, "normal_form": {"type": "string"}},
}
_EQ = {
    "type": "object",
    "required": ["lhs", "rhs", "equal"],
    "properties": {"lhs": {"type": "string"}, "rhs": {"type": "string"}, "equal": {"type": "boolean"}},
}
SCHEMAS = {
    "check": {
        "type": "object",
        "required": ["command", "path", "ok", "exit", "decls", "error"],
        "properties": {"command": {"const": "check"}, "path": {"type": "string"}, "ok": {"type": "boolean"},
                       "exit": {"type": "integer"}, "decls": {"type": "array", "items": _DECL},
                       "error": _ERROR, "equalities": {"type": "array", "items": _EQ}},
    },
    "elab": {
        "type": "object",
        "required": ["command", "path", "ok", "exit", "decls", "error"],
        "properties": {"command": {"const": "elab"}, "path": {"type": "string"}, "ok": {"type": "boolean"},
                       "exit": {"type": "integer"}, "decls": {"type": "array", "items": _DECL},
                       "ast": {"type": "array", "items": {"type": "object", "required": ["node"]}}, "error": _ERROR},
    },
    "run": {
        "type": "object",
        "required": ["command", "path", "exit", "entry", "value", "transcript", "store", "error"],
        "properties": {
            "command": {"const": "run"}, "path": {"type": "string"}, "exit": {"type": "integer"},
            "entry": {"type": ["string", "null"]},
            "transcript": {"type": "array", "items": {"type": "object", "required": ["op", "args"]}},
            "store": {"type": "object"}, "error": _ERROR,
        },
    },
    "model": {
        "type": "object",
        "required": ["command", "path", "fixture", "ok", "exit", "checks"],
        "properties": {
            "command": {"const": "model"}, "path": {"type": "string"}, "fixture": {"type": "string"},
            "ok": {"type": "boolean"}, "exit": {"type": "integer"},
            "checks": {"type": "array", "items": {
                "type": "object", "required": ["check", "passed", "details", "seconds"],
                "properties": {"check": {"type": "string"}, "passed": {"type": "boolean"},
                               "details": {"type": "array"}, "seconds": {"type": "number"}}}},
        },
    },
    "test-corpus": {
        "type": "object",
        "required": ["command", "dir", "ok", "exit", "files", "failed"],
        "properties": {
            "command": {"const": "test-corpus"}, "dir": {"type": "string"}, "ok": {"type": "boolean"},
            "exit": {"type": "integer"}, "failed": {"type": "integer"},
            "files": {"type": "array", "items": {
                "type": "object", "required": ["path", "ok", "problems"],
                "properties": {"path": {"type": "string"}, "ok": {"type": "boolean"},
                               "problems": {"type": "array", "items": {"type": "string"}}}}},
        },
    },
}


# -- shared helpers -------------------------------------------------------------------


def _elaborate(path: Path):
    from modml.surface.elab import elaborate
    from modml.surface.parser import parse

    decls = parse(path.read_text())
    return decls, elaborate(decls)


def decl_rows(result, kernel: bool = False, normal: bool = False) -> list[dict]:
    """Name, classifier and sort of every declaration (optionally its kernel term and normal form)."""
    rows = []
    entries = result.context.entries
    for i, d in enumerate(result.decls):
        names = [e.name for e in entries[:i]]
        row = {"name": d.name, "classifier": pretty(d.type, names), "sort": d.sort.name, "opaque": d.opaque}
        if kernel and d.term is not None:
            row["kernel"] = pretty(d.term, names)
        if normal and d.term is not None:
            nf = equality.normalize(Context(entries[:i]), d.term, d.type)
            row["normal_form"] = pretty(nf, names)
        rows.append(row)
    return rows


def parse_flags(pairs: list) -> dict:
    flags = {}
    for p in pairs or []:
        name, sep, val = p.partition("=")
        if not sep or val.lower() not in ("true", "false"):
            raise _Usage(f"--flag expects NAME=true|false, got {p!r}")
        flags[name] = val.lower() == "true"
    return flags


class _Usage(Exception):
    pass


def _emit(args, payload: dict, human: str) -> None:
    if args.json:
        print(json.dumps(payload, indent=2, sort_keys=True))
    elif human:
        print(human)


# -- subcommands ----------------------------------------------------------------------


def cmd_check(args) -> int:
    path = Path(args.file)
    trace: Optional[list] = [] if args.trace_equality else None
    equality.TRACE = trace
    payload = {"command": "check", "path": str(path), "ok": False, "exit": EXIT_STATIC, "decls": [], "error": None}
    try:
        _, result = _elaborate(path)
        payload.update(ok=True, exit=EXIT_OK, decls=decl_rows(result, normal=args.normal_forms))
        lines = [f"{r['name']} : {r['classifier']}  ({r['sort']}{', opaque' if r['opaque'] else ''})"
                 for r in payload["decls"]]
        lines.append(f"ok: {len(payload['decls'])} declarations")
    except ModmlError as err:
        payload["error"] = err.to_json()
        lines = [f"{path}: {err}"]
    finally:
        equality.TRACE = None
    if trace is not None:
        payload["equalities"] = [
            {"lhs": pretty(a, names), "rhs": pretty(b, names), "equal": same} for names, a, b, same in trace
        ]
        lines += [f"  {'≡' if e['equal'] else '≢'} {e['lhs']}  ~  {e['rhs']}" for e in payload["equalities"]]
    _emit(args, payload, "\n".join(lines))
    return payload["exit"]


def cmd_elab(args) -> int:
    path = Path(args.file)
    payload = {"command": "elab", "path": str(path), "ok": False, "exit": EXIT_STATIC, "decls": [], "error": None}
    lines = []
    try:
        surface, result = _elaborate(path)
        payload.update(ok=True, exit=EXIT_OK, decls=decl_rows(result, kernel=True))
        if args.emit_ast:
            from modml.surface.ast import to_json as ast_json

            payload["ast"] = [ast_json(d) for d in surface]
            lines += [json.dumps(d) for d in payload["ast"]]
        if args.emit_kernel or not args.emit_ast:
            for r in payload["decls"]:
                lines.append(f"{r['name']} : {r['classifier']}")
                if "kernel" in r:
                    lines.append(f"  = {r['kernel']}")
    except ModmlError as err:
        payload["error"] = err.to_json()
        lines = [f"{path}: {err}"]
    _emit(args, payload, "\n".join(lines))
    return payload["exit"]


def cmd_run(args) -> int:
    path = Path(args.file)
    flags = parse_flags(args.flag)
    try:
        _, result = _elaborate(path)
    except ModmlError as err:
        payload = {"command": "run", "path": str(path), "exit": EXIT_STATIC, "entry": None, "value": None,
                   "transcript": [], "store": {}, "error": err.to_json()}
        _emit(args, payload, f"{path}: {err}")
        return EXIT_STATIC
    report = run_elaborated(result, flags, args.entry, args.fuel)
    payload = {"command": "run", "path": str(path), **report.to_json()}
    _emit(args, payload, report.render())
    return report.exit_code


def cmd_model(args) -> int:
    from modml.model.fixtures import FixtureError, load_fixture, run_fixture

    path = Path(args.fixture)
    try:
        fx = load_fixture(path)
        if args.fuel is not None:
            fx.universe.fuel = args.fuel
        results = run_fixture(fx, args.check)
    except (FixtureError, OSError) as err:
        raise _Usage(str(err)) from err
    ok = all(r.passed for r in results)
    code = EXIT_OK if ok else EXIT_MODEL
    payload = {"command": "model", "path": str(path), "fixture": fx.name, "ok": ok, "exit": code,
               "checks": [r.to_json() for r in results]}
    lines = [f"{'PASS' if r.passed else 'FAIL'} {r.name} ({r.seconds:.2f}s)" for r in results]
    _emit(args, payload, "\n".join(lines))
    return code


def cmd_test_corpus(args) -> int:
    summary = run_corpus(Path(args.dir))
    code = EXIT_OK if summary.ok else EXIT_STATIC
    payload = {"command": "test-corpus", "dir": args.dir, "ok": summary.ok, "exit": code,
               "failed": summary.failed, "files": [f.to_json() for f in summary.files]}
    _emit(args, payload, summary.render())
    return code


# -- golden corpus ---------------------------------------------------------------------


@dataclass
class FileResult:
    path: str
    problems: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.problems

    def to_json(self) -> dict:
        return {"path": self.path, "ok": self.ok, "problems": self.problems}


@dataclass
class CorpusSummary:
    files: list = field(default_factory=list)

    @property
    def failed(self) -> int:
        return sum(not f.ok for f in self.files)

    @property
    def ok(self) -> bool:
        return self.failed == 0

    def render(self) -> str:
        lines = [f"{'ok  ' if f.ok else 'FAIL'} {f.path}" for f in self.files]
        for f in self.files:
            lines += [f"  {f.path}: {p}" for p in f.problems]
        lines.append(f"{len(self.files)} files, {self.failed} failed")
        return "\n".join(lines)


def check_expectations(path: Path, expect: dict) -> list[str]:
    """Compare one source file against its parsed ``.expect`` sidecar."""
    from modml.surface.elab import elaborate_source

    problems = []
    try:
        result = elaborate_source(path.read_text())
    except ModmlError as err:
        if expect.get("status") != "error":
            return [f"unexpected static error {err}"]
        if "error_code" in expect and err.code != expect["error_code"]:
            problems.append(f"error code {err.code}, expected {expect['error_code']}")
        return problems
    if expect.get("status") == "error":
        return [f"expected {expect.get('error_code', 'an error')} but the file checks"]
    rows = {r["name"]: r for r in decl_rows(result, normal="normal_forms" in expect)}
    for name, want in expect.get("decls", {}).items():
        row = rows.get(name)
        if row is None:
            problems.append(f"missing declaration {name}")
            continue
        for key in ("classifier", "sort", "opaque"):
            if key in want and row[key] != want[key]:
                problems.append(f"{name}.{key} = {row[key]!r}, expected {want[key]!r}")
    for name, nf in expect.get("normal_forms", {}).items():
        got = rows.get(name, {}).get("normal_form")
        if got != nf:
            problems.append(f"normal form of {name} = {got!r}, expected {nf!r}")
    for run in expect.get("runs", []):
        report = run_elaborated(result, run.get("flags", {}), run.get("entry"))
        tag = f"run{run.get('flags', {})}"
        if report.exit_code != run.get("exit", EXIT_OK):
            problems.append(f"{tag}: exit {report.exit_code} ({report.error}), expected {run.get('exit', 0)}")
        if "value" in run and to_json(report.value) != run["value"]:
            problems.append(f"{tag}: value {to_json(report.value)!r}, expected {run['value']!r}")
        if "transcript" in run:
            got = [[op, args] for op, args in report.transcript]
            if got != run["transcript"]:
                problems.append(f"{tag}: transcript {got}, expected {run['transcript']}")
    return problems


def run_corpus(directory: Path) -> CorpusSummary:
    """Run every ``.mml`` file of ``directory`` (sorted by path) against its sidecar."""
    summary = CorpusSummary()
    for path in sorted(directory.glob("*.mml")):
        res = FileResult(str(path))
        sidecar = path.with_suffix(".expect")
        if not sidecar.exists():
            res.problems.append("missing .expect sidecar")
        else:
            try:
                res.problems = check_expectations(path, json.loads(sidecar.read_text()))
            except json.JSONDecodeError as err:
                res.problems.append(f"malformed sidecar: {err}")
            except Exception as err:  # one broken file must not stop the run
                res.problems.append(f"internal error {type(err).__name__}: {err}")
        summary.files.append(res)
    return summary


# -- argument parsing --------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _Usage(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="modml", description="Modal ML: check, elaborate and run programs; test the PER model.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    def common(sp):
        sp.add_argument("--json", action="store_true", help="print a machine-readable report")

    c = sub.add_parser("check", help="elaborate and kernel-check a program")
    c.add_argument("file")
    c.add_argument("--trace-equality", action="store_true", help="log every definitional equality test")
    c.add_argument("--normal-forms", action="store_true", help="include normal forms of declarations")
    common(c)

    e = sub.add_parser("elab", help="print the elaborated kernel terms")
    e.add_argument("file")
    e.add_argument("--emit-kernel", action="store_true")
    e.add_argument("--emit-ast", action="store_true")
    common(e)

    r = sub.add_parser("run", help="check and run a program")
    r.add_argument("file")
    r.add_argument("--flag", action="append", metavar="NAME=BOOL", help="environment flag for getEnvFlag")
    r.add_argument("--fuel", type=int, default=None, help="evaluation step budget")
    r.add_argument("--entry", default=None, help="declaration to run (default: main, else the last)")
    common(r)

    m = sub.add_parser("model", help="run named checks on a .fixture.json model fixture")
    m.add_argument("fixture")
    m.add_argument("--check", action="append", help="check to run (repeatable; default: the fixture's list)")
    m.add_argument("--fuel", type=int, default=None)
    common(m)

    t = sub.add_parser("test-corpus", help="run a directory of .mml files against .expect sidecars")
    t.add_argument("dir")
    common(t)
    return p


COMMANDS = {"check": cmd_check, "elab": cmd_elab, "run": cmd_run, "model": cmd_model, "test-corpus": cmd_test_corpus}


def main(argv: Optional[list] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return COMMANDS[args.command](args)
    except _Usage as err:
        print(parser.format_usage().rstrip(), file=sys.stderr)
        print(f"modml: error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except FileNotFoundError as err:
        print(f"modml: error: {err}", file=sys.stderr)
        return EXIT_USAGE


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
