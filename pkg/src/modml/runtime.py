"""Call-by-value interpreter for closed, checked kernel terms.

Types are erased to a single placeholder.  Effectful primitives evaluate to
suspended computations which ``perform`` runs left to right against a
``Store``; only ``Io.trace`` writes to the transcript.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Optional

from modml.builtins import CONSTANTS
from modml.errors import FuelExhausted, ModmlError, Stuck
from modml.syntax import (
    Ann, App, BaseType, Bind, Const, Context, EffPrim, EffType, Eta, Fst, If, Lam, Lit, Mod, Pair, Pi,
    RefType, Sigma, Singleton, Snd, SortConst, Term, Var,
)


class _Type:
    def __repr__(self) -> str:
        return "<type>"


TYPE = _Type()


@dataclass(frozen=True)
class RPair:
    fst: Any
    snd: Any


@dataclass(frozen=True)
class Closure:
    env: tuple
    body: Term
    name: str = "x"


@dataclass(frozen=True)
class Package:
    """Runtime value of a package ``η u``."""

    value: Any


@dataclass(frozen=True)
class RefCell:
    address: int


@dataclass(frozen=True)
class Computation:
    """A suspended effectful primitive with evaluated arguments."""

    op: str
    args: tuple


@dataclass(frozen=True)
class BuiltinVal:
    name: str
    args: tuple = ()


@dataclass
class Store:
    heap: dict = field(default_factory=dict)
    env_flags: dict = field(default_factory=dict)
    transcript: list = field(default_factory=list)
    next_address: int = 0

    def alloc(self, v) -> RefCell:
        addr = self.next_address
        self.next_address += 1
        self.heap[addr] = v
        return RefCell(addr)

    def summary(self) -> dict:
        return {
            "cells": len(self.heap),
            "heap": {str(k): to_json(v) for k, v in sorted(self.heap.items())},
            "flags": dict(sorted(self.env_flags.items())),
        }


class Machine:
    def __init__(self, flags: Optional[dict] = None, fuel: Optional[int] = None):
        self.store = Store(env_flags=dict(flags or {}))
        self.fuel = fuel

    def _tick(self):
        if self.fuel is not None:
            self.fuel -= 1
            if self.fuel < 0:
                raise FuelExhausted("evaluation step budget exhausted")

    def eval(self, env: tuple, t: Term):
        self._tick()
        match t:
            case Var(i):
                if i >= len(env):
                    raise Stuck(f"unbound variable #{i} at runtime")
                return env[-1 - i]
            case SortConst() | BaseType() | Pi() | Sigma() | Mod() | EffType() | RefType() | Singleton():
                return TYPE
            case Lam(body, name):
                return Closure(env, body, name)
            case App(f, a):
                return self.apply(self.eval(env, f), self.eval(env, a))
            case Pair(a, b):
                return RPair(self.eval(env, a), self.eval(env, b))
            case Fst(p):
                return self._proj(self.eval(env, p), True)
            case Snd(p):
                return self._proj(self.eval(env, p), False)
            case Eta(a):
                return Package(self.eval(env, a))
            case Bind(u, _, body, _):
                pkg = self.eval(env, u)
                if not isinstance(pkg, Package):
                    raise Stuck(f"bind on a non-package value {pkg!r}")
                return self.eval(env + (pkg.value,), body)
            case Const(name):
                if name not in CONSTANTS:
                    raise Stuck(f"unknown constant {name}")
                return BuiltinVal(name)
            case Lit(v):
                return v
            case EffPrim(name, args):
                return Computation(name, tuple(self.eval(env, a) for a in args))
            case Ann(inner, _):
                return self.eval(env, inner)
            case If(c, a, b):
                cv = self.eval(env, c)
                if not isinstance(cv, bool):
                    raise Stuck(f"if on a non-boolean {cv!r}")
                return self.eval(env, a if cv else b)
        raise Stuck(f"cannot evaluate {t!r}")

    def _proj(self, p, first: bool):
        if not isinstance(p, RPair):
            raise Stuck(f"projection from a non-pair {p!r}")
        return p.fst if first else p.snd

    def apply(self, f, a):
        match f:
            case Closure(env, body, _):
                return self.eval(env + (a,), body)
            case BuiltinVal(name, args):
                b = CONSTANTS[name]
                args = args + (a,)
                if len(args) < b.arity:
                    return BuiltinVal(name, args)
                out = b.impl(*(_plain(x) for x in args))
                if out is None:
                    raise Stuck(f"{name} applied to bad arguments {args!r}")
                return out
        raise Stuck(f"application of a non-function {f!r}")

    def perform(self, c):
        """Run a computation to its result, threading the store."""
        if not isinstance(c, Computation):
            raise Stuck(f"expected a computation, got {c!r}")
        self._tick()
        s = self.store
        match c.op, c.args:
            case "Eff.return", (v,):
                return v
            case "Eff.bind", (m, k):
                return self.perform(self.apply(k, self.perform(m)))
            case "Ref.new", (v,):
                return s.alloc(v)
            case "Ref.get", (RefCell(addr),):
                return s.heap[addr]
            case "Ref.set", (RefCell(addr), v):
                s.heap[addr] = v
                return ()
            case "getEnvFlag", (name,):
                return bool(s.env_flags.get(name, False))
            case "Io.trace", (op, v):
                s.transcript.append((op, to_json(v)))
                return ()
        raise Stuck(f"bad computation {c.op} {c.args!r}")


def _plain(v):
    """Builtins see pairs as Python tuples."""
    if isinstance(v, RPair):
        return (_plain(v.fst), _plain(v.snd))
    return v


def to_json(v):
    match v:
        case bool() | int() | str():
            return v
        case ():
            return None
        case RPair(a, b):
            return [to_json(a), to_json(b)]
        case Package(inner):
            return {"package": to_json(inner)}
        case RefCell(addr):
            return {"ref": addr}
        case Closure() | BuiltinVal():
            return "<fn>"
        case Computation():
            return "<computation>"
    return "<type>"


def evaluate(t: Term, env: tuple = (), flags: Optional[dict] = None, fuel: Optional[int] = None):
    """Evaluate a closed term; computations are run.  Returns ``(value, store)``."""
    m = Machine(flags, fuel)
    v = m.eval(env, t)
    if isinstance(v, Computation):
        v = m.perform(v)
    return v, m.store


# -- whole programs -------------------------------------------------------------


EXIT_OK, EXIT_STATIC, EXIT_STUCK = 0, 1, 2


@dataclass
class RunReport:
    entry: Optional[str] = None
    value: Any = None
    transcript: list = field(default_factory=list)
    store: dict = field(default_factory=dict)
    exit_code: int = EXIT_OK
    error: Optional[ModmlError] = None

    def to_json(self) -> dict:
        return {
            "entry": self.entry,
            "value": to_json(self.value),
            "transcript": [{"op": op, "args": args} for op, args in self.transcript],
            "store": self.store,
            "exit": self.exit_code,
            "error": None if self.error is None else self.error.to_json(),
        }

    def transcript_jsonl(self) -> str:
        return "".join(json.dumps({"op": op, "args": args}) + "\n" for op, args in self.transcript)

    def render(self) -> str:
        if self.error is not None:
            return f"error: {self.error}"
        lines = [f"{self.entry} = {json.dumps(to_json(self.value))}"]
        lines.append(f"store: {self.store.get('cells', 0)} cells, transcript: {len(self.transcript)} lines")
        lines += self.transcript_jsonl().splitlines()
        return "\n".join(lines)


def run_elaborated(result, flags: Optional[dict] = None, entry: Optional[str] = None,
                   fuel: Optional[int] = None) -> RunReport:
    """Evaluate every declaration in order, then run the entry point's computation."""
    from modml.equality import normalize_type

    if not result.decls:
        return RunReport(store=Store(env_flags=dict(flags or {})).summary())
    names = [d.name for d in result.decls]
    target = entry or ("main" if "main" in names else names[-1])
    m = Machine(flags, fuel)
    env: tuple = ()
    report = RunReport(entry=target)
    try:
        value = None
        prefix_len = 0
        for d in result.decls:
            v = TYPE if d.term is None else m.eval(env, d.term)
            env += (v,)
            prefix_len += 1
            if d.name == target:
                value = v
                ctx_prefix = Context(result.context.entries[:prefix_len - 1])
                if isinstance(normalize_type(ctx_prefix, d.type), EffType):
                    value = m.perform(value)
        report.value = value
    except ModmlError as err:
        report.error = err
        report.exit_code = EXIT_STUCK
    report.transcript = list(m.store.transcript)
    report.store = m.store.summary()
    return report


def run_program(source: str, flags: Optional[dict] = None, entry: Optional[str] = None,
                fuel: Optional[int] = None) -> RunReport:
    """Parse, elaborate, check and run a program given as source text."""
    from modml.surface.elab import elaborate_source

    try:
        result = elaborate_source(source)
    except ModmlError as err:
        return RunReport(exit_code=EXIT_STATIC, error=err)
    return run_elaborated(result, flags, entry, fuel)
