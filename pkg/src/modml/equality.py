"""Definitional equality by normalization by evaluation.

Evaluation computes Π-, Σ- and ○-redexes (``bind x = η a in v`` to ``v a``),
reassociates nested binds eagerly and pushes eliminations through neutral
binds.  Read-back is classifier directed: it η-expands at Π and Σ, collapses
inhabitants of singleton kinds to their definition, and applies the two
decidable consequences of ○-ext, ``bind x = u in η x ⇒ u`` and
``bind x = u in c ⇒ c`` when ``x`` does not occur in ``c``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

from modml.builtins import CONSTANTS
from modml.syntax import (
    Ann, App, BaseType, Bind, Const, Context, EffPrim, EffType, Eta, Fst, If, Lam, Lit,
    Mod, Pair, Pi, RefType, Sigma, Singleton, Snd, Sort, SortConst, Term, Var, free_in,
    shift,
)


class Value:
    __slots__ = ()


class Neutral:
    __slots__ = ()


@dataclass(frozen=True, eq=False)
class Clo:
    env: tuple
    body: Term
    name: str = "x"

    def __call__(self, v: Value) -> Value:
        return evaluate(self.env + (v,), self.body)


@dataclass(frozen=True, eq=False)
class PyClo:
    fn: Callable[[Value], Value]
    name: str = "x"

    def __call__(self, v: Value) -> Value:
        return self.fn(v)


@dataclass(frozen=True, eq=False)
class VLam(Value):
    clo: Clo


@dataclass(frozen=True, eq=False)
class VPi(Value):
    dom: Value
    clo: Clo


@dataclass(frozen=True, eq=False)
class VSigma(Value):
    dom: Value
    clo: Clo


@dataclass(frozen=True, eq=False)
class VPair(Value):
    fst: Value
    snd: Value


@dataclass(frozen=True, eq=False)
class VEta(Value):
    arg: Value


@dataclass(frozen=True, eq=False)
class VSort(Value):
    sort: Sort


@dataclass(frozen=True, eq=False)
class VBase(Value):
    name: str


@dataclass(frozen=True, eq=False)
class VMod(Value):
    arg: Value


@dataclass(frozen=True, eq=False)
class VSingleton(Value):
    of: Value


@dataclass(frozen=True, eq=False)
class VEff(Value):
    arg: Value


@dataclass(frozen=True, eq=False)
class VRef(Value):
    arg: Value


@dataclass(frozen=True, eq=False)
class VLit(Value):
    value: object


@dataclass(frozen=True, eq=False)
class VEffPrim(Value):
    name: str
    args: tuple


@dataclass(frozen=True, eq=False)
class VNeu(Value):
    ne: Neutral


@dataclass(frozen=True, eq=False)
class NVar(Neutral):
    level: int


@dataclass(frozen=True, eq=False)
class NConst(Neutral):
    name: str


@dataclass(frozen=True, eq=False)
class NApp(Neutral):
    fn: Neutral
    arg: Value


@dataclass(frozen=True, eq=False)
class NFst(Neutral):
    arg: Neutral


@dataclass(frozen=True, eq=False)
class NSnd(Neutral):
    arg: Neutral


@dataclass(frozen=True, eq=False)
class NBind(Neutral):
    """A bind chain; the scrutinee is never itself an ``NBind``."""

    scrutinee: Neutral
    motive: Optional[Value]
    cont: Callable[[Value], Value]


@dataclass(frozen=True, eq=False)
class NIf(Neutral):
    cond: Neutral
    then: Value
    else_: Value


# -- evaluation ---------------------------------------------------------------


def evaluate(env: tuple, t: Term) -> Value:
    match t:
        case Var(i):
            return env[len(env) - 1 - i]
        case SortConst(s):
            return VSort(s)
        case BaseType(n):
            return VBase(n)
        case Lit(v):
            return VLit(v)
        case Const(n):
            return VNeu(NConst(n))
        case Pi(dom, cod, name):
            return VPi(evaluate(env, dom), Clo(env, cod, name))
        case Sigma(dom, cod, name):
            return VSigma(evaluate(env, dom), Clo(env, cod, name))
        case Lam(body, name):
            return VLam(Clo(env, body, name))
        case App(f, a):
            return vapp(evaluate(env, f), evaluate(env, a))
        case Pair(a, b):
            return VPair(evaluate(env, a), evaluate(env, b))
        case Fst(p):
            return vfst(evaluate(env, p))
        case Snd(p):
            return vsnd(evaluate(env, p))
        case Mod(a):
            return VMod(evaluate(env, a))
        case Eta(a):
            return VEta(evaluate(env, a))
        case Bind(u, motive, body, name):
            c = None if motive is None else evaluate(env, motive)
            return vbind(evaluate(env, u), c, Clo(env, body, name))
        case Singleton(a):
            return VSingleton(evaluate(env, a))
        case EffType(a):
            return VEff(evaluate(env, a))
        case RefType(a):
            return VRef(evaluate(env, a))
        case EffPrim(name, args):
            return VEffPrim(name, tuple(evaluate(env, a) for a in args))
        case Ann(tm, _):
            return evaluate(env, tm)
        case If(c, a, b):
            return vif(evaluate(env, c), evaluate(env, a), evaluate(env, b))
    raise TypeError(f"cannot evaluate {t!r}")


def _to_python(v: Value):
    if isinstance(v, VLit):
        return v.value
    if isinstance(v, VPair):
        a, b = _to_python(v.fst), _to_python(v.snd)
        if a is _STUCK or b is _STUCK:
            return _STUCK
        return (a, b)
    return _STUCK


_STUCK = object()


def _delta(ne: Neutral) -> Value:
    args = []
    head = ne
    while isinstance(head, NApp):
        args.append(head.arg)
        head = head.fn
    if isinstance(head, NConst) and head.name in CONSTANTS:
        b = CONSTANTS[head.name]
        if len(args) == b.arity:
            py = [_to_python(a) for a in reversed(args)]
            if all(p is not _STUCK for p in py):
                out = b.impl(*py)
                if out is not None:
                    return VLit(out)
    return VNeu(ne)


def vapp(f: Value, a: Value) -> Value:
    if isinstance(f, VLam):
        return f.clo(a)
    if isinstance(f, VNeu):
        ne = f.ne
        if isinstance(ne, NBind) and isinstance(ne.motive, VPi):
            k = ne.cont
            return VNeu(NBind(ne.scrutinee, ne.motive.clo(a), PyClo(lambda x: vapp(k(x), a), _cont_name(k))))
        return _delta(NApp(ne, a))
    raise TypeError(f"applying a non-function {f!r}")


def vfst(p: Value) -> Value:
    if isinstance(p, VPair):
        return p.fst
    if isinstance(p, VNeu):
        ne = p.ne
        if isinstance(ne, NBind) and isinstance(ne.motive, VSigma):
            k = ne.cont
            return VNeu(NBind(ne.scrutinee, ne.motive.dom, PyClo(lambda x: vfst(k(x)), _cont_name(k))))
        return VNeu(NFst(ne))
    raise TypeError(f"projecting from a non-pair {p!r}")


def vsnd(p: Value) -> Value:
    if isinstance(p, VPair):
        return p.snd
    if isinstance(p, VNeu):
        ne = p.ne
        if isinstance(ne, NBind) and isinstance(ne.motive, VSigma):
            k = ne.cont
            motive = ne.motive.clo(vfst(p))
            return VNeu(NBind(ne.scrutinee, motive, PyClo(lambda x: vsnd(k(x)), _cont_name(k))))
        return VNeu(NSnd(ne))
    raise TypeError(f"projecting from a non-pair {p!r}")


def vbind(u: Value, motive: Optional[Value], k: Callable[[Value], Value]) -> Value:
    if isinstance(u, VEta):
        return k(u.arg)
    if isinstance(u, VNeu):
        ne = u.ne
        if isinstance(ne, NBind):
            inner = ne.cont
            return VNeu(NBind(ne.scrutinee, motive,
                              PyClo(lambda x: vbind(inner(x), motive, k), _cont_name(inner))))
        return VNeu(NBind(ne, motive, k))
    raise TypeError(f"bind on a non-package {u!r}")


def vif(c: Value, a: Value, b: Value) -> Value:
    if isinstance(c, VLit) and isinstance(c.value, bool):
        return a if c.value else b
    if isinstance(c, VNeu):
        return VNeu(NIf(c.ne, a, b))
    raise TypeError(f"branching on a non-boolean {c!r}")


def _cont_name(k) -> str:
    return getattr(k, "name", "x")


# -- read-back ----------------------------------------------------------------


def _fresh(scope: list, dom: Optional[Value]) -> Value:
    if isinstance(dom, VSingleton):
        return dom.of
    return VNeu(NVar(len(scope)))


def read_back(scope: list, v: Value, ty: Optional[Value]) -> Term:
    """Normal form of ``v`` at classifier ``ty`` (``None``: untyped)."""
    match ty:
        case VPi(dom, clo):
            x = _fresh(scope, dom)
            return Lam(read_back(scope + [dom], vapp(v, x), clo(x)), clo.name)
        case VSigma(dom, clo):
            a = vfst(v)
            return Pair(read_back(scope, a, dom), read_back(scope, vsnd(v), clo(a)))
        case VMod(inner):
            if isinstance(v, VEta):
                return Eta(read_back(scope, v.arg, inner))
        case VSingleton(of):
            return read_type(scope, of)
        case VSort(_):
            return read_type(scope, v)
    return _untyped(scope, v)


def _untyped(scope: list, v: Value) -> Term:
    match v:
        case VLit(value):
            return Lit(value)
        case VLam(clo):
            x = VNeu(NVar(len(scope)))
            return Lam(_untyped(scope + [None], clo(x)), clo.name)
        case VPair(a, b):
            return Pair(_untyped(scope, a), _untyped(scope, b))
        case VEta(a):
            return Eta(_untyped(scope, a))
        case VEffPrim(name, args):
            return EffPrim(name, tuple(_untyped(scope, a) for a in args))
        case VNeu(ne):
            return read_neutral(scope, ne)[0]
    return read_type(scope, v)


def read_type(scope: list, v: Value) -> Term:
    match v:
        case VSort(s):
            return SortConst(s)
        case VBase(n):
            return BaseType(n)
        case VPi(dom, clo):
            x = _fresh(scope, dom)
            return Pi(read_type(scope, dom), read_type(scope + [dom], clo(x)), clo.name)
        case VSigma(dom, clo):
            x = _fresh(scope, dom)
            return Sigma(read_type(scope, dom), read_type(scope + [dom], clo(x)), clo.name)
        case VMod(a):
            return Mod(read_type(scope, a))
        case VSingleton(a):
            return Singleton(read_type(scope, a))
        case VEff(a):
            return EffType(read_type(scope, a))
        case VRef(a):
            return RefType(read_type(scope, a))
        case VNeu(ne):
            return read_neutral(scope, ne)[0]
    return _untyped(scope, v)


_CONST_TYPES: dict[str, Value] = {}


def _const_type(name: str) -> Optional[Value]:
    if name not in CONSTANTS:
        return None
    if name not in _CONST_TYPES:
        _CONST_TYPES[name] = evaluate((), CONSTANTS[name].type)
    return _CONST_TYPES[name]


def read_neutral(scope: list, ne: Neutral) -> tuple[Term, Optional[Value]]:
    """Read back a neutral, returning its term and (when known) its classifier."""
    term, ty = _read_neutral(scope, ne)
    if isinstance(ty, VSingleton):
        return read_type(scope, ty.of), ty
    return term, ty


def _read_neutral(scope: list, ne: Neutral) -> tuple[Term, Optional[Value]]:
    match ne:
        case NVar(level):
            return Var(len(scope) - 1 - level), scope[level]
        case NConst(name):
            return Const(name), _const_type(name)
        case NApp(fn, arg):
            t, ty = read_neutral(scope, fn)
            if isinstance(ty, VPi):
                return App(t, read_back(scope, arg, ty.dom)), ty.clo(arg)
            return App(t, _untyped(scope, arg)), None
        case NFst(p):
            t, ty = read_neutral(scope, p)
            if isinstance(ty, VSigma):
                return Fst(t), ty.dom
            return Fst(t), None
        case NSnd(p):
            t, ty = read_neutral(scope, p)
            if isinstance(ty, VSigma):
                return Snd(t), ty.clo(vfst(VNeu(p)))
            return Snd(t), None
        case NIf(c, a, b):
            t, _ = read_neutral(scope, c)
            return If(t, _untyped(scope, a), _untyped(scope, b)), None
        case NBind(u, motive, k):
            t, ty = read_neutral(scope, u)
            inner = ty.arg if isinstance(ty, VMod) else None
            x = _fresh(scope, inner)
            body = read_back(scope + [inner], k(x), motive)
            # bind-η, up to the η-long form of the returned package
            if body == Eta(Var(0)) or (motive is not None and body == read_back(scope + [inner], VEta(x), motive)):
                return t, motive
            if not free_in(body, 0):
                return shift(body, -1), motive
            c = None if motive is None else read_type(scope, motive)
            return Bind(t, c, body, _cont_name(k)), motive
    raise TypeError(f"not a neutral {ne!r}")


# -- contexts -----------------------------------------------------------------


def context_env(ctx: Context) -> tuple[tuple, list]:
    """Evaluation environment and per-level classifier values for ``ctx``."""
    if ctx._env is not None:
        return ctx._env, ctx._types
    if not ctx.entries:
        ctx._env, ctx._types = (), []
        return ctx._env, ctx._types
    parent = ctx._parent
    if parent is None or len(parent) != len(ctx) - 1:
        parent = Context(ctx.entries[:-1])
    env, types = context_env(parent)
    entry = ctx.entries[-1]
    ty = evaluate(env, entry.type)
    if entry.value is not None:
        v = evaluate(env, entry.value)
    elif isinstance(ty, VSingleton):
        v = ty.of
    else:
        v = VNeu(NVar(len(env)))
    ctx._env, ctx._types = env + (v,), types + [ty]
    return ctx._env, ctx._types


def eval_in(ctx: Context, t: Term) -> Value:
    return evaluate(context_env(ctx)[0], t)


def normalize(ctx: Context, tm: Term, at: Term) -> Term:
    """β-normal, η-long form of ``tm`` at classifier ``at``."""
    env, types = context_env(ctx)
    return read_back(list(types), evaluate(env, tm), evaluate(env, at))


def normalize_type(ctx: Context, ty: Term) -> Term:
    env, types = context_env(ctx)
    return read_type(list(types), evaluate(env, ty))


# when a list, every equality test appends (context names, lhs nf, rhs nf, verdict)
TRACE: Optional[list] = None


def _record(ctx: Context, lhs: Term, rhs: Term) -> bool:
    same = lhs == rhs
    if TRACE is not None:
        TRACE.append((ctx.names(), lhs, rhs, same))
    return same


def equal(ctx: Context, t: Term, u: Term, at: Term) -> bool:
    return _record(ctx, normalize(ctx, t, at), normalize(ctx, u, at))


def equal_types(ctx: Context, a: Term, b: Term) -> bool:
    return _record(ctx, normalize_type(ctx, a), normalize_type(ctx, b))


def trace_equality(ctx: Context, t: Term, u: Term, at: Term) -> tuple[Term, Term]:
    """Both normal forms, for ``--trace-equality`` diagnostics."""
    return normalize(ctx, t, at), normalize(ctx, u, at)
