"""Bidirectional sorting and typing for the three-universe calculus.

Introductions (λ, pairs, η) are checked; eliminations, variables, constants
and annotated terms synthesize.  ``check`` and ``synth`` return the input
term with every omitted ``bind`` motive filled in.

Sorts: ``TP : KIND``; ``○A : TP`` for every signature ``A``; Π and Σ land in
KIND when every component is a kind and in SIG otherwise, never in TP.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

from modml.builtins import BOOL, CONSTANTS, EFF_PRIMS, STRING, UNIT_T
from modml.equality import equal, equal_types, normalize_type
from modml.errors import (
    CannotSynthesize, Escape, IllFormed, NotModal, TypeMismatch, UnboundVariable,
    UniverseViolation,
)
from modml.pretty import pretty
from modml.syntax import (
    KIND, SIG, TP, Ann, App, BaseType, Bind, Const, Context, EffPrim, EffType, Eta, Fst,
    If, Lam, Lit, Mod, Pair, Pi, RefType, ScopeError, Sigma, Singleton, Snd, Sort,
    SortConst, Term, Var, free_in, shift, sort_leq, subst,
)


@dataclass(frozen=True)
class InTP:
    pass


@dataclass(frozen=True)
class IsMod:
    pass


@dataclass(frozen=True)
class ProductOfModal:
    left: "ModalityEvidence"
    right: "ModalityEvidence"


@dataclass(frozen=True)
class ArrowIntoModal:
    cod: "ModalityEvidence"


@dataclass(frozen=True)
class PiIntoModal:
    cod: "ModalityEvidence"


ModalityEvidence = Union[InTP, IsMod, ProductOfModal, ArrowIntoModal, PiIntoModal]


@dataclass(frozen=True)
class Classifier:
    term: Term
    sort: Sort


def _show(ctx: Context, t: Term) -> str:
    return pretty(t, ctx.names())


def whnf(ctx: Context, ty: Term) -> Term:
    return normalize_type(ctx, ty)


# -- sorting ------------------------------------------------------------------


def sort_of(ctx: Context, ty: Term) -> Sort:
    """Least sort at which ``ty`` is a well-formed classifier."""
    match ty:
        case SortConst(Sort.TP):
            return Sort.KIND
        case SortConst(s):
            raise UniverseViolation(f"{s} is not a classifier: there is no universe of {s.value.lower()}s")
        case BaseType(_):
            return Sort.TP
        case Mod(a):
            sort_of(ctx, a)
            return Sort.TP
        case EffType(a) | RefType(a):
            require_sort(ctx, a, Sort.TP)
            return Sort.TP
        case Singleton(a):
            check(ctx, a, TP)
            return Sort.KIND
        case Pi(dom, cod, name) | Sigma(dom, cod, name):
            sd = sort_of(ctx, dom)
            sc = sort_of(ctx.extend(dom, name), cod)
            if sd is Sort.KIND and sc is Sort.KIND:
                return Sort.KIND
            return Sort.SIG
        case Lam() | Pair() | Eta() | Lit():
            raise IllFormed(f"{_show(ctx, ty)} is not a classifier")
    _, cls = synth(ctx, ty)
    cls = whnf(ctx, cls)
    if cls == TP or isinstance(cls, Singleton):
        return Sort.TP
    raise IllFormed(f"{_show(ctx, ty)} is not a classifier (it has classifier {_show(ctx, cls)})")


def require_sort(ctx: Context, ty: Term, sort: Sort) -> Sort:
    actual = sort_of(ctx, ty)
    if not sort_leq(actual, sort):
        raise UniverseViolation(f"{_show(ctx, ty)} lives in {actual}, not in {sort}")
    return actual


# -- modality -----------------------------------------------------------------


def is_modal(ctx: Context, ty: Term) -> Optional[ModalityEvidence]:
    """Evidence for ``ty modal``, or ``None`` when no rule applies."""
    try:
        tyn = whnf(ctx, ty)
    except (TypeError, ScopeError, IndexError):
        return None
    match tyn:
        case Mod(_):
            return InTP()
        case Pi(dom, cod, name):
            ev = is_modal(ctx.extend(dom, name), cod)
            if ev is None:
                return None
            try:
                dom_tp = sort_of(ctx, dom) is Sort.TP
            except Exception:
                return None
            if dom_tp and not free_in(cod, 0):
                return ArrowIntoModal(ev)
            return PiIntoModal(ev)
        case Sigma(dom, cod, name) if not free_in(cod, 0):
            left = is_modal(ctx, dom)
            right = is_modal(ctx, shift(cod, -1))
            if left is None or right is None:
                return None
            return ProductOfModal(left, right)
        case SortConst(_):
            return None
    try:
        return InTP() if sort_of(ctx, tyn) is Sort.TP else None
    except Exception:
        return None


# -- typing -------------------------------------------------------------------


def _spine(t: Term) -> tuple[Term, list]:
    args = []
    while isinstance(t, App):
        args.append(t.arg)
        t = t.fn
    return t, args[::-1]


def _conv(ctx: Context, actual: Term, expected: Term) -> bool:
    return equal_types(ctx, actual, expected)


def check(ctx: Context, tm: Term, against: Term) -> Term:
    """Check ``tm`` against ``against``; return it with bind motives filled."""
    expected = whnf(ctx, against)
    match tm:
        case Lam(body, name):
            if not isinstance(expected, Pi):
                raise TypeMismatch(_show(ctx, expected), "a λ-abstraction")
            return Lam(check(ctx.extend(expected.dom, name), body, expected.cod), name)
        case Pair(a, b):
            if not isinstance(expected, Sigma):
                raise TypeMismatch(_show(ctx, expected), "a pair")
            a2 = check(ctx, a, expected.fst)
            return Pair(a2, check(ctx, b, subst(expected.snd, 0, a2)))
        case Eta(a):
            if not isinstance(expected, Mod):
                raise TypeMismatch(_show(ctx, expected), "an η-package")
            return Eta(check(ctx, a, expected.arg))
        case Bind(u, motive, body, name):
            result = _check_bind(ctx, u, against if motive is None else motive, body, name)
            if motive is not None and not _conv(ctx, motive, against):
                raise TypeMismatch(_show(ctx, expected), _show(ctx, motive))
            return result
        case If(c, a, b):
            return If(check(ctx, c, BOOL), check(ctx, a, against), check(ctx, b, against))
        case EffPrim("Eff.return", (v,)) if isinstance(expected, EffType):
            return EffPrim("Eff.return", (check(ctx, v, expected.arg),))
        case EffPrim("Eff.bind", (m, k)) if isinstance(expected, EffType):
            m2, mty = synth(ctx, m)
            a = _expect_eff(ctx, mty)
            k2 = check(ctx, k, Pi(a, EffType(shift(expected.arg, 1)), getattr(k, "name", "x")))
            return EffPrim("Eff.bind", (m2, k2))
        case App():
            head, args = _spine(tm)
            if isinstance(head, Lam):
                return _let_spine(ctx, head, args, against)[0]
    if isinstance(expected, SortConst):
        require_sort(ctx, tm, expected.sort)
        return tm
    if isinstance(expected, Singleton):
        tm2 = check(ctx, tm, TP)
        if not equal(ctx, tm2, expected.of, TP):
            raise TypeMismatch(_show(ctx, expected), _show(ctx, tm2))
        return tm2
    tm2, actual = synth(ctx, tm)
    if _conv(ctx, actual, expected):
        return tm2
    # structural η-check: lets singleton-kinded components accept equal types
    if isinstance(expected, Sigma):
        try:
            a = check(ctx, Fst(tm2), expected.fst)
            check(ctx, Snd(tm2), subst(expected.snd, 0, a))
            return tm2
        except TypeMismatch:
            pass
    if isinstance(expected, Pi) and isinstance(whnf(ctx, actual), Pi):
        try:
            inner = ctx.extend(expected.dom, expected.name)
            check(inner, App(shift(tm2, 1), Var(0)), expected.cod)
            return tm2
        except TypeMismatch:
            pass
    raise TypeMismatch(_show(ctx, expected), _show(ctx, whnf(ctx, actual)))


def _expect_eff(ctx: Context, ty: Term) -> Term:
    tyn = whnf(ctx, ty)
    if not isinstance(tyn, EffType):
        raise TypeMismatch("a computation of type _ eff", _show(ctx, tyn))
    return tyn.arg


def _check_bind(ctx: Context, u: Term, motive: Term, body: Term, name: str) -> Term:
    if is_modal(ctx, motive) is None:
        raise NotModal(f"bind motive {_show(ctx, motive)} is not modal")
    sort_of(ctx, motive)
    u2, uty = synth(ctx, u)
    s = whnf(ctx, uty)
    if not isinstance(s, Mod):
        raise TypeMismatch("a package of type ○_", _show(ctx, s))
    body2 = check(ctx.extend(s.arg, name), body, shift(motive, 1))
    return Bind(u2, motive, body2, name)


def _let_spine(ctx: Context, head: Term, args: list, against: Optional[Term]) -> tuple[Term, Term]:
    """Check or synthesize a β-redex spine by binding arguments as definitions."""
    typed = [synth(ctx, a) for a in args]
    inner = ctx
    names = []
    n = 0
    while isinstance(head, Lam) and n < len(typed):
        a2, aty = typed[n]
        inner = inner.extend(shift(aty, n), head.name, value=shift(a2, n))
        names.append(head.name)
        head = head.body
        n += 1
    rest = head
    for a2, _ in typed[n:]:
        rest = App(rest, shift(a2, n))
    if against is not None:
        body = check(inner, rest, shift(against, n))
        ty = against
    else:
        body, bty = synth(inner, rest)
        ty = normalize_type(inner, bty)
        for _ in range(n):
            if free_in(ty, 0):
                raise Escape(f"type {_show(inner, ty)} mentions a let-bound variable")
            ty = shift(ty, -1)
    # peel off the remaining applications and re-wrap the redex
    for _ in typed[n:]:
        body = body.fn
    for name in reversed(names):
        body = Lam(body, name)
    out = body
    for a2, _ in typed:
        out = App(out, a2)
    return out, ty


def synth(ctx: Context, tm: Term) -> tuple[Term, Term]:
    """Synthesize a classifier; returns (filled term, classifier)."""
    match tm:
        case Var(i):
            try:
                return tm, ctx.type_of(i)
            except ScopeError as e:
                raise UnboundVariable(str(e)) from None
        case App(f, a):
            head, args = _spine(tm)
            if isinstance(head, Lam):
                return _let_spine(ctx, head, args, None)
            f2, fty = synth(ctx, f)
            fn = whnf(ctx, fty)
            if not isinstance(fn, Pi):
                raise TypeMismatch("a function", _show(ctx, fn))
            a2 = check(ctx, a, fn.dom)
            return App(f2, a2), subst(fn.cod, 0, a2)
        case Fst(p):
            p2, pty = synth(ctx, p)
            sg = whnf(ctx, pty)
            if not isinstance(sg, Sigma):
                raise TypeMismatch("a dependent sum", _show(ctx, sg))
            return Fst(p2), sg.fst
        case Snd(p):
            p2, pty = synth(ctx, p)
            sg = whnf(ctx, pty)
            if not isinstance(sg, Sigma):
                raise TypeMismatch("a dependent sum", _show(ctx, sg))
            return Snd(p2), subst(sg.snd, 0, Fst(p2))
        case Ann(t, ty):
            sort_of(ctx, ty)
            return Ann(check(ctx, t, ty), ty), ty
        case Bind(u, None, body, name):
            u2, uty = synth(ctx, u)
            s = whnf(ctx, uty)
            if not isinstance(s, Mod):
                raise TypeMismatch("a package of type ○_", _show(ctx, s))
            inner = ctx.extend(s.arg, name)
            body2, bty = synth(inner, body)
            bty = normalize_type(inner, bty)
            if free_in(bty, 0):
                raise Escape(f"the type {_show(inner, bty)} of the bind body mentions the bound module")
            motive = shift(bty, -1)
            if is_modal(ctx, motive) is None:
                raise NotModal(f"bind motive {_show(ctx, motive)} is not modal")
            return Bind(u2, motive, body2, name), motive
        case Bind(u, motive, body, name):
            return _check_bind(ctx, u, motive, body, name), motive
        case Const(name):
            if name not in CONSTANTS:
                raise UnboundVariable(f"unknown constant {name}")
            return tm, CONSTANTS[name].type
        case Lit(v):
            return tm, BaseType(tm.kind)
        case If(c, a, b):
            c2 = check(ctx, c, BOOL)
            a2, aty = synth(ctx, a)
            return If(c2, a2, check(ctx, b, aty)), aty
        case EffPrim(name, args):
            return _synth_prim(ctx, name, args)
        case SortConst() | BaseType() | Pi() | Sigma() | Mod() | EffType() | RefType() | Singleton():
            s = sort_of(ctx, tm)
            return tm, SortConst(s) if s is not Sort.TP else TP
        case Lam() | Pair() | Eta():
            raise CannotSynthesize(f"cannot synthesize a classifier for {_show(ctx, tm)}; annotate it")
    raise IllFormed(f"unknown term {tm!r}")


def _synth_prim(ctx: Context, name: str, args: tuple) -> tuple[Term, Term]:
    if name not in EFF_PRIMS:
        raise UnboundVariable(f"unknown primitive {name}")
    if len(args) != EFF_PRIMS[name]:
        raise IllFormed(f"{name} expects {EFF_PRIMS[name]} arguments, got {len(args)}")
    match name, args:
        case "Eff.return", (v,):
            v2, vty = synth(ctx, v)
            require_sort(ctx, vty, Sort.TP)
            return EffPrim(name, (v2,)), EffType(vty)
        case "Eff.bind", (m, k):
            m2, mty = synth(ctx, m)
            a = _expect_eff(ctx, mty)
            if isinstance(k, Lam):
                inner = ctx.extend(a, k.name)
                body2, bty = synth(inner, k.body)
                b = _expect_eff(inner, bty)
                if free_in(b, 0):
                    raise Escape(f"result type {_show(inner, b)} depends on the bound value")
                return EffPrim(name, (m2, Lam(body2, k.name))), EffType(shift(b, -1))
            k2, kty = synth(ctx, k)
            kn = whnf(ctx, kty)
            if not isinstance(kn, Pi) or not _conv(ctx, kn.dom, a):
                raise TypeMismatch(f"{_show(ctx, a)} → _ eff", _show(ctx, kn))
            b = _expect_eff(ctx.extend(kn.dom), kn.cod)
            if free_in(b, 0):
                raise Escape("continuation result type depends on its argument")
            return EffPrim(name, (m2, k2)), EffType(shift(b, -1))
        case "Ref.new", (v,):
            v2, vty = synth(ctx, v)
            require_sort(ctx, vty, Sort.TP)
            return EffPrim(name, (v2,)), EffType(RefType(vty))
        case "Ref.get", (r,):
            r2, rty = synth(ctx, r)
            rn = whnf(ctx, rty)
            if not isinstance(rn, RefType):
                raise TypeMismatch("a reference", _show(ctx, rn))
            return EffPrim(name, (r2,)), EffType(rn.arg)
        case "Ref.set", (r, v):
            r2, rty = synth(ctx, r)
            rn = whnf(ctx, rty)
            if not isinstance(rn, RefType):
                raise TypeMismatch("a reference", _show(ctx, rn))
            return EffPrim(name, (r2, check(ctx, v, rn.arg))), EffType(UNIT_T)
        case "getEnvFlag", (s,):
            return EffPrim(name, (check(ctx, s, STRING),)), EffType(BOOL)
        case "Io.trace", (op, v):
            v2, _ = synth(ctx, v)
            return EffPrim(name, (check(ctx, op, STRING), v2)), EffType(UNIT_T)
    raise IllFormed(f"bad primitive application {name}")


def infer(ctx: Context, tm: Term) -> Term:
    """Principal classifier of ``tm``."""
    return synth(ctx, tm)[1]


def classify(ctx: Context, ty: Term) -> Classifier:
    return Classifier(ty, sort_of(ctx, ty))


def check_context(ctx: Context) -> None:
    """Every entry's classifier (and definition) is well formed in its prefix."""
    prefix = Context()
    for e in ctx:
        sort_of(prefix, e.type)
        if e.value is not None:
            check(prefix, e.value, e.type)
        prefix = prefix.extend(e.type, e.name, e.value)
