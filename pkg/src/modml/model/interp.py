"""Interpretation of kernel terms in the PER model.

Terms are erased to λ-terms: types become ``I``, ``η`` is the identity,
``bind`` is a β-redex, pairs are Church pairs and naturals Church numerals.
Classifiers are read as relations on normal forms, with type variables
ranging over a finite universe of PERs together with the base types.  Effects have no interpretation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from modml.model.pca import (
    DEFAULT_FUEL, I, K, KI, PApp, PLam, PTerm, PVar, church, normalize, pca_apply, pair, parse_term,
    pshift, psubst, size,
)
from modml.model.per import Per
from modml.syntax import (
    Ann, App, BaseType, Bind, Const, Context, EffType, Eta, Fst, If, Lam, Lit, Mod, Pair, Pi,
    RefType, Sigma, Singleton, Snd, Sort, SortConst, Term, Var, shift, substitute,
)


class NoInterpretation(Exception):
    """The term or classifier lies outside the interpreted fragment."""


NAT_SAMPLES = 3

_PRIMS = {
    "Int.add": parse_term(r"\m n f x. m f (n f x)"),
    "Int.mul": parse_term(r"\m n f. m (n f)"),
    "Bool.not": parse_term(r"\b. b KI K"),
}

_TYPE_FORMERS = (SortConst, BaseType, Pi, Sigma, Mod, Singleton, EffType, RefType)


def erase(t: Term) -> PTerm:
    """Open λ-term with the same de Bruijn indices as ``t``."""
    match t:
        case Var(i):
            return PVar(i)
        case Lam(body):
            return PLam(erase(body))
        case App(f, a):
            return PApp(erase(f), erase(a))
        case Pair(a, b):
            return PLam(PApp(PApp(PVar(0), _up(erase(a))), _up(erase(b))))
        case Fst(p):
            return PApp(erase(p), K)
        case Snd(p):
            return PApp(erase(p), KI)
        case Eta(a):
            return erase(a)
        case Bind(u, _, body):
            return PApp(PLam(erase(body)), erase(u))
        case Ann(inner, _):
            return erase(inner)
        case If(c, a, b):
            return PApp(PApp(erase(c), erase(a)), erase(b))
        case Lit(v):
            if v is True or v is False:
                return K if v else KI
            if v == ():
                return I
            if isinstance(v, int) and v >= 0:
                return church(v)
            raise NoInterpretation(f"literal {v!r}")
        case Const(name) if name in _PRIMS:
            return _PRIMS[name]
        case _ if isinstance(t, _TYPE_FORMERS):
            return I
    raise NoInterpretation(f"{type(t).__name__} has no PER interpretation")


def _up(p: PTerm) -> PTerm:
    return pshift(p, 1)


# environment entries: ("type", Per) for type variables, ("val", PTerm) for terms
Entry = tuple


def _close(p: PTerm, env: tuple) -> PTerm:
    for kind, v in reversed(env):
        p = psubst(p, I if kind == "type" else v)
    return p


def denote(t: Term, env: tuple = (), fuel: int = DEFAULT_FUEL) -> Optional[PTerm]:
    return normalize(_close(erase(t), env), fuel)


def default_universe() -> list[Per]:
    """Small PERs over Church numerals and booleans."""
    n = [church(i) for i in range(NAT_SAMPLES)]
    return [
        Per.discrete([K, KI], "Bool"),
        Per.discrete(n, "Nat3"),
        Per.from_classes([[n[0], n[1]], [n[2]]], "Coarse"),
        Per.from_classes([[I]], "One"),
    ]


class BasePer:
    """The PER of a base type, unrestricted: its carrier lists only the samples."""

    def __init__(self, model: "Model", ty: BaseType):
        self.model, self.type, self.name = model, ty, ty.name
        self.carrier = tuple(model.samples(ty))

    def related(self, a: Optional[PTerm], b: Optional[PTerm]) -> bool:
        return self.model.related(self.type, a, b)

    def in_domain(self, a: Optional[PTerm]) -> bool:
        return self.related(a, a)


BASE_TYPES = ("int", "bool", "unit")


@dataclass
class Model:
    universe: list
    fuel: int = DEFAULT_FUEL

    # -- relations -----------------------------------------------------------

    def related(self, ty: Term, a: Optional[PTerm], b: Optional[PTerm], env: tuple = ()) -> bool:
        if a is None or b is None:
            return False
        match ty:
            case BaseType("int"):
                return a == b and a in {church(i) for i in range(_nat_bound(a))}
            case BaseType("bool"):
                return a == b and a in (K, KI)
            case BaseType("unit"):
                return a == b == I
            case Var(i):
                return self._per(env, i).related(a, b)
            case SortConst(Sort.TP) | Singleton():
                return a == b == I
            case Mod(inner) | Ann(inner, _):
                return self.related(inner, a, b, env)
            case Sigma(dom, cod):
                a1, b1 = self._app(a, K), self._app(b, K)
                a2, b2 = self._app(a, KI), self._app(b, KI)
                types = self._type_args(dom, env)
                if types is not None:
                    # erased witnesses: related at some type in the universe
                    return a1 == b1 == I and any(self.related(cod, a2, b2, env + (("type", P),)) for P in types)
                return self.related(dom, a1, b1, env) and self.related(cod, a2, b2, env + (("val", a1),))
            case Pi(dom, cod):
                types = self._type_args(dom, env)
                if types is not None:
                    return all(self.related(cod, self._app(a, I), self._app(b, I), env + (("type", P),))
                               for P in types)
                xs = self.samples(dom, env)
                return all(
                    self.related(cod, self._app(a, x), self._app(b, y), env + (("val", x),))
                    for x in xs for y in xs if self.related(dom, x, y, env)
                )
        raise NoInterpretation(f"classifier {type(ty).__name__} is not interpreted")

    def _app(self, f: PTerm, a: PTerm) -> Optional[PTerm]:
        return pca_apply(f, a, self.fuel)

    def _per(self, env: tuple, i: int) -> Per:
        if i >= len(env):
            raise NoInterpretation(f"free variable #{i}")
        kind, v = env[-1 - i]
        if kind != "type":
            raise NoInterpretation("a term variable used as a classifier")
        return v

    def _type_args(self, dom: Term, env: tuple) -> Optional[list]:
        """The PERs a type-level binder ranges over, or ``None`` for a term binder."""
        match dom:
            case SortConst(Sort.TP):
                return list(self.universe) + [BasePer(self, BaseType(n)) for n in BASE_TYPES]
            case Singleton(tau):
                return [self.type_per(tau, env)]
        return None

    def type_per(self, tau: Term, env: tuple) -> Per:
        match tau:
            case Var(i):
                return self._per(env, i)
            case BaseType(name) if name in BASE_TYPES:
                return BasePer(self, tau)
        raise NoInterpretation("type expression outside the interpreted fragment")

    # -- samples ---------------------------------------------------------------

    def samples(self, ty: Term, env: tuple = ()) -> list:
        """Finitely many realizers in the domain of ``ty``."""
        match ty:
            case BaseType("int"):
                return [church(i) for i in range(NAT_SAMPLES)]
            case BaseType("bool"):
                return [K, KI]
            case BaseType("unit"):
                return [I]
            case Var(i):
                return [t for t in self._per(env, i).carrier if self._per(env, i).in_domain(t)]
            case SortConst(Sort.TP) | Singleton():
                return [I]
            case Mod(inner) | Ann(inner, _):
                return self.samples(inner, env)
            case Sigma(dom, cod):
                types = self._type_args(dom, env)
                out = []
                if types is not None:
                    for P in types:
                        out += [pair(I, b) for b in self.samples(cod, env + (("type", P),))]
                else:
                    for a in self.samples(dom, env):
                        out += [pair(a, b) for b in self.samples(cod, env + (("val", a),))]
                return list(dict.fromkeys(out))
            case Pi():
                pool = [I, K, KI, PLam(K)] + [PLam(church(i)) for i in range(NAT_SAMPLES)]
                pool += [normalize(t, self.fuel) for t in synthesize(ty)]
                pool = [f for f in dict.fromkeys(pool) if f is not None]
                return [f for f in pool if self.related(ty, f, f, env)]
        raise NoInterpretation(f"no samples for {type(ty).__name__}")

    # -- open terms --------------------------------------------------------------

    def environments(self, ctx: Context):
        """Every assignment of samples to the context's variables (definitions are denoted)."""
        envs = [()]
        for entry in ctx.entries:
            nxt = []
            for env in envs:
                if entry.value is not None:
                    kind = "type" if _is_type_level(entry.type) else "val"
                    val = (self.type_per(entry.value, env) if kind == "type"
                           else denote(entry.value, env, self.fuel))
                    nxt.append(env + ((kind, val),))
                elif (types := self._type_args(entry.type, env)) is not None:
                    nxt += [env + (("type", P),) for P in types]
                else:
                    nxt += [env + (("val", s),) for s in self.samples(entry.type, env)]
            envs = nxt
        return envs

    def equal(self, ctx: Context, lhs: Term, rhs: Term, ty: Term) -> bool:
        """Both sides denote related elements of ``ty`` under every sampled environment."""
        return all(
            self.related(ty, denote(lhs, env, self.fuel), denote(rhs, env, self.fuel), env)
            for env in self.environments(ctx)
        )


# -- type-directed inhabitants ------------------------------------------------------

SYNTH_DEPTH = 2
SYNTH_LIMIT = 64


def synthesize(goal: Term, scope: tuple = (), depth: int = SYNTH_DEPTH) -> list:
    """Erased inhabitants of ``goal`` built from literals and the variables in ``scope``.

    ``scope`` lists the classifiers of the bound variables, outermost first, each
    in its own context; free type variables of ``goal`` are opaque.
    """
    out: list = []
    match goal:
        case Pi(dom, cod):
            out += [PLam(b) for b in synthesize(cod, scope + (dom,), depth)]
        case Sigma(dom, cod) if not _mentions_top(cod):
            cod0 = shift(cod, -1)
            out += [PLam(PApp(PApp(PVar(0), _up(a)), _up(b)))
                    for a in synthesize(dom, scope, depth) for b in synthesize(cod0, scope, depth)]
        case BaseType("int"):
            out += [church(0), church(1)]
        case BaseType("bool"):
            out += [K, KI]
        case BaseType("unit") | SortConst(Sort.TP) | Singleton():
            out.append(I)
        case Mod(inner):
            out += synthesize(inner, scope, depth)
    for j in range(len(scope)):
        ty = shift(scope[-1 - j], j + 1)
        out += _eliminations(PVar(j), ty, goal, scope, depth)
    return list(dict.fromkeys(out))[:SYNTH_LIMIT]


def _eliminations(head: PTerm, ty: Term, goal: Term, scope: tuple, depth: int) -> list:
    out = [head] if ty == goal else []
    if depth <= 0:
        return out
    match ty:
        case Mod(inner):
            out += _eliminations(head, inner, goal, scope, depth)
        case Sigma(dom, cod) if not _mentions_top(cod):
            out += _eliminations(PApp(head, K), dom, goal, scope, depth - 1)
            out += _eliminations(PApp(head, KI), shift(cod, -1), goal, scope, depth - 1)
        case Pi(dom, cod) if not _mentions_top(cod):
            for a in synthesize(dom, scope, depth - 1):
                out += _eliminations(PApp(head, a), shift(cod, -1), goal, scope, depth - 1)
    return out


def _mentions_top(t: Term) -> bool:
    # the outermost bound variable occurs iff two different substitutions disagree
    return substitute(t, Lit(0)) != substitute(t, Lit(1))


def _is_type_level(ty: Term) -> bool:
    return isinstance(ty, Singleton) or ty == SortConst(Sort.TP)


def _nat_bound(a: PTerm) -> int:
    # a Church numeral λf x. f (… x) has size 2n + 3, so n < size
    return size(a)


__all__ = ["BasePer", "NoInterpretation", "erase", "denote", "default_universe", "synthesize", "Model"]
