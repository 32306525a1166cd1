"""Bidirectional elaboration of the surface language into kernel terms.

The elaborator mirrors the kernel rules: it keeps a kernel ``Context`` plus
a name scope, and every declaration it produces is re-checked by the kernel
before being added to the context.

Layout conventions:

* a structure is a right-nested tuple of its fields, ending in ``()``;
  a signature is the matching chain of Σs ending in ``unit``, and each Σ
  binder carries the field name so that ``X.f`` can be resolved;
* signatures are macros; every other top-level declaration becomes a
  context entry, transparent unless sealed with ``:>``;
* a function whose parameter is classified by a kind or a signature is a
  universal, i.e. a package ``η(λx. e) : ○Πx:A. B``; applying it inserts
  the ``bind z = f in z · a`` of the expansion.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from modml import checker as K
from modml.builtins import BOOL, CONSTANTS, EFF_PRIMS, UNIT_T
from modml.equality import equal_types, normalize_type
from modml.errors import (
    CannotSynthesize, DuplicateField, Escape, ModmlError, SignatureMismatch, TypeMismatch,
    UnboundVariable, UnknownField,
)
from modml.surface import ast as A
from modml.surface.expand import expand_exists, expand_forall
from modml.syntax import (
    TP, Ann, App, BaseType, Bind, Const, Context, EffPrim, EffType, Eta, Fst, If, Lam, Lit,
    Mod, Pair, Pi, RefType, Sigma, Singleton, Snd, Sort, SortConst, Term, Var, arrow,
    free_in, product, shift, subst,
)

# type names that are not declared anywhere
BASE_NAMES = {
    "int": "int", "bool": "bool", "string": "string", "unit": "unit", "callback": "callback",
    "filepath": "string", "sql": "string",
}

PRIM_ALIASES = {"Eff.ret": "Eff.return"}


@dataclass(frozen=True)
class Binding:
    kind: str  # "var" | "macro" | "sig"
    level: int  # context length when the name was introduced
    term: Optional[Term] = None


@dataclass(frozen=True)
class Env:
    ctx: Context
    names: dict = field(default_factory=dict)

    @property
    def depth(self) -> int:
        return len(self.ctx)

    def bind_var(self, name: str, type_: Term, value: Optional[Term] = None) -> "Env":
        names = self.names if name == "_" else {**self.names, name: Binding("var", self.depth)}
        return Env(self.ctx.extend(type_, name, value), names)

    def hidden(self, type_: Term, name: str = "_", value: Optional[Term] = None) -> "Env":
        return Env(self.ctx.extend(type_, name, value), self.names)

    def macro(self, name: str, term: Term, kind: str = "macro") -> "Env":
        return Env(self.ctx, {**self.names, name: Binding(kind, self.depth, term)})

    def lookup(self, name: str) -> Optional[Binding]:
        return self.names.get(name)

    def resolve(self, b: Binding) -> Term:
        if b.kind == "var":
            return Var(self.depth - 1 - b.level)
        return shift(b.term, self.depth - b.level)


@dataclass(frozen=True)
class ElabDecl:
    name: str
    term: Term
    type: Term
    sort: Sort
    opaque: bool = False

    @property
    def classifier(self) -> K.Classifier:
        return K.Classifier(self.type, self.sort)


@dataclass
class ElabResult:
    context: Context
    decls: list
    signatures: dict
    env: Env

    def lookup(self, name: str) -> ElabDecl:
        for d in reversed(self.decls):
            if d.name == name:
                return d
        raise KeyError(name)


def _spanned(method):
    def wrapper(self, env, node, *args):
        try:
            return method(self, env, node, *args)
        except ModmlError as err:
            raise err.at(getattr(node, "span", None))

    wrapper.__name__ = method.__name__
    wrapper.__doc__ = method.__doc__
    return wrapper


def _needs_ann(t: Term) -> bool:
    return isinstance(t, (Lam, Pair, Eta))


def _ann(t: Term, ty: Term) -> Term:
    return Ann(t, ty) if _needs_ann(t) else t


def _strengthen(env: Env, ty: Term, count: int, what: str) -> Term:
    ty = normalize_type(env.ctx, ty)
    for _ in range(count):
        if free_in(ty, 0):
            raise Escape(f"the type {K._show(env.ctx, ty)} of {what} mentions a locally bound name")
        ty = shift(ty, -1)
    return ty


def _qualified(e) -> Optional[str]:
    """``Eff.bind`` and friends, when written as a projection from an unbound name."""
    if isinstance(e, A.Proj) and isinstance(e.base, A.Name):
        q = f"{e.base.name}.{e.field}"
        return PRIM_ALIASES.get(q, q)
    if isinstance(e, A.Name) and e.name in EFF_PRIMS:
        return e.name
    return None


def _spine(e) -> tuple:
    args = []
    while isinstance(e, A.Apply):
        args.append(e.arg)
        e = e.fn
    return e, args[::-1]


def expr_as_cls(e):
    """Read an expression as a classifier (a type argument or manifest)."""
    match e:
        case A.ClsExpr(c):
            return c
        case A.Name(n):
            return A.TyName((n,), span=e.span)
        case A.Proj():
            path = []
            cur = e
            while isinstance(cur, A.Proj):
                path.append(cur.field)
                cur = cur.base
            if isinstance(cur, A.Name):
                return A.TyName((cur.name, *reversed(path)), span=e.span)
        case A.Annot(inner, _):
            return expr_as_cls(inner)
    raise TypeMismatch("a type", type(e).__name__, getattr(e, "span", None))


class Elaborator:
    def __init__(self, env: Optional[Env] = None):
        self.env = env or Env(Context())

    # -- names and paths ----------------------------------------------------------

    def _is_prim_name(self, env: Env, e) -> Optional[str]:
        q = _qualified(e)
        if q is None:
            return None
        head = e.base.name if isinstance(e, A.Proj) else e.name
        if env.lookup(head) is not None:
            return None
        return q

    def _name(self, env: Env, name: str) -> tuple[Term, Term]:
        b = env.lookup(name)
        if b is None:
            if name in BASE_NAMES:
                return BaseType(BASE_NAMES[name]), TP
            raise UnboundVariable(f"unbound name {name}")
        if b.kind == "sig":
            raise TypeMismatch("a value or module", f"the signature {name}")
        t = env.resolve(b)
        if b.kind == "var":
            return t, env.ctx.type_of(t.index)
        return t, K.infer(env.ctx, t)

    def field(self, env: Env, base: Term, base_ty: Term, name: str) -> tuple[Term, Term]:
        """Resolve ``base.name`` along the Σ-chain of ``base_ty``."""
        cur = base
        sg = normalize_type(env.ctx, base_ty)
        if name in ("1", "2") and isinstance(sg, Sigma):
            # tuple projections
            return (Fst(base), sg.fst) if name == "1" else (Snd(base), subst(sg.snd, 0, Fst(base)))
        while isinstance(sg, Sigma):
            if sg.name == name:
                return Fst(cur), sg.fst
            sg = normalize_type(env.ctx, subst(sg.snd, 0, Fst(cur)))
            cur = Snd(cur)
        raise UnknownField(f"no field {name} in {K._show(env.ctx, normalize_type(env.ctx, base_ty))}")

    # -- classifiers --------------------------------------------------------------

    @_spanned
    def cls(self, env: Env, c) -> Term:
        match c:
            case A.TyType():
                return TP
            case A.TyName(path):
                b = env.lookup(path[0])
                if b is not None and b.kind == "sig":
                    if len(path) > 1:
                        raise UnknownField(f"{path[0]} is a signature, not a module")
                    return env.resolve(b)
                t, ty = self._name(env, path[0])
                for f in path[1:]:
                    t, ty = self.field(env, t, ty, f)
                return t
            case A.TyArrow(dom, cod, binder):
                d = self.cls(env, dom)
                if binder is None:
                    return arrow(d, self.cls(env, cod))
                return Pi(d, self.cls(env.bind_var(binder, d), cod), binder)
            case A.TyProd(left, right):
                return product(self.cls(env, left), self.cls(env, right))
            case A.TyEff(a):
                return EffType(self.cls(env, a))
            case A.TyRef(a):
                return RefType(self.cls(env, a))
            case A.ModType(s):
                return Mod(self.cls(env, s))
            case A.Exists(x, a, body) | A.Forall(x, a, body):
                a2 = self.cls(env, a)
                b2 = self.cls(env.bind_var(x, a2), body)
                expand = expand_exists if isinstance(c, A.Exists) else expand_forall
                return expand(x, a2, b2, env.ctx)
            case A.SigBody(specs):
                return self._specs(env, specs, set())
            case A.WithType(s, path, manifest):
                sig = normalize_type(env.ctx, self.cls(env, s))
                tau = self.cls(env, manifest)
                K.require_sort(env.ctx, tau, Sort.TP)
                return self._rekind(env, sig, path, tau, 0)
        raise TypeMismatch("a classifier", type(c).__name__)

    def _specs(self, env: Env, specs: tuple, seen: set) -> Term:
        if not specs:
            return UNIT_T
        s, rest = specs[0], specs[1:]
        if s.name in seen:
            raise DuplicateField(f"duplicate field {s.name}", s.span)
        match s:
            case A.SpecType(name, None):
                fst = TP
            case A.SpecType(name, manifest):
                fst = Singleton(self.cls(env, manifest))
            case A.SpecVal(name, ty):
                fst = self.cls(env, ty)
            case A.SpecStructure(name, sig):
                fst = self.cls(env, sig)
        return Sigma(fst, self._specs(env.bind_var(s.name, fst), rest, seen | {s.name}), s.name)

    def _rekind(self, env: Env, sig: Term, path: tuple, tau: Term, depth: int) -> Term:
        if not isinstance(sig, Sigma):
            raise UnknownField(f"no type component {'.'.join(path)} in the signature")
        if sig.name != path[0]:
            return Sigma(sig.fst, self._rekind(env, sig.snd, path, tau, depth + 1), sig.name)
        if len(path) > 1:
            return Sigma(self._rekind(env, sig.fst, path[1:], tau, depth), sig.snd, sig.name)
        if sig.fst != TP:
            raise SignatureMismatch(f"{path[0]} is not an abstract type component")
        return Sigma(Singleton(shift(tau, depth)), sig.snd, sig.name)

    # -- expressions: checking ----------------------------------------------------

    @_spanned
    def check(self, env: Env, e, against: Term) -> Term:
        ctx = env.ctx
        exp = normalize_type(ctx, against)
        if isinstance(exp, (SortConst, Singleton)) and not isinstance(e, (A.Annot, A.LetVal)):
            t = self.cls(env, expr_as_cls(e))
            return K.check(ctx, t, exp)
        match e:
            case A.Fn(param, body):
                if isinstance(exp, Mod) and isinstance(normalize_type(ctx, exp.arg), Pi):
                    return Eta(self.check(env, e, exp.arg))
                if not isinstance(exp, Pi):
                    raise TypeMismatch(K._show(ctx, exp), "a function")
                self._param_matches(env, param, exp.dom)
                return Lam(self.check(env.bind_var(param.name, exp.dom), body, exp.cod), param.name)
            case A.FnCase(a, b):
                if not isinstance(exp, Pi) or not equal_types(ctx, exp.dom, BOOL):
                    raise TypeMismatch(K._show(ctx, exp), "a function on bool")
                inner = env.hidden(BOOL, "b")
                return Lam(If(Var(0), self.check(inner, a, exp.cod), self.check(inner, b, exp.cod)), "b")
            case A.BigLambda(param, body):
                if not (isinstance(exp, Mod) and isinstance(normalize_type(ctx, exp.arg), Pi)):
                    raise TypeMismatch(K._show(ctx, exp), "a universal package")
                pi = normalize_type(ctx, exp.arg)
                self._param_matches(env, param, pi.dom)
                return Eta(Lam(self.check(env.bind_var(param.name, pi.dom), body, pi.cod), param.name))
            case A.Tuple(items):
                if not isinstance(exp, Sigma):
                    raise TypeMismatch(K._show(ctx, exp), "a tuple")
                a = self.check(env, items[0], exp.fst)
                rest = items[1] if len(items) == 2 else A.Tuple(items[1:], span=e.span)
                return Pair(a, self.check(env, rest, subst(exp.snd, 0, a)))
            case A.StructExpr(decls):
                return self._struct_check(env, decls, exp, set())
            case A.IfExpr(c, a, b):
                return If(self.check(env, c, BOOL), self.check(env, a, exp), self.check(env, b, exp))
            case A.LetVal(name, value, body):
                v, vty = self.synth(env, value)
                inner = env.bind_var(name, vty, v)
                return App(Lam(self.check(inner, body, shift(exp, 1)), name), v)
            case A.EtaNotation(u, sig):
                if not isinstance(exp, Mod):
                    raise TypeMismatch(K._show(ctx, exp), "a package η u")
                if sig is not None:
                    self._same(env, self.cls(env, sig), exp.arg)
                return Eta(self.check(env, u, exp.arg))
            case A.Pack(w, b, ty):
                if ty is not None:
                    self._same(env, self.cls(env, ty), exp)
                sg = normalize_type(ctx, exp.arg) if isinstance(exp, Mod) else None
                if not isinstance(sg, Sigma):
                    raise TypeMismatch(K._show(ctx, exp), "an existential package")
                w2 = self.check(env, w, sg.fst)
                return Eta(Pair(w2, self.check(env, b, subst(sg.snd, 0, w2))))
            case A.Unpack(pkg, x, y, body):
                return self._unpack(env, pkg, x, y, body, exp)[0]
            case A.BindModule(name, pkg, body, sig):
                return self._bind_module(env, name, pkg, body, sig, exp)[0]
            case A.Apply():
                head, args = _spine(e)
                prim = self._is_prim_name(env, head)
                if prim is not None:
                    return self._prim(env, prim, args, exp)
        t, actual = self.synth(env, e)
        if equal_types(ctx, actual, exp):
            return t
        # let the kernel try its structural fallbacks before giving up
        return K.check(ctx, t, exp)

    def _param_matches(self, env: Env, param: A.Param, dom: Term) -> None:
        if param.classifier is not None:
            self._same(env, self.cls(env, param.classifier), dom)

    def _same(self, env: Env, written: Term, expected: Term) -> None:
        if not equal_types(env.ctx, written, expected):
            raise TypeMismatch(K._show(env.ctx, normalize_type(env.ctx, expected)),
                               K._show(env.ctx, normalize_type(env.ctx, written)))

    def _struct_check(self, env: Env, decls: tuple, exp: Term, seen: set) -> Term:
        exp = normalize_type(env.ctx, exp)
        if not decls:
            if exp == UNIT_T:
                return Lit(())
            if isinstance(exp, Sigma):
                raise SignatureMismatch(f"missing field {exp.name}")
            raise TypeMismatch(K._show(env.ctx, exp), "a structure")
        d = decls[0]
        if d.name in seen:
            raise DuplicateField(f"duplicate field {d.name}", d.span)
        if not isinstance(exp, Sigma):
            raise SignatureMismatch(f"field {d.name} is not in the signature", d.span)
        if exp.name != d.name:
            raise SignatureMismatch(f"expected field {exp.name}, found {d.name}", d.span)
        a = self._field_check(env, d, exp.fst)
        rest = self._struct_check(env.macro(d.name, a), decls[1:], subst(exp.snd, 0, a), seen | {d.name})
        return Pair(a, rest)

    def _field_check(self, env: Env, d, exp: Term) -> Term:
        try:
            match d:
                case A.TypeDecl(name, None):
                    raise SignatureMismatch(f"type {name} needs a definition inside a structure")
                case A.TypeDecl(name, manifest):
                    return K.check(env.ctx, self.cls(env, manifest), exp)
                case A.ValDecl(name, ty, expr):
                    return self.check(env, expr if ty is None else A.Annot(expr, ty, span=d.span), exp)
                case A.FunDecl():
                    return self.check(env, _fun_as_expr(d), exp)
                case A.StructureDecl(name, asc, body):
                    return self.check(env, body if asc is None else A.Annot(body, asc, span=d.span), exp)
                case A.FunctorDecl(name, param, psig, rsig, body):
                    p = A.Param(param, psig, span=d.span)
                    b = body if rsig is None else A.Annot(body, rsig, span=d.span)
                    return self.check(env, A.Fn(p, b, span=d.span), exp)
            raise SignatureMismatch(f"{type(d).__name__} cannot appear inside a structure")
        except ModmlError as err:
            raise err.at(d.span)

    def _unpack(self, env: Env, pkg, x: str, y: str, body, exp: Optional[Term]) -> tuple[Term, Term]:
        p, pty = self.synth(env, pkg)
        m = normalize_type(env.ctx, pty)
        sg = normalize_type(env.ctx, m.arg) if isinstance(m, Mod) else None
        if not isinstance(sg, Sigma):
            raise TypeMismatch("an existential package", K._show(env.ctx, m))
        inner = (env.hidden(sg, "z")
                 .bind_var(x, shift(sg.fst, 1), Fst(Var(0)))
                 .bind_var(y, shift(sg.snd, 1, 1), Snd(Var(1))))
        if exp is not None:
            b = self.check(inner, body, shift(exp, 3))
            ty = exp
        else:
            b, bty = self.synth(inner, body)
            ty = _strengthen(inner, bty, 3, "the unpack body")
        term = Bind(p, None, App(App(Lam(Lam(b, y), x), Fst(Var(0))), Snd(Var(0))), "z")
        return term, ty

    def _bind_module(self, env: Env, name: str, pkg, body, sig, exp: Optional[Term]) -> tuple[Term, Term]:
        if sig is not None:
            s = self.cls(env, sig)
            p = self.check(env, pkg, Mod(s))
        else:
            p, pty = self.synth(env, pkg)
            m = normalize_type(env.ctx, pty)
            if not isinstance(m, Mod):
                raise TypeMismatch("a package of type ○_", K._show(env.ctx, m))
            s = m.arg
        inner = env.bind_var(name, s)
        if exp is not None:
            return Bind(p, None, self.check(inner, body, shift(exp, 1)), name), exp
        b, bty = self.synth(inner, body)
        return Bind(p, None, b, name), _strengthen(inner, bty, 1, "the bind body")

    def _prim(self, env: Env, name: str, args: list, exp: Optional[Term]) -> Term:
        ctx = env.ctx
        if name in CONSTANTS:
            t, ty = Const(name), CONSTANTS[name].type
            for a in args:
                fn = normalize_type(ctx, ty)
                a2 = self.check(env, a, fn.dom)
                t, ty = App(t, a2), subst(fn.cod, 0, a2)
            return t if exp is None else K.check(ctx, t, exp)
        if name not in EFF_PRIMS:
            raise UnboundVariable(f"unknown primitive {name}")
        arity = EFF_PRIMS[name]
        if len(args) < arity:
            raise TypeMismatch(f"{arity} arguments to {name}", f"{len(args)}")
        args, extra = args[:arity], args[arity:]
        if extra:
            raise TypeMismatch(f"{arity} arguments to {name}", f"{len(args) + len(extra)}")
        eff_arg = exp.arg if isinstance(exp, EffType) else None
        match name, args:
            case "Eff.return", (v,):
                out = (self.check(env, v, eff_arg) if eff_arg is not None else self.synth(env, v)[0],)
            case "Eff.bind", (m, k):
                m2, mty = self.synth(env, m)
                a = K._expect_eff(ctx, mty)
                if eff_arg is not None:
                    k2 = self.check(env, k, Pi(a, EffType(shift(eff_arg, 1)), "x"))
                elif isinstance(k, A.Fn) and k.param.classifier is None:
                    inner = env.bind_var(k.param.name, a)
                    k2 = Lam(self.synth(inner, k.body)[0], k.param.name)
                else:
                    k2 = self.synth(env, k)[0]
                out = (m2, k2)
            case "Ref.set", (r, v):
                r2, rty = self.synth(env, r)
                rn = normalize_type(ctx, rty)
                if not isinstance(rn, RefType):
                    raise TypeMismatch("a reference", K._show(ctx, rn))
                out = (r2, self.check(env, v, rn.arg))
            case "getEnvFlag", (s,):
                out = (self.check(env, s, BaseType("string")),)
            case "Io.trace", (op, v):
                out = (self.check(env, op, BaseType("string")), self.synth(env, v)[0])
            case _:
                out = tuple(self.synth(env, a)[0] for a in args)
        t = EffPrim(name, out)
        return K.check(ctx, t, exp) if exp is not None else t

    # -- expressions: synthesis ---------------------------------------------------

    @_spanned
    def synth(self, env: Env, e) -> tuple[Term, Term]:
        ctx = env.ctx
        match e:
            case A.Name(n):
                return self._name(env, n)
            case A.Literal(v):
                t = Lit(v)
                return t, BaseType(t.kind)
            case A.Proj(base, f):
                prim = self._is_prim_name(env, e)
                if prim is not None:
                    if prim in CONSTANTS:
                        return Const(prim), CONSTANTS[prim].type
                    raise CannotSynthesize(f"the primitive {prim} must be applied to its arguments")
                b, bty = self.synth(env, base)
                return self.field(env, b, bty, f)
            case A.Apply():
                head, args = _spine(e)
                prim = self._is_prim_name(env, head)
                if prim is not None:
                    t = self._prim(env, prim, args, None)
                    return t, K.infer(ctx, t)
                t, ty = self.synth(env, head)
                for a in args:
                    t, ty = self._apply(env, t, ty, a)
                return t, ty
            case A.TypeApp(f, arg):
                t, ty = self.synth(env, f)
                return self._apply(env, t, ty, A.ClsExpr(arg, span=e.span), universal_only=True)
            case A.Annot(inner, ty):
                t2 = self.cls(env, ty)
                K.sort_of(ctx, t2)
                return _ann(self.check(env, inner, t2), t2), t2
            case A.Tuple(items):
                parts = [self.synth(env, i) for i in items]
                t, ty = parts[-1]
                for a, aty in reversed(parts[:-1]):
                    t, ty = Pair(a, t), product(aty, ty)
                return Ann(t, ty), ty
            case A.IfExpr(c, a, b):
                c2 = self.check(env, c, BOOL)
                a2, aty = self.synth(env, a)
                return If(c2, a2, self.check(env, b, aty)), aty
            case A.LetVal(name, value, body):
                v, vty = self.synth(env, value)
                inner = env.bind_var(name, vty, v)
                b, bty = self.synth(inner, body)
                return App(Lam(b, name), v), _strengthen(inner, bty, 1, f"the body of let {name}")
            case A.Fn(param, body) | A.BigLambda(param, body):
                if param.classifier is None:
                    raise CannotSynthesize(f"annotate the parameter {param.name}")
                dom = self.cls(env, param.classifier)
                b, bty = self.synth(env.bind_var(param.name, dom), body)
                lam, pi = Lam(b, param.name), Pi(dom, bty, param.name)
                if isinstance(e, A.BigLambda):
                    return Ann(Eta(lam), Mod(pi)), Mod(pi)
                return Ann(lam, pi), pi
            case A.EtaNotation(u, sig):
                if sig is None:
                    raise CannotSynthesize("annotate the package: η[A] u")
                s = self.cls(env, sig)
                return Ann(Eta(self.check(env, u, s)), Mod(s)), Mod(s)
            case A.Pack(w, b, ty):
                if ty is None:
                    raise CannotSynthesize("annotate the package: pack <u, v> as T")
                t2 = self.cls(env, ty)
                return Ann(self.check(env, e, t2), t2), t2
            case A.Unpack(pkg, x, y, body):
                return self._unpack(env, pkg, x, y, body, None)
            case A.BindModule(name, pkg, body, sig):
                return self._bind_module(env, name, pkg, body, sig, None)
            case A.StructExpr(decls):
                t, ty = self._struct_synth(env, decls, set())
                return _ann(t, ty), ty
            case A.ClsExpr(c):
                t = self.cls(env, c)
                return t, K.infer(ctx, t)
            case A.FnCase():
                raise CannotSynthesize("annotate the case function with its type")
        raise CannotSynthesize(f"cannot elaborate {type(e).__name__} here")

    def _apply(self, env: Env, t: Term, ty: Term, arg, universal_only: bool = False) -> tuple[Term, Term]:
        fn = normalize_type(env.ctx, ty)
        if isinstance(fn, Mod):
            pi = normalize_type(env.ctx, fn.arg)
            if isinstance(pi, Pi):
                a = self.check(env, arg, pi.dom)
                return Bind(t, None, App(Var(0), shift(a, 1)), "z"), subst(pi.cod, 0, a)
        if isinstance(fn, Pi) and not universal_only:
            a = self.check(env, arg, fn.dom)
            return App(t, a), subst(fn.cod, 0, a)
        raise TypeMismatch("a universal package" if universal_only else "a function", K._show(env.ctx, fn))

    def _struct_synth(self, env: Env, decls: tuple, seen: set) -> tuple[Term, Term]:
        if not decls:
            return Lit(()), UNIT_T
        d = decls[0]
        if d.name in seen:
            raise DuplicateField(f"duplicate field {d.name}", d.span)
        try:
            a, aty = self._field_synth(env, d)
        except ModmlError as err:
            raise err.at(d.span)
        t, ty = self._struct_synth(env.macro(d.name, a), decls[1:], seen | {d.name})
        return Pair(a, t), Sigma(aty, shift(ty, 1), d.name)

    def _field_synth(self, env: Env, d) -> tuple[Term, Term]:
        match d:
            case A.TypeDecl(name, None):
                raise SignatureMismatch(f"type {name} needs a definition inside a structure")
            case A.TypeDecl(name, manifest):
                tau = self.cls(env, manifest)
                K.require_sort(env.ctx, tau, Sort.TP)
                return tau, Singleton(tau)
            case A.ValDecl(name, ty, expr):
                return self.synth(env, expr if ty is None else A.Annot(expr, ty, span=d.span))
            case A.FunDecl(name, params, result, body):
                return self._fun(env, params, result, body)
            case A.StructureDecl(name, asc, body):
                return self.synth(env, body if asc is None else A.Annot(body, asc, span=d.span))
        raise SignatureMismatch(f"{type(d).__name__} cannot appear inside a structure")

    def _fun(self, env: Env, params: tuple, result, body) -> tuple[Term, Term]:
        """``fun f p1 .. pn : R = e``; kind- or signature-classified parameters become universals."""
        if not params:
            if result is None:
                return self.synth(env, body)
            r = self.cls(env, result)
            return self.check(env, body, r), r
        p = params[0]
        if p.classifier is None:
            raise CannotSynthesize(f"annotate the parameter {p.name}").at(p.span)
        dom = self.cls(env, p.classifier)
        b, bty = self._fun(env.bind_var(p.name, dom), params[1:], result, body)
        lam, pi = Lam(b, p.name), Pi(dom, bty, p.name)
        if K.sort_of(env.ctx, dom) is not Sort.TP:
            return Eta(lam), Mod(pi)
        return lam, pi

    # -- declarations -------------------------------------------------------------

    def declaration(self, env: Env, d) -> tuple[Env, Optional[ElabDecl]]:
        try:
            return self._declaration(env, d)
        except ModmlError as err:
            raise err.at(d.span)

    def _declaration(self, env: Env, d) -> tuple[Env, Optional[ElabDecl]]:
        ctx = env.ctx
        if env.lookup(d.name) is not None and d.name != "_":
            raise DuplicateField(f"{d.name} is already declared")
        opaque = False
        match d:
            case A.SignatureDecl(name, body):
                s = self.cls(env, body)
                K.sort_of(ctx, s)
                return env.macro(name, s, "sig"), None
            case A.TypeDecl(name, None):
                term, ty = None, TP
            case A.TypeDecl(name, manifest):
                term = self.cls(env, manifest)
                K.require_sort(ctx, term, Sort.TP)
                ty = Singleton(term)
            case A.StructureDecl(name, asc, body, opaque):
                if asc is not None:
                    ty = self.cls(env, asc)
                    term = self.check(env, body, ty)
                else:
                    term, ty = self.synth(env, body)
            case A.FunctorDecl(name, param, psig, rsig, body):
                p = self.cls(env, psig)
                inner = env.bind_var(param, p)
                if rsig is not None:
                    r = self.cls(inner, rsig)
                    b = self.check(inner, body, r)
                else:
                    b, r = self.synth(inner, body)
                term, ty = Lam(b, param), Pi(p, r, param)
            case A.ValDecl(name, None, expr):
                term, ty = self.synth(env, expr)
            case A.ValDecl(name, t, expr):
                ty = self.cls(env, t)
                term = self.check(env, expr, ty)
            case A.FunDecl(name, params, result, body):
                term, ty = self._fun(env, params, result, body)
        sort = K.sort_of(ctx, ty)
        if term is not None:
            if isinstance(term, Ann):
                term = term.term
            term = K.check(ctx, term, ty)
        value = None if opaque else term
        return env.bind_var(d.name, ty, value), ElabDecl(d.name, term, ty, sort, opaque)

    def program(self, decls: list) -> ElabResult:
        env = self.env
        out = []
        sigs = {}
        for d in decls:
            env, ed = self.declaration(env, d)
            if ed is None:
                sigs[d.name] = env.resolve(env.lookup(d.name))
            else:
                out.append(ed)
        self.env = env
        return ElabResult(env.ctx, out, sigs, env)


def _fun_as_expr(d: A.FunDecl):
    body = d.body if d.result is None else A.Annot(d.body, d.result, span=d.span)
    for p in reversed(d.params):
        body = A.Fn(p, body, span=d.span)
    return body


def elaborate(decls: list, env: Optional[Env] = None) -> ElabResult:
    """Elaborate and kernel-check a list of surface declarations."""
    return Elaborator(env).program(decls)


def elaborate_source(source: str) -> ElabResult:
    from modml.surface.parser import parse

    return elaborate(parse(source))


def elab_expr(source: str, env: Optional[Env] = None, against: Optional[Term] = None) -> tuple[Term, Term]:
    """Elaborate one expression (checked when ``against`` is given) and kernel-check it."""
    from modml.surface.parser import parse_expr

    e = parse_expr(source)
    el = Elaborator(env)
    env = el.env
    if against is not None:
        t = el.check(env, e, against)
        return K.check(env.ctx, t, against), against
    t, ty = el.synth(env, e)
    return K.synth(env.ctx, t)[0], ty
