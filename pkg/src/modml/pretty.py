"""Printer for kernel terms in ○/η/bind notation."""

from __future__ import annotations

from typing import Optional, Sequence

from modml.syntax import (
    Ann, App, BaseType, Bind, Const, EffPrim, EffType, Eta, Fst, If, Lam, Lit, Mod,
    Pair, Pi, RefType, Sigma, Singleton, Snd, SortConst, Term, Var, free_in,
)

# precedence levels: 0 binder bodies, 1 arrows, 2 products, 3 application, 4 atoms
_BINDER, _ARROW, _PROD, _APP, _ATOM = range(5)


def _fresh(hint: str, names: Sequence[str]) -> str:
    base = hint if hint and hint != "_" else "x"
    if base not in names:
        return base
    i = 1
    while f"{base}{i}" in names:
        i += 1
    return f"{base}{i}"


def _lit(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, str):
        return '"' + value.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if value == ():
        return "()"
    return str(value)


def pretty(t: Term, names: Optional[Sequence[str]] = None) -> str:
    """Render ``t``; ``names`` are the context names, outermost first."""
    return _pp(t, list(names or []), _BINDER)


def _paren(s: str, need: bool) -> str:
    return f"({s})" if need else s


def _pp(t: Term, names: list[str], prec: int) -> str:
    match t:
        case Var(i):
            if i < len(names):
                return names[-1 - i]
            return f"#{i - len(names)}"
        case SortConst(s):
            return str(s)
        case BaseType(n) | Const(n):
            return n
        case Lit(v):
            return _lit(v)
        case Pi(dom, cod, name):
            if not free_in(cod, 0):
                s = f"{_pp(dom, names, _PROD)} → {_pp(cod, names + ['_'], _ARROW)}"
                return _paren(s, prec > _ARROW)
            x = _fresh(name, names)
            s = f"Π {x}:{_pp(dom, names, _ARROW)}. {_pp(cod, names + [x], _BINDER)}"
            return _paren(s, prec > _BINDER)
        case Sigma(dom, cod, name):
            if not free_in(cod, 0):
                s = f"{_pp(dom, names, _APP)} × {_pp(cod, names + ['_'], _PROD)}"
                return _paren(s, prec > _PROD)
            x = _fresh(name, names)
            s = f"Σ {x}:{_pp(dom, names, _ARROW)}. {_pp(cod, names + [x], _BINDER)}"
            return _paren(s, prec > _BINDER)
        case Lam(body, name):
            x = _fresh(name, names)
            return _paren(f"λ{x}. {_pp(body, names + [x], _BINDER)}", prec > _BINDER)
        case App(f, a):
            return _paren(f"{_pp(f, names, _APP)} · {_pp(a, names, _ATOM)}", prec > _APP)
        case Pair(a, b):
            return f"⟨{_pp(a, names, _BINDER)}, {_pp(b, names, _BINDER)}⟩"
        case Fst(a):
            return f"{_pp(a, names, _ATOM)}.1"
        case Snd(a):
            return f"{_pp(a, names, _ATOM)}.2"
        case Mod(a):
            return _paren(f"○{_pp(a, names, _ATOM)}", prec > _APP)
        case Eta(a):
            return _paren(f"η {_pp(a, names, _ATOM)}", prec > _APP)
        case Bind(u, motive, body, name):
            x = _fresh(name, names)
            at = "" if motive is None else f" : {_pp(motive, names, _ARROW)}"
            s = f"bind {x} = {_pp(u, names, _ARROW)} in {_pp(body, names + [x], _BINDER)}{at}"
            return _paren(s, prec > _BINDER)
        case Singleton(a):
            return f"S({_pp(a, names, _BINDER)})"
        case EffType(a):
            return _paren(f"{_pp(a, names, _APP)} eff", prec > _APP)
        case RefType(a):
            return _paren(f"{_pp(a, names, _APP)} ref", prec > _APP)
        case EffPrim(name, args):
            inner = " ".join(_pp(a, names, _ATOM) for a in args)
            return _paren(f"{name} {inner}".strip(), prec > _APP and bool(args))
        case Ann(tm, ty):
            return f"({_pp(tm, names, _BINDER)} : {_pp(ty, names, _BINDER)})"
        case If(c, a, b):
            s = f"if {_pp(c, names, _BINDER)} then {_pp(a, names, _BINDER)} else {_pp(b, names, _BINDER)}"
            return _paren(s, prec > _BINDER)
    raise TypeError(f"not a term: {t!r}")
