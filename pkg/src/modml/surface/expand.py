"""Macro expansions of the synthetic quantifiers into ○, Σ and Π.

    ∃x:A. B   ⤳  ○ Σx:A. B        ∀x:A. B   ⤳  ○ Πx:A. B
    pack⟨u,v⟩ ⤳  η⟨u, v⟩           Λx. u     ⤳  η(λx. u)
    unpack u as ⟨x,y⟩ in v  ⤳  bind z = u in v (z.1) (z.2)
    u[v]                    ⤳  bind z = u in z · v

Every function takes kernel terms in the ambient scope; ``v`` in
``unpack`` is a two-argument function there.  Passing ``ctx`` validates
the sorting premises through the kernel; a body counts as a type when it
sorts at TP or is modal.
"""

from __future__ import annotations

from typing import Optional

from modml.checker import is_modal, require_sort, sort_of
from modml.syntax import App, Bind, Context, Eta, Fst, Lam, Mod, Pair, Pi, Sigma, Snd, Sort, Term, Var, shift


def _validate(ctx: Optional[Context], binder: str, classifier: Term, body: Term) -> None:
    if ctx is None:
        return
    sort_of(ctx, classifier)  # any sort: indices may be kinds or signatures
    inner = ctx.extend(classifier, binder)
    # the body is a type: either in TP or modal (products and arrows of types)
    if is_modal(inner, body) is None:
        require_sort(inner, body, Sort.TP)


def expand_exists(binder: str, classifier: Term, body: Term, ctx: Optional[Context] = None) -> Term:
    """``∃binder:classifier. body`` as ``○Σ``; the body must be a type."""
    _validate(ctx, binder, classifier, body)
    return Mod(Sigma(classifier, body, binder))


def expand_forall(binder: str, classifier: Term, body: Term, ctx: Optional[Context] = None) -> Term:
    """``∀binder:classifier. body`` as ``○Π``; the body must be a type."""
    _validate(ctx, binder, classifier, body)
    return Mod(Pi(classifier, body, binder))


def pack(witness: Term, body: Term) -> Term:
    return Eta(Pair(witness, body))


def unpack(package: Term, fn: Term, motive: Optional[Term] = None, name: str = "z") -> Term:
    """``bind z = package in fn (z.1) (z.2)``."""
    return Bind(package, motive, App(App(shift(fn, 1), Fst(Var(0))), Snd(Var(0))), name)


def big_lambda(body: Term, name: str = "x") -> Term:
    return Eta(Lam(body, name))


def type_app(fn: Term, arg: Term, motive: Optional[Term] = None, name: str = "z") -> Term:
    """``bind z = fn in z · arg``."""
    return Bind(fn, motive, App(Var(0), shift(arg, 1)), name)
