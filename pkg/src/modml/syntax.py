"""Kernel terms, sorts, contexts and de Bruijn substitution.

Binding is by de Bruijn index: ``Var(0)`` is the innermost binder.  Binder
positions are ``Pi.cod``, ``Lam.body``, ``Sigma.snd`` and ``Bind.body``.
Every binder also carries a ``name`` hint used only by the pretty-printer and
for recovering structure field names; hints never take part in equality.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, fields, replace
from typing import Any, Callable, Optional


class Sort(enum.Enum):
    SIG = "SIG"
    KIND = "KIND"
    TP = "TP"

    def __str__(self) -> str:
        return self.value


def sort_leq(lo: Sort, hi: Sort) -> bool:
    """Subsumption order: TP <= SIG, KIND <= SIG, TP and KIND incomparable."""
    return lo is hi or hi is Sort.SIG


class Term:
    __slots__ = ()

    def __str__(self) -> str:
        from modml.pretty import pretty

        return pretty(self)


@dataclass(frozen=True)
class Var(Term):
    index: int


@dataclass(frozen=True)
class SortConst(Term):
    sort: Sort


@dataclass(frozen=True)
class Pi(Term):
    dom: Term
    cod: Term
    name: str = field(default="x", compare=False)


@dataclass(frozen=True)
class Lam(Term):
    body: Term
    name: str = field(default="x", compare=False)


@dataclass(frozen=True)
class App(Term):
    fn: Term
    arg: Term


@dataclass(frozen=True)
class Sigma(Term):
    fst: Term
    snd: Term
    name: str = field(default="x", compare=False)


@dataclass(frozen=True)
class Pair(Term):
    fst: Term
    snd: Term


@dataclass(frozen=True)
class Fst(Term):
    arg: Term


@dataclass(frozen=True)
class Snd(Term):
    arg: Term


@dataclass(frozen=True)
class Mod(Term):
    """The reflector: the type of runtime packages of a signature."""

    arg: Term


@dataclass(frozen=True)
class Eta(Term):
    arg: Term


@dataclass(frozen=True)
class Bind(Term):
    """``bind x = scrutinee in body`` at the modal classifier ``motive``.

    ``motive`` may be ``None`` only in terms produced by the surface
    elaborator; the checker fills it in.
    """

    scrutinee: Term
    motive: Optional[Term]
    body: Term
    name: str = field(default="x", compare=False)


@dataclass(frozen=True)
class Singleton(Term):
    of: Term


@dataclass(frozen=True)
class BaseType(Term):
    name: str


@dataclass(frozen=True)
class Const(Term):
    name: str


@dataclass(frozen=True)
class EffType(Term):
    arg: Term


@dataclass(frozen=True)
class RefType(Term):
    arg: Term


@dataclass(frozen=True)
class EffPrim(Term):
    name: str
    args: tuple = ()


@dataclass(frozen=True)
class Lit(Term):
    value: Any
    kind: str = field(default="", init=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", lit_kind(self.value))


@dataclass(frozen=True)
class Ann(Term):
    term: Term
    type: Term


@dataclass(frozen=True)
class If(Term):
    cond: Term
    then: Term
    else_: Term


def lit_kind(value: Any) -> str:
    if isinstance(value, bool):
        return "bool"
    if isinstance(value, int):
        return "int"
    if isinstance(value, str):
        return "string"
    if value == ():
        return "unit"
    raise TypeError(f"unsupported literal {value!r}")


UNIT = Lit(())
TP = SortConst(Sort.TP)
KIND = SortConst(Sort.KIND)
SIG = SortConst(Sort.SIG)


def base(name: str) -> BaseType:
    return BaseType(name)


def arrow(dom: Term, cod: Term, name: str = "_") -> Pi:
    """Non-dependent function classifier."""
    return Pi(dom, shift(cod, 1), name)


def product(left: Term, right: Term) -> Sigma:
    return Sigma(left, shift(right, 1), "_")


# binder fields per term class; every other Term-valued field is not under a binder
_BINDERS: dict[type, frozenset[str]] = {
    Pi: frozenset({"cod"}),
    Lam: frozenset({"body"}),
    Sigma: frozenset({"snd"}),
    Bind: frozenset({"body"}),
}


def _rebuild(t: Term, on_var: Callable[[int, int], Term], depth: int) -> Term:
    if isinstance(t, Var):
        return on_var(t.index, depth)
    binders = _BINDERS.get(type(t), frozenset())
    changes = {}
    for f in fields(t):
        if not f.init:
            continue
        v = getattr(t, f.name)
        d = depth + 1 if f.name in binders else depth
        if isinstance(v, Term):
            nv = _rebuild(v, on_var, d)
        elif isinstance(v, tuple):
            nv = tuple(_rebuild(a, on_var, d) if isinstance(a, Term) else a for a in v)
        else:
            continue
        if nv is not v:
            changes[f.name] = nv
    return replace(t, **changes) if changes else t


def shift(t: Term, by: int, cutoff: int = 0) -> Term:
    """Add ``by`` to every index >= ``cutoff`` (free at the top)."""
    if by == 0:
        return t

    def on_var(i: int, depth: int) -> Term:
        if i >= cutoff + depth:
            if i + by < 0:
                raise ScopeError(f"index {i} shifted below zero")
            return Var(i + by)
        return Var(i)

    return _rebuild(t, on_var, 0)


def subst(t: Term, index: int, arg: Term) -> Term:
    """Replace ``Var(index)`` by ``arg`` and lower the indices above it."""

    def on_var(i: int, depth: int) -> Term:
        if i == index + depth:
            return shift(arg, depth)
        if i > index + depth:
            return Var(i - 1)
        return Var(i)

    return _rebuild(t, on_var, 0)


def substitute(body: Term, arg: Term) -> Term:
    """Instantiate the outermost bound variable of ``body`` with ``arg``."""
    return subst(body, 0, arg)


def free_in(t: Term, index: int) -> bool:
    hit = False

    def on_var(i: int, depth: int) -> Term:
        nonlocal hit
        if i == index + depth:
            hit = True
        return Var(i)

    _rebuild(t, on_var, 0)
    return hit


def max_free(t: Term) -> int:
    """One more than the largest free index, 0 for closed terms."""
    top = 0

    def on_var(i: int, depth: int) -> Term:
        nonlocal top
        if i >= depth:
            top = max(top, i - depth + 1)
        return Var(i)

    _rebuild(t, on_var, 0)
    return top


def strengthen(t: Term) -> Optional[Term]:
    """Drop the innermost variable; ``None`` if it occurs."""
    if free_in(t, 0):
        return None
    return shift(t, -1)


def alpha_equal(t: Term, u: Term) -> bool:
    return t == u


class ScopeError(Exception):
    pass


@dataclass(frozen=True)
class Entry:
    name: str
    type: Term
    value: Optional[Term] = None


class Context:
    """Telescope of entries, outermost first.  ``Var(i)`` refers to ``entries[-1 - i]``.

    An entry with a ``value`` is a transparent definition.  The evaluation
    environment is built incrementally and cached on the context.
    """

    __slots__ = ("entries", "_parent", "_env", "_types")

    def __init__(self, entries: tuple = (), _parent: Optional["Context"] = None):
        self.entries = tuple(entries)
        self._parent = _parent
        self._env = None
        self._types = None

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def extend(self, type_: Term, name: str = "x", value: Optional[Term] = None) -> "Context":
        return Context(self.entries + (Entry(name, type_, value),), _parent=self)

    def lookup(self, index: int) -> Entry:
        if not 0 <= index < len(self.entries):
            raise ScopeError(f"unbound variable #{index}")
        return self.entries[-1 - index]

    def type_of(self, index: int) -> Term:
        return shift(self.lookup(index).type, index + 1)

    def names(self) -> list[str]:
        return [e.name for e in self.entries]

    def __repr__(self) -> str:
        return f"Context({', '.join(e.name for e in self.entries)})"


EMPTY = Context()
