"""A partial combinatory algebra: closed untyped λ-terms under fuel-bounded
normal-order reduction.

Application ``f · a`` is the normal form of ``f a``, or ``None`` when no
normal form is reached within the fuel budget (partiality).  Results are
cached, and a cached answer is reused for any fuel at least as large as
the number of steps it took, so every operation is monotone in fuel.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional

DEFAULT_FUEL = 10_000


class PTerm:
    __slots__ = ()

    def __str__(self) -> str:
        return show(self)

    def __repr__(self) -> str:
        return show(self)


@dataclass(frozen=True, repr=False)
class PVar(PTerm):
    index: int


@dataclass(frozen=True, repr=False)
class PLam(PTerm):
    body: PTerm


@dataclass(frozen=True, repr=False)
class PApp(PTerm):
    fn: PTerm
    arg: PTerm


# -- substitution -----------------------------------------------------------------


def pshift(t: PTerm, by: int, cutoff: int = 0) -> PTerm:
    match t:
        case PVar(i):
            return PVar(i + by) if i >= cutoff else t
        case PLam(b):
            return PLam(pshift(b, by, cutoff + 1))
        case PApp(f, a):
            return PApp(pshift(f, by, cutoff), pshift(a, by, cutoff))


def psubst(t: PTerm, arg: PTerm, depth: int = 0) -> PTerm:
    """Instantiate index ``depth`` by ``arg`` (closed or shifted by the caller)."""
    match t:
        case PVar(i):
            if i == depth:
                return pshift(arg, depth) if depth else arg
            return PVar(i - 1) if i > depth else t
        case PLam(b):
            return PLam(psubst(b, arg, depth + 1))
        case PApp(f, a):
            return PApp(psubst(f, arg, depth), psubst(a, arg, depth))


def is_closed(t: PTerm, depth: int = 0) -> bool:
    match t:
        case PVar(i):
            return i < depth
        case PLam(b):
            return is_closed(b, depth + 1)
        case PApp(f, a):
            return is_closed(f, depth) and is_closed(a, depth)


def size(t: PTerm) -> int:
    match t:
        case PVar():
            return 1
        case PLam(b):
            return 1 + size(b)
        case PApp(f, a):
            return 1 + size(f) + size(a)


# -- normal-order reduction -------------------------------------------------------


class _OutOfFuel(Exception):
    pass


class _Budget:
    __slots__ = ("left", "used", "limit")

    def __init__(self, fuel: int, limit: int):
        self.left = fuel
        self.used = 0
        self.limit = limit

    def step(self):
        self.left -= 1
        self.used += 1
        if self.left < 0:
            raise _OutOfFuel


def _whnf(t: PTerm, b: _Budget) -> PTerm:
    spine = []
    while True:
        match t:
            case PApp(f, a):
                spine.append(a)
                t = f
            case PLam(body) if spine:
                b.step()
                t = psubst(body, spine.pop())
            case _:
                break
        if size(t) > b.limit:
            raise _OutOfFuel
    for a in reversed(spine):
        t = PApp(t, a)
    return t


def _nf(t: PTerm, b: _Budget) -> PTerm:
    t = _whnf(t, b)
    match t:
        case PLam(body):
            return PLam(_nf(body, b))
        case PVar():
            return t
    # neutral application: head is a variable
    args = []
    while isinstance(t, PApp):
        args.append(t.arg)
        t = t.fn
    out = t
    for a in reversed(args):
        out = PApp(out, _nf(a, b))
    return out


# term -> (steps needed, normal form) or (fuel tried, None)
_CACHE: dict = {}
SIZE_LIMIT = 5_000


def normalize(t: PTerm, fuel: int = DEFAULT_FUEL) -> Optional[PTerm]:
    """β-normal form of ``t`` within ``fuel`` steps, else ``None``."""
    hit = _CACHE.get(t)
    if hit is not None:
        steps, nf = hit
        if nf is not None:
            return nf if steps <= fuel else None
        if fuel <= steps:
            return None
    b = _Budget(fuel, SIZE_LIMIT)
    try:
        nf = _nf(t, b)
    except (_OutOfFuel, RecursionError):
        _CACHE[t] = (fuel, None)
        return None
    _CACHE[t] = (b.used, nf)
    return nf


def pca_apply(f: PTerm, a: PTerm, fuel: int = DEFAULT_FUEL) -> Optional[PTerm]:
    """The partial application ``f · a``."""
    return normalize(PApp(f, a), fuel)


def apply_all(f: PTerm, *args: PTerm, fuel: int = DEFAULT_FUEL) -> Optional[PTerm]:
    t = f
    for a in args:
        t = PApp(t, a)
    return normalize(t, fuel)


def defined(t: Optional[PTerm]) -> bool:
    return t is not None


# -- standard combinators --------------------------------------------------------

V0, V1, V2 = PVar(0), PVar(1), PVar(2)

I = PLam(V0)
K = PLam(PLam(V1))
KI = PLam(PLam(V0))
S = PLam(PLam(PLam(PApp(PApp(V2, V0), PApp(V1, V0)))))
PAIR = PLam(PLam(PLam(PApp(PApp(V0, V2), V1))))
FST = PLam(PApp(V0, K))
SND = PLam(PApp(V0, KI))
_DELTA = PLam(PApp(V0, V0))
OMEGA = PApp(_DELTA, _DELTA)
COMP = PLam(PLam(PLam(PApp(V2, PApp(V1, V0)))))


def comp(f: PTerm, g: PTerm) -> PTerm:
    """``λx. f (g x)`` for closed ``f`` and ``g``."""
    return PLam(PApp(pshift(f, 1), PApp(pshift(g, 1), V0)))


def const(c: PTerm) -> PTerm:
    return PLam(pshift(c, 1))


def pair(a: PTerm, b: PTerm) -> PTerm:
    return PLam(PApp(PApp(V0, pshift(a, 1)), pshift(b, 1)))


def selector(i: int, k: int) -> PTerm:
    """The code ``λx0 … x(k-1). x_i``."""
    t: PTerm = PVar(k - 1 - i)
    for _ in range(k):
        t = PLam(t)
    return t


def codes(k: int) -> list[PTerm]:
    return [selector(i, k) for i in range(k)]


def table(outputs: list[PTerm]) -> PTerm:
    """``λn. n o0 … o(k-1)``: sends the code ``selector(i, k)`` to ``outputs[i]``."""
    body: PTerm = V0
    for o in outputs:
        body = PApp(body, pshift(o, 1))
    return PLam(body)


def church(n: int) -> PTerm:
    body: PTerm = V0
    for _ in range(n):
        body = PApp(V1, body)
    return PLam(PLam(body))


# -- concrete syntax for fixtures ------------------------------------------------

NAMED = {"I": I, "K": K, "KI": KI, "S": S, "PAIR": PAIR, "FST": FST, "SND": SND, "OMEGA": OMEGA,
         "COMP": COMP}

_TOK = re.compile(r"\s*(λ|\\|\.|\(|\)|#\d+/\d+|[A-Za-z_][A-Za-z0-9_']*)")


def parse_term(src: str) -> PTerm:
    r"""Parse ``\x y. x``-style terms.

    ``#i/k`` is ``selector(i, k)``; the upper-case names in ``NAMED`` are
    the standard combinators.
    """
    toks = []
    pos = 0
    src = src.strip()
    while pos < len(src):
        m = _TOK.match(src, pos)
        if m is None:
            raise ValueError(f"bad λ-term syntax at {src[pos:]!r}")
        toks.append(m.group(1))
        pos = m.end()
        while pos < len(src) and src[pos].isspace():
            pos += 1
    i = 0

    def term(scope: list) -> PTerm:
        nonlocal i
        if i < len(toks) and toks[i] in ("λ", "\\"):
            i += 1
            names = []
            while toks[i] != ".":
                names.append(toks[i])
                i += 1
            i += 1
            body = term(scope + names)
            for _ in names:
                body = PLam(body)
            return body
        t = atom(scope)
        while i < len(toks) and toks[i] not in (")",):
            if toks[i] in ("λ", "\\"):
                t = PApp(t, term(scope))
                break
            t = PApp(t, atom(scope))
        return t

    def atom(scope: list) -> PTerm:
        nonlocal i
        tok = toks[i]
        i += 1
        if tok == "(":
            t = term(scope)
            if toks[i] != ")":
                raise ValueError("expected )")
            i += 1
            return t
        if tok.startswith("#"):
            a, b = tok[1:].split("/")
            return selector(int(a), int(b))
        if tok in scope:
            return PVar(len(scope) - 1 - max(j for j, n in enumerate(scope) if n == tok))
        if tok in NAMED:
            return NAMED[tok]
        raise ValueError(f"unbound name {tok} in λ-term")

    t = term([])
    if i != len(toks):
        raise ValueError(f"trailing input in λ-term: {toks[i:]}")
    return t


def show(t: PTerm, depth: int = 0) -> str:
    match t:
        case PVar(i):
            return f"x{depth - 1 - i}" if i < depth else f"#{i}"
        case PLam(_):
            names = []
            while isinstance(t, PLam):
                names.append(f"x{depth}")
                depth += 1
                t = t.body
            return f"λ{' '.join(names)}. {show(t, depth)}"
        case PApp(f, a):
            fs = show(f, depth)
            if isinstance(f, PLam):
                fs = f"({fs})"
            as_ = show(a, depth)
            if isinstance(a, (PLam, PApp)):
                as_ = f"({as_})"
            return f"{fs} {as_}"
