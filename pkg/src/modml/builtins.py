"""Kernel constants with fixed classifiers and their computational behaviour."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable

from modml.syntax import BaseType, Term, arrow, product

INT = BaseType("int")
BOOL = BaseType("bool")
STRING = BaseType("string")
UNIT_T = BaseType("unit")

BASE_TYPES = ("int", "bool", "string", "unit", "callback")


@dataclass(frozen=True)
class Builtin:
    name: str
    type: Term
    arity: int
    impl: Callable[..., Any]


def _pair_ints(p):
    a, b = p
    if isinstance(a, int) and isinstance(b, int) and not isinstance(a, bool) and not isinstance(b, bool):
        return a, b
    return None


def _int_eq(p):
    ab = _pair_ints(p)
    return None if ab is None else ab[0] == ab[1]


CONSTANTS: dict[str, Builtin] = {
    b.name: b
    for b in [
        Builtin("Int.add", arrow(INT, arrow(INT, INT)), 2, lambda a, b: a + b),
        Builtin("Int.sub", arrow(INT, arrow(INT, INT)), 2, lambda a, b: a - b),
        Builtin("Int.eq", arrow(product(INT, INT), BOOL), 1, _int_eq),
        Builtin("Bool.not", arrow(BOOL, BOOL), 1, lambda a: not a),
        Builtin("String.concat", arrow(STRING, arrow(STRING, STRING)), 2, lambda a, b: a + b),
    ]
}

# effect primitives and their arities
EFF_PRIMS: dict[str, int] = {
    "Eff.return": 1,
    "Eff.bind": 2,
    "Ref.new": 1,
    "Ref.get": 1,
    "Ref.set": 2,
    "getEnvFlag": 1,
    "Io.trace": 2,
}
