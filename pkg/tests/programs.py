"""Seeded generator of closed, well-typed modal programs of classifier ○int."""

import random

from modml.syntax import Ann, App, BaseType, Bind, Const, Eta, If, Lit, Mod, Term, Var, shift

INT = BaseType("int")
MINT = Mod(INT)


def expr(rng: random.Random, nvars: int, depth: int = 2) -> Term:
    """An int-valued expression over ``nvars`` int variables."""
    roll = rng.random()
    if depth > 0 and roll < 0.3:
        return App(App(Const("Int.add"), expr(rng, nvars, depth - 1)), expr(rng, nvars, depth - 1))
    if nvars and roll < 0.7:
        return Var(rng.randrange(nvars))
    return Lit(rng.randrange(10))


def program(rng: random.Random, depth: int, nvars: int = 0) -> Term:
    """A term of classifier ○int with ``depth`` ≤ the requested nesting of binds."""
    roll = rng.random()
    if depth <= 0 or roll < 0.25:
        return Eta(expr(rng, nvars))
    if roll < 0.85:
        return Bind(scrutinee(program(rng, depth - 1, nvars)), MINT, program(rng, depth - 1, nvars + 1), "x")
    return If(Lit(rng.random() < 0.5), program(rng, depth - 1, nvars), program(rng, depth - 1, nvars))


def scrutinee(t: Term) -> Term:
    """Bind scrutinees must synthesize, so introductions are annotated."""
    return t if isinstance(t, Bind) else Ann(t, MINT)


def law_instances(rng: random.Random, depth: int = 4):
    """One (name, lhs, rhs) triple per monad law, all closed at ○int."""
    d = max(depth - 2, 0)
    m = program(rng, d)
    f = program(rng, d, 1)   # body with one free int
    g = program(rng, d, 1)
    a = expr(rng, 0)
    left = (Bind(scrutinee(Eta(a)), MINT, f, "x"), _instantiate(f, a))
    right = (Bind(scrutinee(m), MINT, Eta(Var(0)), "x"), m)
    assoc = (
        Bind(Bind(scrutinee(m), MINT, f, "x"), MINT, g, "y"),
        Bind(scrutinee(m), MINT, Bind(scrutinee(f), MINT, shift(g, 1, 1), "y"), "x"),
    )
    return [("left unit", *left), ("right unit", *right), ("associativity", *assoc)]


def _instantiate(body: Term, arg: Term) -> Term:
    from modml.syntax import substitute

    return substitute(body, arg)
