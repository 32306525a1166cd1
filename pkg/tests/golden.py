"""Golden equality instances for the package quantifiers, shared by the unit and acceptance suites.

Each instance is a ``Golden(name, ctx, lhs, rhs, at, definitional)``.  ``definitional``
records whether the kernel is expected to decide the equation; every instance is
semantically valid.
"""

from dataclasses import dataclass

from modml.surface.expand import big_lambda, expand_exists, expand_forall, pack, type_app, unpack
from modml.syntax import (
    EMPTY, TP, Ann, App, BaseType, Const, Context, Fst, Lam, Lit, Pair, Snd, Term, Var, arrow, product, shift,
)

INT, BOOL, UNIT = BaseType("int"), BaseType("bool"), BaseType("unit")
A0 = Var(0)


@dataclass(frozen=True)
class Golden:
    name: str
    ctx: Context
    lhs: Term
    rhs: Term
    at: Term
    definitional: bool = True


# (label, witness type, body over the bound type variable, value of body[witness], consumer)
# consumers have classifier Πa:TP. body → int
_EXISTS = [
    ("int-id", INT, A0, Lit(3), Lam(Lam(Lit(1)))),
    ("bool-id", BOOL, A0, Lit(True), Lam(Lam(Lit(2)))),
    ("unit-id", UNIT, A0, Lit(()), Lam(Lam(Lit(0)))),
    ("int-pair", INT, product(A0, A0), Pair(Lit(1), Lit(2)), Lam(Lam(Lit(4)))),
    ("int-endo", INT, arrow(A0, A0), Lam(Var(0)), Lam(Lam(Lit(5)))),
    ("counter", INT, product(A0, arrow(A0, INT)), Pair(Lit(2), Lam(App(App(Const("Int.add"), Var(0)), Lit(1)))),
     Lam(Lam(App(Snd(Var(0)), Fst(Var(0)))))),
    ("flip", BOOL, product(A0, arrow(A0, BOOL)), Pair(Lit(True), Lam(App(Const("Bool.not"), Var(0)))),
     Lam(Lam(Lit(0)))),
    ("observe-int", INT, arrow(A0, INT), Lam(App(App(Const("Int.add"), Var(0)), Var(0))), Lam(Lam(Lit(6)))),
    ("bool-pair", BOOL, product(A0, A0), Pair(Lit(False), Lit(True)), Lam(Lam(Lit(7)))),
    ("unit-counter", UNIT, product(A0, arrow(A0, INT)), Pair(Lit(()), Lam(Lit(9))),
     Lam(Lam(App(Snd(Var(0)), Fst(Var(0)))))),
]


def exists_type(body: Term) -> Term:
    return expand_exists("a", TP, body, EMPTY)


def exists_intro(witness: Term, body: Term, value: Term) -> Term:
    return Ann(pack(witness, value), exists_type(body))


def exists_suite() -> list[tuple]:
    """(label, ∃-type, intro, elim, comp golden, ext golden) per instantiation."""
    out = []
    for label, tau, body, value, consumer in _EXISTS:
        ex = exists_type(body)
        intro = exists_intro(tau, body, value)
        elim = unpack(intro, consumer, INT)
        comp = Golden(f"∃-comp {label}", EMPTY, elim, App(App(consumer, tau), value), INT)
        ctx = EMPTY.extend(ex, "u")
        repack = unpack(Var(0), Lam(Lam(pack(Var(1), Var(0)))), ex)
        ext = Golden(f"∃-ext {label}", ctx, repack, Var(0), ex)
        out.append((label, ex, intro, elim, comp, ext))
    return out


# (label, body over a, argument type)
_FORALL = [
    ("id-int", arrow(A0, A0), INT),
    ("id-bool", arrow(A0, A0), BOOL),
    ("id-unit", arrow(A0, A0), UNIT),
    ("const-int", arrow(A0, INT), INT),
    ("const-bool", arrow(A0, INT), BOOL),
    ("dup-int", arrow(A0, product(A0, A0)), INT),
    ("dup-bool", arrow(A0, product(A0, A0)), BOOL),
    ("twice-int", arrow(arrow(A0, A0), arrow(A0, A0)), INT),
    ("proj-bool", arrow(product(A0, A0), A0), BOOL),
    ("swap-int", arrow(product(A0, INT), product(INT, A0)), INT),
]


def forall_type(body: Term) -> Term:
    return expand_forall("a", TP, body, EMPTY)


def _subst_top(body: Term, tau: Term) -> Term:
    from modml.syntax import substitute

    return substitute(body, tau)


def forall_suite() -> list[Golden]:
    """∀-comp and ∀-ext goldens; ext at a neutral ``u`` is semantic only."""
    from modml.syntax import Pi

    out = []
    for label, body, tau in _FORALL:
        pi = Pi(TP, body, "a")
        fa = forall_type(body)
        inst = _subst_top(body, tau)
        # ∀-comp: (Λx. u x)[v] ≡ u v with u a variable of the Π-signature
        ctx = EMPTY.extend(pi, "u")
        lhs = type_app(Ann(big_lambda(App(Var(1), Var(0))), fa), tau, inst)
        out.append(Golden(f"∀-comp {label}", ctx, lhs, App(Var(0), tau), inst))
        # ∀-ext at an η-introduced package: Λx. (Λy. t y)[x] ≡ Λy. t y
        pkg = Ann(big_lambda(App(Var(1), Var(0))), fa)
        lhs = big_lambda(type_app(shift(pkg, 1), Var(0), body))
        out.append(Golden(f"∀-ext η {label}", ctx, lhs, big_lambda(App(Var(1), Var(0))), fa))
        # ∀-ext at a neutral package
        nctx = EMPTY.extend(fa, "u")
        lhs = big_lambda(type_app(Var(1), Var(0), body))
        out.append(Golden(f"∀-ext neutral {label}", nctx, lhs, Var(0), fa, definitional=False))
    return out
