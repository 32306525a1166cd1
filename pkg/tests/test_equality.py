import random

from hypothesis import given, settings, strategies as st

from modml import equality
from modml.checker import check
from modml.equality import equal, normalize
from modml.surface.expand import big_lambda, pack, type_app, unpack
from modml.syntax import (
    EMPTY, TP, Ann, App, BaseType, Bind, Const, Eta, Fst, Lam, Lit, Mod, Pair, Pi, Sigma, Singleton, Snd, Var,
    arrow, product,
)
from programs import MINT, law_instances, program, scrutinee

INT, BOOL = BaseType("int"), BaseType("bool")


def test_exists_comp():
    ex = Mod(Sigma(TP, Var(0), "a"))
    term = unpack(Ann(pack(INT, Lit(3)), ex), Lam(Lam(Var(0))), INT)
    assert equal(EMPTY, term, Lit(3), INT)
    assert normalize(EMPTY, term, INT) == Lit(3)


def test_exists_comp_general_shape():
    # bind z = η⟨u,v⟩ in w z.1 z.2  ≡  w u v
    w_ty = Pi(TP, arrow(Var(0), INT), "a")
    ctx = EMPTY.extend(w_ty, "w").extend(INT, "v")
    ex = Mod(Sigma(TP, Var(0), "a"))
    lhs = unpack(Ann(pack(INT, Var(0)), ex), Var(1), INT)
    rhs = App(App(Var(1), INT), Var(0))
    assert equal(ctx, lhs, rhs, INT)


def test_forall_comp():
    # (Λx. u x)[v] ≡ u v
    u_ty = Pi(TP, arrow(Var(0), Var(0)), "a")
    ctx = EMPTY.extend(u_ty, "u")
    fa = Mod(u_ty)
    lhs = type_app(Ann(big_lambda(App(Var(1), Var(0))), fa), INT, arrow(INT, INT))
    assert equal(ctx, lhs, App(Var(0), INT), arrow(INT, INT))


def test_forall_ext_at_eta_introduced_value():
    t_ty = Pi(TP, arrow(Var(0), Var(0)), "a")
    ctx = EMPTY.extend(t_ty, "t")
    fa = Mod(t_ty)
    inner = Ann(big_lambda(App(Var(1), Var(0))), fa)
    lhs = big_lambda(type_app(shift_up(inner), Var(0), arrow(Var(0), Var(0))))
    rhs = big_lambda(App(Var(1), Var(0)))
    assert equal(ctx, lhs, rhs, fa)


def shift_up(t):
    from modml.syntax import shift

    return shift(t, 1)


def test_forall_ext_at_neutral_is_not_decided():
    # sound but incomplete: Λx. u[x] ≡ u is left to the semantic oracle
    fa = Mod(Pi(TP, arrow(Var(0), Var(0)), "a"))
    ctx = EMPTY.extend(fa, "u")
    lhs = big_lambda(type_app(Var(1), Var(0), arrow(Var(0), Var(0))))
    assert not equal(ctx, lhs, Var(0), fa)


def test_exists_ext_at_neutral_by_bind_eta():
    ex = Mod(Sigma(TP, Var(0), "a"))
    ctx = EMPTY.extend(ex, "u")
    lhs = unpack(Var(0), Lam(Lam(pack(Var(1), Var(0)))), ex)
    assert equal(ctx, lhs, Var(0), ex)


def test_bind_eta_and_constant_bind():
    ctx = EMPTY.extend(MINT, "u")
    assert normalize(ctx, Bind(Var(0), MINT, Eta(Var(0))), MINT) == Var(0)
    assert equal(ctx, Bind(Var(0), MINT, Eta(Lit(1))), Eta(Lit(1)), MINT)


def test_beta_and_extensionality():
    ctx = EMPTY.extend(arrow(INT, INT), "f").extend(product(INT, BOOL), "p")
    assert equal(ctx, App(Lam(Var(0)), Lit(4)), Lit(4), INT)
    assert equal(ctx, Lam(App(Var(2), Var(0))), Var(1), arrow(INT, INT))
    assert equal(ctx, Pair(Fst(Var(0)), Snd(Var(0))), Var(0), product(INT, BOOL))
    assert not equal(ctx, Fst(Var(0)), Lit(0), INT)


def test_bind_commutes_with_projection():
    pair_ty = Mod(product(INT, INT))
    ctx = EMPTY.extend(pair_ty, "u")
    # (bind z = u in ⟨z.2, z.1⟩).1 ≡ bind z = u in z.2   at motive int × int
    swapped = Bind(Var(0), product(INT, INT), Pair(Snd(Var(0)), Fst(Var(0))), "z")
    assert equal(ctx, Fst(swapped), Bind(Var(0), INT, Snd(Var(0)), "z"), INT)


def test_singleton_collapse():
    ctx = EMPTY.extend(Singleton(INT), "t")
    assert equal(ctx, Var(0), INT, TP)
    assert normalize(ctx, Var(0), Singleton(INT)) == INT


def test_constants_compute_on_literals():
    assert equal(EMPTY, App(App(Const("Int.add"), Lit(2)), Lit(3)), Lit(5), INT)


def test_trace_records_both_normal_forms():
    equality.TRACE = []
    try:
        equal(EMPTY, Lit(1), Lit(2), INT)
        (names, lhs, rhs, same), = equality.TRACE
    finally:
        equality.TRACE = None
    assert (lhs, rhs, same) == (Lit(1), Lit(2), False)


# -- properties over generated modal programs ---------------------------------------

seeds = st.integers(0, 2**32 - 1)


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_normalize_is_idempotent_and_type_preserving(seed):
    t = program(random.Random(seed), 4)
    nf = normalize(EMPTY, t, MINT)
    assert normalize(EMPTY, nf, MINT) == nf
    check(EMPTY, nf, MINT)


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_monad_laws(seed):
    for _, lhs, rhs in law_instances(random.Random(seed)):
        assert equal(EMPTY, lhs, rhs, MINT)


@settings(max_examples=40, deadline=None)
@given(seeds, seeds)
def test_equal_is_an_equivalence_and_a_congruence(s1, s2):
    a, b = program(random.Random(s1), 3), program(random.Random(s2), 3)
    assert equal(EMPTY, a, a, MINT)
    assert equal(EMPTY, a, b, MINT) == equal(EMPTY, b, a, MINT)
    na = normalize(EMPTY, a, MINT)
    # replacing a subterm by an equal one (its normal form) preserves equality
    ctx = EMPTY.extend(arrow(MINT, MINT), "k")
    from modml.syntax import shift

    assert equal(ctx, App(Var(0), shift(a, 1)), App(Var(0), shift(na, 1)), MINT)
    assert equal(EMPTY, Bind(scrutinee(a), MINT, Eta(Var(0))), na, MINT)
