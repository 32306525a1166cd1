from hypothesis import given, strategies as st

from modml.pretty import pretty
from modml.surface.elab import elab_expr
from modml.syntax import (
    EMPTY, TP, App, BaseType, Bind, Const, Eta, Fst, Lam, Lit, Mod, Pair, Pi, ScopeError, Sigma, Snd, Sort,
    SortConst, Var, alpha_equal, arrow, max_free, shift, sort_leq, substitute,
)


def test_sort_order():
    assert sort_leq(Sort.TP, Sort.SIG) and sort_leq(Sort.KIND, Sort.SIG)
    assert not sort_leq(Sort.TP, Sort.KIND) and not sort_leq(Sort.KIND, Sort.TP)
    assert not sort_leq(Sort.SIG, Sort.TP)


def test_substitute_identity_binding():
    assert substitute(Var(0), Lit(3)) == Lit(3)


def test_substitute_under_binder():
    assert substitute(Lam(Var(1)), Const("c")) == Lam(Const("c"))


def test_substitute_duplicates_argument():
    assert substitute(App(Var(0), Var(0)), Eta(Lit(1))) == App(Eta(Lit(1)), Eta(Lit(1)))


def test_substitute_lowers_free_indices():
    assert substitute(App(Var(0), Var(2)), Lit(1)) == App(Lit(1), Var(1))
    # the argument is shifted when it crosses a binder
    assert substitute(Lam(App(Var(1), Var(0))), Var(4)) == Lam(App(Var(5), Var(0)))


def test_shift_below_zero_is_a_scope_error():
    import pytest

    with pytest.raises(ScopeError):
        shift(Var(0), -1)


def test_alpha_equal_examples():
    assert alpha_equal(Lam(Var(0)), Lam(Var(0)))
    assert not alpha_equal(Lam(Var(0)), Lam(Lit(1)))
    # binder names are annotations only
    assert alpha_equal(Lam(Var(0), "x"), Lam(Var(0), "y"))


def test_alpha_equal_through_the_elaborator():
    t1, _ = elab_expr("fn (x : int) => x")
    t2, _ = elab_expr("fn (y : int) => y")
    assert alpha_equal(t1, t2)


def test_pretty_uses_package_notation():
    ex = Mod(Sigma(TP, Var(0), "a"))
    assert pretty(ex) == "○(Σ a:TP. a)"
    bind = Bind(Var(0), BaseType("int"), Fst(Var(0)), "z")
    assert pretty(bind, ["u"]) == "bind z = u in z.1 : int"
    assert pretty(Eta(Pair(Lit(1), Lit(2)))) == "η ⟨1, 2⟩"


# -- properties ----------------------------------------------------------------

def terms(depth: int):
    """Random well-scoped terms under ``depth`` free variables."""
    leaves = [st.builds(Lit, st.integers(0, 3)), st.just(BaseType("int"))]
    if depth:
        leaves.append(st.builds(Var, st.integers(0, depth - 1)))
    base = st.one_of(leaves)

    def extend(children):
        return st.one_of(
            st.builds(App, children, children),
            st.builds(Pair, children, children),
            st.builds(Fst, children),
            st.builds(Snd, children),
            st.builds(Eta, children),
        )

    return st.recursive(base, extend, max_leaves=12)


def binders(depth: int):
    # a body under one extra binder, possibly containing its own λ
    return st.one_of(terms(depth + 1), terms(depth + 2).map(Lam))


@given(terms(2), terms(2))
def test_substitution_after_weakening_is_identity(t, u):
    assert substitute(shift(t, 1), u) == t


@given(terms(3))
def test_alpha_equal_is_reflexive_and_symmetric(t):
    u = shift(shift(t, 1), -1)
    assert alpha_equal(t, t)
    assert alpha_equal(t, u) == alpha_equal(u, t)


@given(binders(2), terms(2))
def test_substitution_keeps_terms_well_scoped(body, arg):
    assert max_free(substitute(body, arg)) <= 2


def test_arrow_is_non_dependent_pi():
    assert arrow(BaseType("int"), Var(0)) == Pi(BaseType("int"), Var(1))
    assert SortConst(Sort.TP) == TP
    assert len(EMPTY) == 0
