from hypothesis import given, settings, strategies as st

from modml.model.pca import (
    COMP, FST, I, K, KI, OMEGA, PAIR, S, SND, PApp, PLam, PVar, apply_all, church, codes, comp, const,
    is_closed, normalize, parse_term, pca_apply, selector, show, table,
)


def test_identity_applied_to_k():
    assert pca_apply(I, K) == K


def test_omega_is_undefined():
    assert normalize(OMEGA, 500) is None
    assert pca_apply(I, OMEGA, 500) is None


def test_skk_is_identity():
    x = selector(1, 3)
    assert apply_all(S, K, K, x) == x


def test_pairs_project():
    a, b = church(1), church(2)
    p = apply_all(PAIR, a, b)
    assert pca_apply(FST, p) == a and pca_apply(SND, p) == b


def test_composition_agrees_with_the_combinator():
    f, g = const(K), PLam(PApp(PVar(0), PVar(0)))
    x = I
    assert pca_apply(comp(f, g), x) == apply_all(COMP, f, g, x) == pca_apply(f, pca_apply(g, x))


def test_const_ignores_its_argument():
    assert pca_apply(const(KI), OMEGA, 500) == KI


def test_selectors_and_tables():
    cs = codes(4)
    assert len(set(cs)) == 4 and all(is_closed(c) for c in cs)
    outs = [cs[3], cs[2], cs[1], cs[0]]
    t = table(outs)
    assert [pca_apply(t, c) for c in cs] == outs


def test_parse_and_show():
    assert parse_term(r"\x. x") == I
    assert parse_term("K") == K
    assert parse_term("#1/3") == selector(1, 3)
    assert parse_term(show(S)) == S


def test_church_numerals_are_distinct_normal_forms():
    ns = [church(i) for i in range(5)]
    assert len(set(ns)) == 5 and all(normalize(n) == n for n in ns)


terms = st.recursive(
    st.sampled_from([I, K, KI, S, PVar(0)]),
    lambda sub: st.one_of(st.builds(PApp, sub, sub), st.builds(PLam, sub)),
    max_leaves=8,
).map(PLam)


@settings(max_examples=150, deadline=None)
@given(terms, st.integers(1, 200), st.integers(0, 400))
def test_fuel_monotonicity(t, fuel, extra):
    small = normalize(t, fuel)
    if small is not None:
        assert normalize(t, fuel + extra) == small


@settings(max_examples=100, deadline=None)
@given(terms)
def test_normal_forms_are_fixed_points(t):
    nf = normalize(t, 2000)
    if nf is not None:
        assert normalize(nf, 2000) == nf
