import pytest

from modml.model.pca import I, codes, const, pca_apply
from modml.model.per import Assembly, Per, modest_of_per, reflect_assembly
from modml.model.wild import (
    PHI, PSI, CandidateListEmpty, InsufficientCandidates, LemmaReport, check_lemma_universal_vs_reflective,
    compare, default_candidates, eta_code, exponential, fsharp, hypothesis_holds, is_natural, wild_reflection,
)

K = 4
C4 = codes(K)
BOOL = Per.from_classes([[C4[0]], [C4[1]]], "Bool")
ONE = Per.from_classes([[C4[0]]], "One")
MBOOL = modest_of_per(BOOL)
POINT = Assembly(("*",), {"*": frozenset([C4[0]])}, "point")


def test_unit_at_a_point_inhabits_the_wild_reflection():
    W = wild_reflection(POINT, [BOOL, ONE], K)
    assert W.in_domain(eta_code(C4[0]))


def test_wild_reflection_is_a_per():
    W = wild_reflection(MBOOL, [BOOL, ONE], K)
    assert W.is_valid()
    for a in W.carrier:
        for b in W.carrier:
            assert W.related(a, b) == W.related(b, a)


def test_terminal_universe_collapses_everything():
    W = wild_reflection(MBOOL, [ONE], K)
    assert len(W.classes()) == 1


def test_units_are_natural():
    for r in (C4[0], C4[1]):
        assert is_natural(eta_code(r), MBOOL, [BOOL], K)


def test_constants_are_in_the_wild_reflection_but_not_natural():
    W = wild_reflection(MBOOL, [BOOL], K)
    c = const(C4[0])
    assert W.in_domain(c)
    assert not is_natural(c, MBOOL, [BOOL], K)
    natural = {W.class_of(u) for u in W.carrier if W.in_domain(u) and is_natural(u, MBOOL, [BOOL], K)}
    assert len(W.classes()) > len(natural) == 2


def test_extension_along_the_unit():
    E = exponential(MBOOL, BOOL, K)
    for h in E.carrier:
        if E.in_domain(h):
            for r in (C4[0], C4[1]):
                assert BOOL.related(fsharp(eta_code(r), h), pca_apply(h, r))


def test_comparison_maps():
    assert pca_apply(PHI, C4[2]) == eta_code(C4[2])
    assert pca_apply(PSI, eta_code(C4[2])) == C4[2]


def test_empty_candidate_list():
    with pytest.raises(CandidateListEmpty):
        wild_reflection(MBOOL, [BOOL], K, candidates=[], strict=True)


def test_missing_candidates_are_reported():
    with pytest.raises(InsufficientCandidates):
        compare(MBOOL, [BOOL], K, candidates=[I])


def test_comparison_on_a_modest_set():
    e = compare(MBOOL, [BOOL, ONE], K)
    assert e.passed and e.reflection_classes == e.natural_classes == 2
    assert e.wild_classes > e.natural_classes


def test_comparison_on_a_shared_assembly():
    X = Assembly(("a", "b", "c"), {"a": frozenset([C4[0]]), "b": frozenset([C4[0], C4[1]]),
                                   "c": frozenset([C4[2]])}, "share")
    R, _ = reflect_assembly(X)
    U0 = [BOOL, ONE, Per.from_classes([sorted(c, key=str) for c in R.classes()], "R")]
    assert hypothesis_holds(X, U0)
    e = compare(X, U0, K)
    assert e.passed, e.reason


def test_hypothesis_failure_is_skipped():
    X = Assembly(("a", "b"), {"a": frozenset([C4[0]]), "b": frozenset([C4[3]])}, "far")
    e = compare(X, [BOOL], K)
    assert e.skipped and not e.passed


def test_lemma_report():
    report = check_lemma_universal_vs_reflective([BOOL, ONE], [MBOOL, modest_of_per(ONE)], K)
    assert isinstance(report, LemmaReport) and report.passed
    assert LemmaReport([]).passed is False


def test_default_candidates_include_units_and_constants():
    cands = default_candidates(MBOOL, K)
    assert eta_code(C4[1]) in cands and const(C4[1]) in cands and I in cands
