"""The impredicative ("wild") reflection and its naturality cut-down.

In the PER reading, type arguments are erased: an element of
``ΠC:U. (A → C) → C`` is a single λ-term ``u`` that sends every tracker
``h`` of a map ``A → C`` to an element of ``C``, uniformly in ``C``.
All quantifiers range over the finite universe and over supplied candidate
lists, so every result below is a finite-scale statement.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from modml.model.pca import (
    DEFAULT_FUEL, I, PApp, PLam, PTerm, PVar, V0, codes, comp, const, pca_apply, pshift,
)
from modml.model.per import (
    Assembly, Per, modest_of_per, reflect_assembly, table_tracker, tracked_maps, tracks,
)


class CandidateListEmpty(Exception):
    """No candidate term inhabits the wild reflection."""


class InsufficientCandidates(Exception):
    """The candidate lists cannot witness the comparison."""


def eta_code(r: PTerm) -> PTerm:
    """``λk. k r``: the wild unit at a point realized by ``r`` (type argument erased)."""
    return PLam(PApp(V0, pshift(r, 1)))


# φ = λr k. k r  and  ψ = λu. u I, the comparison maps between the two reflections
PHI = PLam(PLam(PApp(PVar(0), PVar(1))))
PSI = PLam(PApp(V0, I))


def exponential(A: Assembly, C: Per, k: int, fuel: int = DEFAULT_FUEL) -> Per:
    """The PER ``A → C`` over a candidate list of trackers.

    Candidates are two table trackers per tracked map (differing on codes
    outside ``A``'s realizers) plus ``I`` when it tracks a map.  Two
    candidates are related iff they send realizers of a common point to
    ``C``-related results; this is computed, not assumed.
    """
    MC = modest_of_per(C)
    cands: list = []
    for f, _ in tracked_maps(A, MC, k, fuel):
        for junk in (0, 1):
            t = table_tracker(A, f, MC, k, junk)
            if t is not None and t not in cands:
                cands.append(t)
    if I not in cands:
        cands.append(I)
    rel = set()
    for i, h in enumerate(cands):
        for j, h2 in enumerate(cands):
            if all(
                C.related(pca_apply(h, r, fuel), pca_apply(h2, r2, fuel))
                for x in A.points for r in A.realizers[x] for r2 in A.realizers[x]
            ):
                rel.add((i, j))
    return Per(tuple(cands), frozenset(rel), name=f"{A.name}→{C.name}")


def default_candidates(A: Assembly, k: int) -> list[PTerm]:
    """Units at every code, constant functions, and a few other non-natural terms."""
    cs = codes(k)
    out = [eta_code(c) for c in cs] + [const(c) for c in cs]
    out += [PLam(PApp(V0, PApp(V0, pshift(c, 1)))) for c in cs[:2]]
    out.append(I)
    return out


def wild_reflection(A: Assembly, U0: list, k: int, fuel: int = DEFAULT_FUEL,
                    candidates: Optional[list] = None, strict: bool = False) -> Per:
    """Intersection over ``C ∈ U0`` of the exponential PERs ``(A → C) → C`` on the candidates."""
    cands = list(candidates if candidates is not None else default_candidates(A, k))
    exps = [(C, exponential(A, C, k, fuel)) for C in U0]
    # precompute u·h for every candidate and every listed tracker
    apps = {
        (n, ci, hi): pca_apply(u, h, fuel)
        for n, u in enumerate(cands)
        for ci, (_, E) in enumerate(exps)
        for hi, h in enumerate(E.carrier)
    }
    rel = set()
    for a in range(len(cands)):
        for b in range(len(cands)):
            if all(
                C.related(apps[a, ci, hi], apps[b, ci, hj])
                for ci, (C, E) in enumerate(exps)
                for hi, hj in E.rel
            ):
                rel.add((a, b))
    W = Per(tuple(cands), frozenset(rel), name=f"wild({A.name})")
    if strict and not W.classes():
        raise CandidateListEmpty(f"no candidate inhabits the wild reflection of {A.name}")
    return W


def is_natural(u: PTerm, A: Assembly, U0: list, k: int, fuel: int = DEFAULT_FUEL) -> bool:
    """``u·(f∘h) ≈_D f·(u·h)`` for all ``C, D ∈ U0``, listed ``f : C → D`` and ``h : A → C``."""
    for C in U0:
        hs = [h for h in exponential(A, C, k, fuel).carrier if _in_domain_of_exp(h, A, C, fuel)]
        uh = {h: pca_apply(u, h, fuel) for h in hs}
        MC = modest_of_per(C)
        for D in U0:
            for _, f in tracked_maps(MC, modest_of_per(D), k, fuel):
                for h in hs:
                    lhs = pca_apply(u, comp(f, h), fuel)
                    rhs = None if uh[h] is None else pca_apply(f, uh[h], fuel)
                    if not D.related(lhs, rhs):
                        return False
    return True


def _in_domain_of_exp(h: PTerm, A: Assembly, C: Per, fuel: int) -> bool:
    return all(
        C.related(pca_apply(h, r, fuel), pca_apply(h, r2, fuel))
        for x in A.points for r in A.realizers[x] for r2 in A.realizers[x]
    )


def fsharp(u: PTerm, h: PTerm, fuel: int = DEFAULT_FUEL) -> Optional[PTerm]:
    """The extension ``f♯ u := u·h`` of a map tracked by ``h``."""
    return pca_apply(u, h, fuel)


@dataclass
class LemmaEntry:
    assembly: str
    passed: bool
    skipped: bool = False
    reflection_classes: int = 0
    natural_classes: int = 0
    wild_classes: int = 0
    fsharp_ok: bool = False
    reason: str = ""

    def to_json(self) -> dict:
        return dict(self.__dict__)


@dataclass
class LemmaReport:
    entries: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(e.passed or e.skipped for e in self.entries) and any(not e.skipped for e in self.entries)


def hypothesis_holds(A: Assembly, U0: list) -> bool:
    """Finite-scale hypothesis: the reflection of ``A`` is (up to equality of partitions) in ``U0``."""
    R, _ = reflect_assembly(A)
    return any(C.same_partition(R) for C in U0)


def compare(A: Assembly, U0: list, k: int, fuel: int = DEFAULT_FUEL,
            candidates: Optional[list] = None) -> LemmaEntry:
    """Natural elements of the wild reflection versus ``reflect_assembly(A)``."""
    entry = LemmaEntry(A.name, False)
    if not hypothesis_holds(A, U0):
        entry.skipped = True
        entry.reason = "the reflection of A is not in the universe"
        return entry
    R, unit = reflect_assembly(A)
    W = wild_reflection(A, U0, k, fuel, candidates)
    entry.reflection_classes = len(R.classes())
    entry.wild_classes = len(W.classes())
    natural = [u for u in W.carrier if W.in_domain(u) and is_natural(u, A, U0, k, fuel)]
    nat_classes = {W.class_of(u) for u in natural}
    entry.natural_classes = len(nat_classes)

    # φ : reflection → natural elements
    phi = {}
    for n, cls in enumerate(R.classes()):
        images = set()
        for r in cls:
            u = pca_apply(PHI, r, fuel)
            if u not in W.carrier:
                entry.reason = f"candidate list lacks φ({r})"
                raise InsufficientCandidates(entry.reason)
            if u not in natural:
                entry.reason = f"φ({r}) is not a natural element"
                return entry
            images.add(W.class_of(u))
        if len(images) != 1:
            entry.reason = "φ does not respect the reflection's relation"
            return entry
        phi[n] = images.pop()
    # ψ : natural elements → reflection
    psi = {}
    for u in natural:
        v = pca_apply(PSI, u, fuel)
        c = R.class_of(v)
        if c is None:
            entry.reason = f"ψ sends a natural element outside the reflection"
            return entry
        w = W.class_of(u)
        if psi.setdefault(w, c) != c:
            entry.reason = "ψ does not respect the wild relation"
            return entry
    inverse = all(psi[phi[n]] == n for n in phi) and all(phi[psi[w]] == w for w in psi)
    if not inverse or set(phi.values()) != nat_classes:
        entry.reason = "φ and ψ are not mutually inverse"
        return entry

    # f♯ ∘ η = f on every listed map
    entry.fsharp_ok = True
    for C in U0:
        for f, h in tracked_maps(A, modest_of_per(C), k, fuel):
            for a in A.points:
                for r in A.realizers[a]:
                    if not C.related(fsharp(eta_code(r), h, fuel), pca_apply(h, r, fuel)):
                        entry.fsharp_ok = False
    entry.passed = entry.fsharp_ok
    if not entry.passed:
        entry.reason = "f♯ ∘ η differs from f"
    return entry


def check_lemma_universal_vs_reflective(U0: list, V0: list, k: int, fuel: int = DEFAULT_FUEL) -> LemmaReport:
    report = LemmaReport()
    for A in V0:
        try:
            report.entries.append(compare(A, U0, k, fuel))
        except InsufficientCandidates as err:
            report.entries.append(LemmaEntry(A.name, False, reason=str(err)))
    return report


__all__ = [
    "CandidateListEmpty", "InsufficientCandidates", "PHI", "PSI", "eta_code", "exponential",
    "default_candidates", "wild_reflection", "is_natural", "fsharp", "compare",
    "check_lemma_universal_vs_reflective", "hypothesis_holds", "LemmaEntry", "LemmaReport", "tracks",
]
