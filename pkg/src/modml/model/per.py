"""PERs, assemblies, modest sets and reflections, at finite scale.

Realizers are closed λ-terms in normal form.  Fixtures draw realizers from
the k-ary selector codes ``selector(i, k)``, which makes every finite
function on codes trackable by a ``table`` term; trackers are nevertheless
always verified by evaluation, never assumed.

The set-level notions used below are the finite specializations of the
homotopy-theoretic ones: a proposition has at most one element, a
contractible set exactly one, an equivalence is a bijection, an embedding
an injection, and a fiber a preimage.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Optional

from modml.model.pca import DEFAULT_FUEL, I, PTerm, normalize, pca_apply, selector, table


# -- finite-set notions -----------------------------------------------------------


def is_proposition(xs: Iterable) -> bool:
    return len(set(xs)) <= 1


def is_contractible(xs: Iterable) -> bool:
    return len(set(xs)) == 1


def fiber(f: dict, y) -> frozenset:
    return frozenset(x for x, fx in f.items() if fx == y)


def is_embedding(f: dict) -> bool:
    return all(is_proposition(fiber(f, y)) for y in set(f.values()))


def is_equivalence(f: dict, codomain: Iterable) -> bool:
    """Bijection onto ``codomain``: every fiber is contractible."""
    return all(is_contractible(fiber(f, y)) for y in codomain) and set(f.values()) <= set(codomain)


# -- PERs -----------------------------------------------------------------------


@dataclass(frozen=True)
class Per:
    """A partial equivalence relation on a finite listed carrier."""

    carrier: tuple
    rel: frozenset  # pairs of carrier indices
    name: str = field(default="", compare=False)

    @staticmethod
    def from_classes(classes: list, name: str = "") -> "Per":
        carrier = []
        rel = set()
        for cls in classes:
            idx = []
            for t in cls:
                if t in carrier:
                    raise ValueError(f"realizer {t} listed in two classes")
                carrier.append(t)
                idx.append(len(carrier) - 1)
            rel.update(itertools.product(idx, idx))
        return Per(tuple(carrier), frozenset(rel), name)

    @staticmethod
    def from_pairs(carrier: list, pairs: Iterable, name: str = "") -> "Per":
        index = {t: i for i, t in enumerate(carrier)}
        return Per(tuple(carrier), frozenset((index[u], index[v]) for u, v in pairs), name)

    @staticmethod
    def discrete(terms: list, name: str = "") -> "Per":
        return Per.from_classes([[t] for t in terms], name)

    def index(self, t: Optional[PTerm]) -> Optional[int]:
        if t is None:
            return None
        try:
            return self.carrier.index(t)
        except ValueError:
            return None

    def is_valid(self) -> bool:
        sym = all((j, i) in self.rel for i, j in self.rel)
        trans = all((i, k) in self.rel for i, j in self.rel for j2, k in self.rel if j == j2)
        return sym and trans

    def in_domain(self, t: Optional[PTerm]) -> bool:
        i = self.index(t)
        return i is not None and (i, i) in self.rel

    def related(self, u: Optional[PTerm], v: Optional[PTerm]) -> bool:
        i, j = self.index(u), self.index(v)
        return i is not None and j is not None and (i, j) in self.rel

    def classes(self) -> list[frozenset]:
        """Equivalence classes of the domain, as sets of realizers, in carrier order."""
        out, seen = [], set()
        for i, t in enumerate(self.carrier):
            if (i, i) not in self.rel or i in seen:
                continue
            members = [j for j in range(len(self.carrier)) if (i, j) in self.rel]
            seen.update(members)
            out.append(frozenset(self.carrier[j] for j in members))
        return out

    def class_of(self, t: Optional[PTerm]) -> Optional[int]:
        if not self.in_domain(t):
            return None
        for n, c in enumerate(self.classes()):
            if t in c:
                return n
        return None

    def same_partition(self, other: "Per") -> bool:
        return set(self.classes()) == set(other.classes())


# -- assemblies -------------------------------------------------------------------


@dataclass(frozen=True)
class Assembly:
    points: tuple
    realizers: dict = field(hash=False)  # point -> frozenset of realizers
    name: str = field(default="", compare=False)

    def __hash__(self) -> int:
        return hash((self.points, tuple(sorted((p, tuple(sorted(map(str, r)))) for p, r in self.realizers.items()))))

    def is_valid(self) -> bool:
        return all(self.realizers.get(p) for p in self.points)

    def carrier(self) -> list:
        out = []
        for p in self.points:
            for r in sorted(self.realizers[p], key=str):
                if r not in out:
                    out.append(r)
        return out

    def points_of(self, r: PTerm) -> list:
        return [p for p in self.points if r in self.realizers[p]]


def modest_of_per(R: Per) -> Assembly:
    """Points are the classes of ``R``; each class is realized by its members."""
    classes = R.classes()
    pts = tuple(f"[{n}]" for n in range(len(classes)))
    return Assembly(pts, {p: c for p, c in zip(pts, classes)}, name=f"M({R.name})" if R.name else "")


def is_modest(X: Assembly) -> bool:
    """Distinct points have disjoint realizer sets."""
    return all(not (X.realizers[p] & X.realizers[q]) for p, q in itertools.combinations(X.points, 2))


def partition_of(X: Assembly) -> Per:
    """The PER of a modest assembly: one class per point."""
    return Per.from_classes([sorted(X.realizers[p], key=str) for p in X.points], name=X.name)


def tracks(t: PTerm, X: Assembly, f: dict, Y: Assembly, fuel: int = DEFAULT_FUEL) -> bool:
    """``t`` tracks ``f : X → Y``: every realizer of ``x`` goes to a realizer of ``f(x)``."""
    for x in X.points:
        target = Y.realizers[f[x]]
        for r in X.realizers[x]:
            if pca_apply(t, r, fuel) not in target:
                return False
    return True


def is_morphism(t: PTerm, R: Per, S: Per, fuel: int = DEFAULT_FUEL) -> bool:
    """``x R y`` implies ``t·x S t·y`` (both defined)."""
    for i, j in R.rel:
        a = pca_apply(t, R.carrier[i], fuel)
        b = pca_apply(t, R.carrier[j], fuel)
        if a is None or b is None or not S.related(a, b):
            return False
    return True


def table_tracker(X: Assembly, f: dict, Y: Assembly, k: int, junk: int = 0) -> Optional[PTerm]:
    """A table term tracking ``f`` when ``X``'s realizers are k-ary codes, else ``None``.

    Codes realizing no point are sent to ``selector(junk, k)``.
    """
    outs = []
    for i in range(k):
        c = selector(i, k)
        pts = X.points_of(c)
        if not pts:
            outs.append(selector(junk % k, k))
            continue
        common = frozenset.intersection(*(Y.realizers[f[p]] for p in pts))
        if not common:
            return None
        outs.append(min(common, key=str))
    for p in X.points:
        if any(r not in {selector(i, k) for i in range(k)} for r in X.realizers[p]):
            return None
    return table(outs)


def tracked_maps(X: Assembly, Y: Assembly, k: int, fuel: int = DEFAULT_FUEL) -> list[tuple[dict, PTerm]]:
    """Every function ``X → Y`` with a verified tracker, paired with that tracker."""
    out = []
    for images in itertools.product(Y.points, repeat=len(X.points)):
        f = dict(zip(X.points, images))
        t = table_tracker(X, f, Y, k)
        if t is not None and tracks(t, X, f, Y, fuel):
            out.append((f, t))
    return out


# -- reflection -------------------------------------------------------------------


def reflect_assembly(X: Assembly) -> tuple[Per, PTerm]:
    """Symmetric-transitive closure of "realize a common point"; the unit is tracked by ``I``."""
    carrier = X.carrier()
    parent = list(range(len(carrier)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for p in X.points:
        idx = [carrier.index(r) for r in X.realizers[p]]
        for a in idx[1:]:
            parent[find(a)] = find(idx[0])
    groups: dict = {}
    for i in range(len(carrier)):
        groups.setdefault(find(i), []).append(carrier[i])
    name = f"refl({X.name})" if X.name else ""
    return Per.from_classes(list(groups.values()), name), I


def unit_map(X: Assembly, R: Per, unit: PTerm, fuel: int = DEFAULT_FUEL) -> Optional[dict]:
    """The function ``X → M_R`` tracked by ``unit``, or ``None`` if it is not well defined."""
    M = modest_of_per(R)
    eta = {}
    for x in X.points:
        images = {R.class_of(pca_apply(unit, r, fuel)) for r in X.realizers[x]}
        if len(images) != 1 or None in images:
            return None
        eta[x] = M.points[images.pop()]
    return eta


@dataclass
class ReflectionReport:
    ok: bool
    per_target: dict = field(default_factory=dict)
    reason: str = ""


def reflection_report(X: Assembly, R: Per, unit: PTerm, U0: list, k: int,
                      fuel: int = DEFAULT_FUEL) -> ReflectionReport:
    """Precomposition with the unit, ``(M_R → B) → (X → B)``, is a bijection for every ``B`` in ``U0``."""
    eta = unit_map(X, R, unit, fuel)
    if eta is None:
        return ReflectionReport(False, reason="the unit does not track a map into the reflection")
    M = modest_of_per(R)
    if not all(r in {selector(i, k) for i in range(k)} for r in R.carrier):
        return ReflectionReport(False, reason="reflection carrier is not made of codes")
    report = ReflectionReport(True)
    for B in U0:
        MB = modest_of_per(B)
        from_x = {tuple(f[x] for x in X.points) for f, _ in tracked_maps(X, MB, k, fuel)}
        from_m = [f for f, _ in tracked_maps(M, MB, k, fuel)]
        pre = {tuple(f[m] for m in M.points): tuple(f[eta[x]] for x in X.points) for f in from_m}
        ok = is_equivalence(pre, from_x)
        report.per_target[B.name or repr(B)] = {
            "maps_from_X": len(from_x), "maps_from_reflection": len(from_m), "bijection": ok,
        }
        report.ok &= ok
    if not report.ok:
        report.reason = "precomposition with the unit is not a bijection"
    return report


def check_reflection(X: Assembly, R: Per, unit: PTerm, U0: list, k: int, fuel: int = DEFAULT_FUEL) -> bool:
    return reflection_report(X, R, unit, U0, k, fuel).ok


# -- mutations ----------------------------------------------------------------------


def coarsen(R: Per) -> Optional[Per]:
    """Merge the first two classes; ``None`` if there are fewer than two."""
    cs = R.classes()
    if len(cs) < 2:
        return None
    merged = [sorted(cs[0] | cs[1], key=str)] + [sorted(c, key=str) for c in cs[2:]]
    return Per.from_classes(merged, name=f"coarse({R.name})")


def refine(R: Per) -> Optional[Per]:
    """Split the first class with two or more members; ``None`` if all are singletons."""
    cs = [sorted(c, key=str) for c in R.classes()]
    for n, c in enumerate(cs):
        if len(c) >= 2:
            return Per.from_classes(cs[:n] + [c[:1], c[1:]] + cs[n + 1:], name=f"fine({R.name})")
    return None


def extend_with_junk(R: Per, k: int) -> Optional[Per]:
    """Add a class made of a code outside the carrier (another kind of refinement)."""
    for i in range(k):
        c = selector(i, k)
        if c not in R.carrier:
            return Per.from_classes([sorted(x, key=str) for x in R.classes()] + [[c]], name=f"junk({R.name})")
    return None


@dataclass
class FiniteUniverse:
    """The test universe ``U0`` of PERs and the ambient ``V0`` of assemblies."""

    pers: list
    assemblies: list
    k: int
    fuel: int = DEFAULT_FUEL

    def __post_init__(self):
        for R in self.pers:
            M = modest_of_per(R)
            if not any(self._iso(M, X) for X in self.assemblies):
                self.assemblies.append(M)

    @staticmethod
    def _iso(M: Assembly, X: Assembly) -> bool:
        return is_modest(X) and sorted(map(frozenset, M.realizers.values()), key=str) == sorted(
            map(frozenset, X.realizers.values()), key=str)

    def is_valid(self) -> bool:
        return all(R.is_valid() for R in self.pers) and all(X.is_valid() for X in self.assemblies) and all(
            any(self._iso(modest_of_per(R), X) for X in self.assemblies) for R in self.pers)


def normal(t: PTerm, fuel: int = DEFAULT_FUEL) -> Optional[PTerm]:
    return normalize(t, fuel)
