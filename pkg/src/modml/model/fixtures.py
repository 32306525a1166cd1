"""Declarative model fixtures (``.fixture.json``) and the named checks run on them.

A fixture lists PERs (by classes, or by carrier plus related pairs) and
assemblies (points mapped to realizers); λ-terms are strings in the
syntax of ``parse_term``.  Example::

    {"name": "small", "k": 4, "fuel": 10000,
     "pers": [{"name": "Bool", "classes": [["#0/4"], ["#1/4"]]}],
     "assemblies": [{"name": "share", "points": {"a": ["#0/4", "#1/4"], "b": ["#1/4"]}}],
     "checks": ["valid", "reflection", "mutation", "wild"]}
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from pathlib import Path

from modml.model.pca import DEFAULT_FUEL, parse_term
from modml.model.per import (
    Assembly, FiniteUniverse, Per, check_reflection, coarsen, reflect_assembly, refine,
)
from modml.model.wild import check_lemma_universal_vs_reflective

CHECKS = ("valid", "reflection", "mutation", "wild")


class FixtureError(Exception):
    pass


@dataclass
class Fixture:
    name: str
    universe: FiniteUniverse
    checks: tuple = CHECKS

    @property
    def k(self) -> int:
        return self.universe.k

    @property
    def fuel(self) -> int:
        return self.universe.fuel


@dataclass
class CheckResult:
    name: str
    passed: bool
    details: list = field(default_factory=list)
    seconds: float = 0.0

    def to_json(self) -> dict:
        return {"check": self.name, "passed": self.passed, "details": self.details,
                "seconds": round(self.seconds, 3)}


def _per(spec: dict) -> Per:
    name = spec.get("name", "")
    if "classes" in spec:
        return Per.from_classes([[parse_term(t) for t in c] for c in spec["classes"]], name)
    if "carrier" in spec:
        carrier = [parse_term(t) for t in spec["carrier"]]
        pairs = [(parse_term(a), parse_term(b)) for a, b in spec.get("pairs", [])]
        return Per.from_pairs(carrier, pairs, name)
    raise FixtureError(f"PER {name!r} needs classes or carrier")


def _assembly(spec: dict) -> Assembly:
    pts = spec["points"]
    return Assembly(tuple(pts), {p: frozenset(parse_term(t) for t in rs) for p, rs in pts.items()},
                    spec.get("name", ""))


def load_fixture(data) -> Fixture:
    """Build a fixture from a path, a JSON string or an already-parsed dict."""
    if isinstance(data, Path) or (isinstance(data, str) and not data.lstrip().startswith("{")):
        data = Path(data).read_text()
    if isinstance(data, str):
        data = json.loads(data)
    try:
        pers = [_per(p) for p in data["pers"]]
        assemblies = [_assembly(a) for a in data.get("assemblies", [])]
        U = FiniteUniverse(pers, assemblies, int(data["k"]), int(data.get("fuel", DEFAULT_FUEL)))
    except (KeyError, ValueError, TypeError) as err:
        raise FixtureError(f"malformed fixture: {err}") from err
    checks = tuple(data.get("checks", CHECKS))
    unknown = [c for c in checks if c not in CHECKS]
    if unknown:
        raise FixtureError(f"unknown checks {unknown}")
    return Fixture(data.get("name", "fixture"), U, checks)


def run_check(fx: Fixture, name: str) -> CheckResult:
    start = time.perf_counter()
    U = fx.universe
    res = CheckResult(name, True)
    match name:
        case "valid":
            res.passed = U.is_valid()
        case "reflection":
            for X in U.assemblies:
                R, unit = reflect_assembly(X)
                ok = check_reflection(X, R, unit, U.pers, fx.k, fx.fuel)
                res.details.append({"assembly": X.name, "passed": ok})
                res.passed &= ok
        case "mutation":
            # every available coarsening or refinement of a reflection must fail the check
            for X in U.assemblies:
                R, unit = reflect_assembly(X)
                for how, mutate in (("coarsen", coarsen), ("refine", refine)):
                    M = mutate(R)
                    if M is None:
                        continue
                    flipped = not check_reflection(X, M, unit, U.pers, fx.k, fx.fuel)
                    res.details.append({"assembly": X.name, "mutation": how, "flipped": flipped})
                    res.passed &= flipped
        case "wild":
            report = check_lemma_universal_vs_reflective(U.pers, U.assemblies, fx.k, fx.fuel)
            res.details = [e.to_json() for e in report.entries]
            res.passed = report.passed
        case _:
            raise FixtureError(f"unknown check {name}")
    res.seconds = time.perf_counter() - start
    return res


def run_fixture(fx: Fixture, names=None) -> list[CheckResult]:
    return [run_check(fx, n) for n in (names or fx.checks)]
