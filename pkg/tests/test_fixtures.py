import json

import pytest

from modml.model.fixtures import CHECKS, FixtureError, load_fixture, run_fixture
from conftest import CORPUS

SMALL = {
    "name": "small", "k": 4, "fuel": 5000,
    "pers": [{"name": "Bool", "classes": [["#0/4"], ["#1/4"]]}, {"name": "One", "classes": [["#0/4"]]}],
    "assemblies": [{"name": "share", "points": {"a": ["#0/4", "#1/4"], "b": ["#1/4"]}}],
}


def test_load_from_dict_string_and_path(tmp_path):
    path = tmp_path / "small.fixture.json"
    path.write_text(json.dumps(SMALL))
    for src in (SMALL, json.dumps(SMALL), path, str(path)):
        fx = load_fixture(src)
        assert (fx.name, fx.k, fx.fuel, fx.checks) == ("small", 4, 5000, CHECKS)
    # the modest sets of both PERs are added to the assemblies
    assert len(load_fixture(SMALL).universe.assemblies) == 3


def test_small_fixture_passes_every_check():
    results = run_fixture(load_fixture(SMALL))
    assert [r.name for r in results] == list(CHECKS)
    assert all(r.passed for r in results), [r.to_json() for r in results]


def test_invalid_per_fails_validity():
    bad = dict(SMALL, pers=[{"name": "P", "carrier": ["#0/4", "#1/4"], "pairs": [["#0/4", "#1/4"]]}])
    (res,) = run_fixture(load_fixture(bad), ["valid"])
    assert not res.passed


@pytest.mark.parametrize("broken", [{}, dict(SMALL, pers=[{"name": "X"}]), dict(SMALL, checks=["nope"])])
def test_malformed_fixtures(broken):
    with pytest.raises(FixtureError):
        load_fixture(broken)


def test_basic_fixture_shape():
    fx = load_fixture(CORPUS / "model" / "basic.fixture.json")
    assert fx.universe.is_valid()
