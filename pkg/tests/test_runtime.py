import random

import pytest
from hypothesis import given, settings, strategies as st

from modml import equality
from modml.errors import FuelExhausted
from modml.runtime import EXIT_OK, EXIT_STATIC, Package, evaluate, run_program, to_json
from modml.syntax import EMPTY, Ann, App, Bind, Const, EffPrim, Eta, Lit, Var
from conftest import CORPUS
from programs import MINT, law_instances, program


def _run(name, **kw):
    return run_program((CORPUS / name).read_text(), **kw)


def test_eff_return_runs_to_its_value():
    v, store = evaluate(EffPrim("Eff.return", (Lit(7),)))
    assert v == 7 and store.transcript == []


def test_package_values_are_canonical():
    v, _ = evaluate(Eta(Lit(3)))
    assert v == Package(3)
    assert to_json(v) == {"package": 3}


def test_bind_on_a_package_substitutes():
    body = Eta(App(App(Const("Int.add"), Lit(1)), Var(0)))
    v, _ = evaluate(Bind(Ann(Eta(Lit(4)), MINT), MINT, body))
    assert v == Package(5)


@pytest.mark.parametrize("name", ["hello_direct.mml", "hello_functor.mml"])
def test_hello_programs_write_one_line(name):
    r = _run(name)
    assert r.exit_code == EXIT_OK
    assert r.value == 1
    assert r.transcript == [("openOut", "hello.txt"), ("write", [1, "Hello world"])]


def test_database_choice_follows_the_flag():
    mock = _run("main.mml", flags={"USE_MOCK_DB": True})
    real = _run("main.mml", flags={"USE_MOCK_DB": False})
    assert [op for op, _ in mock.transcript] == ["mock.openDb", "mock.closeDb"]
    assert [op for op, _ in real.transcript] == ["real.openDb", "real.closeDb"]
    assert real.transcript[1][1] == "mydb.sql"


def test_unset_flag_defaults_to_false():
    assert [op for op, _ in _run("main.mml").transcript][0] == "real.openDb"


def test_symbol_table_allocates_distinct_symbols():
    r = _run("symbol_table.mml")
    assert r.value is False
    assert r.transcript == [("fresh", 0), ("fresh", 1)]


def test_sharing_program_value():
    assert _run("sharing.mml").value == 5


def test_runs_are_deterministic():
    a = _run("symbol_table.mml").to_json()
    b = _run("symbol_table.mml").to_json()
    assert a == b


def test_static_errors_are_not_run():
    r = _run("paradox.mml")
    assert r.exit_code == EXIT_STATIC and r.error.code == "E-UNIVERSE"


def test_fuel_bound():
    with pytest.raises(FuelExhausted):
        evaluate(App(App(Const("Int.add"), Lit(1)), Lit(2)), fuel=1)


def test_empty_program_runs_to_nothing():
    r = run_program("")
    assert r.exit_code == EXIT_OK and r.value is None and r.transcript == []


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32))
def test_monad_laws_hold_statically_and_at_runtime(seed):
    for law, lhs, rhs in law_instances(random.Random(seed)):
        assert equality.equal(EMPTY, lhs, rhs, MINT), law
        assert evaluate(lhs)[0] == evaluate(rhs)[0], law


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32))
def test_equal_programs_evaluate_alike(seed):
    # judgmentally equal closed programs of a base-type package denote the same package
    rng = random.Random(seed)
    a, b = program(rng, 3), program(rng, 3)
    if equality.equal(EMPTY, a, b, MINT):
        assert evaluate(a)[0] == evaluate(b)[0]
    va = evaluate(a)[0]
    assert isinstance(va, Package) and isinstance(va.value, int)
