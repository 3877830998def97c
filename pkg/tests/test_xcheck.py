import dataclasses

import pytest

from cardsat import reductions as red
from cardsat.cli import main
from cardsat.logic import CnfFormula
from cardsat.xcheck import SUITES, SuiteResult, XcheckConfig, call_budget, run, run_suite

SMALL = XcheckConfig(seed=3, scale=0.2)


def _flip_clause(f: CnfFormula, i: int) -> CnfFormula:
    clauses = list(f.clauses)
    clauses[i] = tuple(-l for l in clauses[i])
    return CnfFormula(f.universe_size, tuple(clauses))


@pytest.fixture
def faulty_dalal(monkeypatch):
    """Flip the sign of one psi clause in the Dalal gadget."""
    real = red.reduce_cardmin_to_dalal

    def broken(q):
        out = real(q)
        bad = dataclasses.replace(out.target, psi=_flip_clause(out.target.psi, -1))
        return dataclasses.replace(out, target=bad)

    monkeypatch.setattr(red, "reduce_cardmin_to_dalal", broken)


@pytest.fixture
def faulty_satoh(monkeypatch):
    """Turn the first (not x1 or not y1) clause into (x1 or y1).

    Flipping the last clause would only drop b -> a from the final a <-> b
    pair, which leaves every minimal difference unchanged.
    """
    real = red.reduce_3sat_to_satoh_mc

    def broken(f):
        out = real(f)
        bad = dataclasses.replace(out.target, psi=_flip_clause(out.target.psi, 0))
        return dataclasses.replace(out, target=bad)

    monkeypatch.setattr(red, "reduce_3sat_to_satoh_mc", broken)


def test_suite_result_bookkeeping():
    r = SuiteResult("demo", 0)
    r.check(True, "a")
    r.check(False, "b")
    assert (r.passed, r.total, r.ok) == (1, 2, False)
    assert r.failures and r.as_dict()["name"] == "demo"


def test_call_budget():
    assert [call_budget(n) for n in (1, 2, 3, 7, 8)] == [2, 3, 3, 4, 5]


def test_seeded_runs_are_deterministic():
    names = ["optsat-random", "cardmin-to-abduction", "satoh-minimality-poly"]
    a = [r.as_dict() for r in run(SMALL, names)]
    b = [r.as_dict() for r in run(SMALL, names)]
    for x, y in zip(a, b):
        x.pop("seconds", None)
        y.pop("seconds", None)
    assert a == b


def test_scale_changes_counts():
    assert XcheckConfig(scale=0.5).count(200) == 100
    assert XcheckConfig(scale=0.0001).count(200) >= 1


@pytest.mark.parametrize("name", [n for n in SUITES if n not in
                                  ("optsat-exhaustive", "graph-to-negative-krom")])
def test_every_suite_passes_small(name):
    r = run_suite(name, SMALL)
    assert r.ok, r.failures[:3]
    assert r.total > 0
    answers = r.notes.get("answers")
    if answers:
        # a preservation check is only meaningful if both verdicts occur
        seen = answers["true"] + answers["false"]
        assert min(answers.values()) >= 0.15 * seen, answers


def test_injected_dalal_fault_is_caught(faulty_dalal, capsys):
    r = run_suite("cardmin-to-dalal", SMALL)
    assert not r.ok
    assert main(["xcheck", "--suite", "cardmin-to-dalal", "--scale", "0.2"]) == 1
    assert "FAIL" in capsys.readouterr().out


def test_injected_satoh_fault_is_caught(faulty_satoh):
    assert not run_suite("3sat-to-satoh", SMALL).ok
