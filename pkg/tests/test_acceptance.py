"""Acceptance criteria, one test each, at full scale.

Each test prints a single ``criterion N: PASS|FAIL ...`` line to the
terminal, whether or not it passes.
"""

import math
import random
import time

import pytest

from cardsat.clones import classify_language, r4p
from cardsat.generators import random_krom
from cardsat.logic import EQ, IMP, NEQ, OR2, BooleanRelation
from cardsat.optsat import OptQuery, card_max_sat, card_min_sat
from cardsat.sat import BuiltinOracle, CountingOracle
from cardsat.xcheck import XcheckConfig, run_suite

FULL = XcheckConfig(seed=0, scale=1.0)

RANDOM_REDUCTION_SUITES = ["loglex-to-cardmax", "cardmax-to-indset", "negkrom-to-poskrom",
                           "cardmin-to-dalal", "3sat-to-satoh", "cardmin-to-abduction",
                           "or2-to-r4p", "s01-gadget"]
EXHAUSTIVE_REDUCTION_SUITES = ["drop-bound", "graph-to-negative-krom"]


@pytest.fixture
def verdict(capsys):
    def _verdict(criterion, ok, detail):
        with capsys.disabled():
            print(f"\ncriterion {criterion}: {'PASS' if ok else 'FAIL'}  {detail}")
        assert ok, detail
    return _verdict


def _suites(names):
    results = [run_suite(n, FULL) for n in names]
    detail = "; ".join(f"{r.name} {r.passed}/{r.total}" for r in results)
    bad = [f"{r.name}: {r.failures[:2]}" for r in results if not r.ok]
    return results, detail, bad


def test_criterion_1_solver_oracle_equivalence(verdict):
    t = time.perf_counter()
    results, detail, bad = _suites(["optsat-exhaustive", "optsat-random"])
    elapsed = time.perf_counter() - t
    ok = not bad and elapsed < 60
    verdict(1, ok, f"{detail}; {elapsed:.1f}s (< 60s){' ' + str(bad) if bad else ''}")


def test_criterion_2_polynomial_cases(verdict):
    results, detail, bad = _suites(["horn-min-model", "width2affine"])
    verdict(2, not bad, detail + (f" {bad}" if bad else ""))


def _call_counts(seed=0, count=300):
    """Oracle calls seen by a counting wrapper, beyond the first plain sat."""
    rng = random.Random(seed)
    worst = []
    for _ in range(count):
        n = rng.randint(1, 16)
        q = OptQuery(random_krom(rng, n), rng.randint(1, n))
        budget = math.ceil(math.log2(n + 1)) + 1
        for solver in (card_min_sat, card_max_sat):
            o = CountingOracle(BuiltinOracle())
            a = solver(q, o)
            bounded = max(0, o.calls - 1)
            worst.append((bounded <= budget and bounded == a.bounded_calls, bounded, budget))
    return worst


def test_criterion_3_reduction_preservation(verdict):
    results, detail, bad = _suites(RANDOM_REDUCTION_SUITES + EXHAUSTIVE_REDUCTION_SUITES)
    small = [r.name for r in results if r.name in RANDOM_REDUCTION_SUITES
             and sum(r.notes["answers"].values()) < 200]
    counts = _call_counts()
    over = [c for c in counts if not c[0]]
    ok = not bad and not small and not over
    verdict(3, ok, f"{detail}; call budget held on {len(counts) - len(over)}/{len(counts)} runs"
                   + (f" failures={bad}" if bad else "")
                   + (f" corpora under 200: {small}" if small else ""))


def test_criterion_4_horn_and_krom_outputs(verdict):
    _, detail, bad = _suites(["horn-and-krom-outputs"])
    verdict(4, not bad, detail + (f" {bad}" if bad else ""))


def test_criterion_5_satoh_polynomial_check(verdict):
    results, detail, bad = _suites(["satoh-minimality-poly"])
    ok = not bad and results[0].total >= 1000
    verdict(5, ok, detail + (f" {bad}" if bad else ""))


def test_criterion_6_classifier(verdict):
    or3 = BooleanRelation.from_predicate(3, lambda a, b, c: a or b or c)
    expected = [({"EQ": EQ, "NEQ": NEQ}, "polynomial"), ({"IMP": IMP}, "polynomial"),
                ({"OR2": OR2}, "theta2_complete"), ({"R4p": r4p()}, "theta2_complete"),
                ({"OR3": or3}, "outside_scope")]
    named = [classify_language(g).kind == want for g, want in expected]
    _, detail, bad = _suites(["classifier"])
    ok = all(named) and not bad
    verdict(6, ok, f"named languages {sum(named)}/{len(named)}; {detail}"
                   + (f" {bad}" if bad else ""))


def test_criterion_7_end_to_end_chain(verdict):
    results, detail, bad = _suites(["end-to-end-chain"])
    verdict(7, not bad and results[0].total >= 100, detail + (f" {bad}" if bad else ""))
