import random

import pytest

from cardsat.abduction import (Pap, brute_force_relevance, brute_force_solutions, is_solution,
                               leq_relevance, relevance)
from cardsat.generators import random_pap
from cardsat.logic import CnfFormula, ContractError, RefusalError
from cardsat.optsat import OptQuery
from cardsat.reductions import reduce_cardmin_to_abduction


def cnf(n, *clauses):
    return CnfFormula(n, tuple(clauses))


def from_phi(f, h=1):
    return reduce_cardmin_to_abduction(OptQuery(f, h)).target[0]


OR12 = from_phi(cnf(2, (1, 2)))


def test_pap_contracts():
    with pytest.raises(ContractError, match="inconsistent"):
        Pap(1, frozenset({1}), frozenset(), cnf(1, (1,), (-1,)))
    with pytest.raises(ContractError):
        Pap(2, frozenset({3}), frozenset(), cnf(2))
    with pytest.raises(ContractError):
        is_solution(OR12, {3})


def test_is_solution_examples():
    assert is_solution(OR12, {1})
    assert not is_solution(OR12, set())
    assert is_solution(OR12, OR12.hypotheses)


def test_inconsistent_candidate_is_no_solution():
    p = Pap(3, frozenset({1, 2}), frozenset({3}), cnf(3, (-1, -2), (-1, 3), (-2, 3)))
    assert is_solution(p, {1}) and not is_solution(p, {1, 2})


@pytest.mark.parametrize("mode", ["oracle", "brute"])
def test_relevance_examples(mode):
    a = leq_relevance(OR12, 1, mode)
    assert a.key() == (True, 1) and a.witness_solution == {1}
    p = from_phi(cnf(2, (1,), (1, 2)))
    assert leq_relevance(p, 2, mode).key() == (False, 1)
    assert leq_relevance(p, 1, mode).key() == (True, 1)
    empty = Pap(2, frozenset(), frozenset({2}), cnf(2))
    a = leq_relevance(empty, 1, mode)
    assert a.key() == (False, None) and a.witness_solution is None


def test_brute_force_relevance_examples():
    assert brute_force_relevance(OR12, 1).key() == (True, 1)
    p = from_phi(cnf(2, (1,), (1, 2)))
    assert brute_force_relevance(p, 2).key() == (False, 1)
    assert brute_force_relevance(Pap(2, frozenset(), frozenset({2}), cnf(2)), 1).key() == (False, None)


def test_hypothesis_outside_universe():
    with pytest.raises(ContractError):
        leq_relevance(OR12, 9)


def test_non_hypothesis_is_not_relevant():
    a = leq_relevance(OR12, 3)
    assert a.key() == (False, 1)


def test_brute_force_cap():
    n = 22
    p = Pap(n, frozenset(range(1, 22)), frozenset({22}), cnf(n))
    with pytest.raises(RefusalError):
        brute_force_relevance(p, 1)
    with pytest.raises(RefusalError):
        leq_relevance(p, 1, "brute")


def test_preorders():
    # x1 alone explains x4; x2 and x3 together explain it too
    p = Pap(4, frozenset({1, 2, 3}), frozenset({4}), cnf(4, (-1, 4), (-2, -3, 4)))
    assert brute_force_solutions(p)[0] == {1}
    assert relevance(p, 2, "card").key() == (False, 1)
    a = relevance(p, 2, "subset")
    assert a.relevant and a.witness_solution == {2, 3}
    assert relevance(p, 2, "any").relevant
    with pytest.raises(ContractError):
        brute_force_relevance(p, 2, "weird")


def _paps(seed, count):
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        p = random_pap(rng, rng.randint(1, 12))
        if len(p.hypotheses) <= 8:
            out.append(p)
    return out


def test_leq_relevance_matches_brute_force():
    rng = random.Random(1)
    for p in _paps(0, 300):
        h = rng.choice(sorted(p.hypotheses))
        fast = leq_relevance(p, h)
        assert fast.key() == brute_force_relevance(p, h).key()
        if fast.relevant:
            w = fast.witness_solution
            assert h in w and len(w) == fast.min_size and is_solution(p, w)


def test_solution_table_agrees_with_is_solution():
    for p in _paps(2, 60):
        sols = set(brute_force_solutions(p))
        for s in sols:
            assert is_solution(p, s)
            for h in p.hypotheses - s:
                if is_solution(p, s | {h}):
                    assert s | {h} in sols
