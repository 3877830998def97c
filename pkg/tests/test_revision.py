import random

import pytest

from cardsat.generators import random_horn, random_krom, random_model, random_positive_krom
from cardsat.logic import Assignment, CnfFormula, ContractError, all_models, evaluate
from cardsat.optsat import OptQuery, brute_force_card_min
from cardsat.reductions import reduce_3sat_to_satoh_mc, reduce_cardmin_to_dalal
from cardsat.revision import (RevisionInstance, brute_force_satoh_minimal, dalal_delta_min_oracle,
                              dalal_implication, dalal_model_check, dalal_revise,
                              satoh_implication, satoh_minimality_check_poly, satoh_model_check,
                              satoh_revise)


def cnf(n, *clauses):
    return CnfFormula(n, tuple(clauses))


def A(n, *true):
    return Assignment(n, frozenset(true))


EX1 = RevisionInstance(cnf(2, (1,), (2,)), cnf(2, (-1,)))
SAT1 = RevisionInstance(cnf(2, (1,), (2,)), cnf(2, (-1, -2)))


def test_instance_needs_shared_universe():
    with pytest.raises(ContractError):
        RevisionInstance(cnf(2), cnf(3))


def test_dalal_example():
    r = dalal_revise(EX1)
    assert r.delta_min == 1 and r.selected_models == {A(2, 2)}
    assert dalal_delta_min_oracle(EX1) == 1


@pytest.mark.parametrize("mode", ["brute", "oracle"])
def test_dalal_queries(mode):
    assert dalal_model_check(EX1, A(2, 2), mode)
    assert not dalal_model_check(EX1, A(2), mode)
    assert dalal_implication(EX1, 2, mode)
    assert not dalal_implication(EX1, 1, mode)
    with pytest.raises(ContractError):
        dalal_model_check(EX1, A(2, 1), mode)


@pytest.mark.parametrize("mode", ["brute", "oracle"])
def test_unsatisfiable_mu_is_vacuous(mode):
    inst = RevisionInstance(cnf(1, (1,)), cnf(1, (1,), (-1,)))
    assert dalal_implication(inst, 1, mode)
    assert satoh_implication(inst, 1)
    r = dalal_revise(inst)
    assert r.delta_min is None and not r.selected_models and not r.psi_unsatisfiable


def test_unsatisfiable_psi_is_flagged():
    inst = RevisionInstance(cnf(1, (1,), (-1,)), cnf(1))
    assert dalal_revise(inst).psi_unsatisfiable
    assert satoh_revise(inst).psi_unsatisfiable
    assert dalal_delta_min_oracle(inst) is None


def test_identical_formulas():
    f = cnf(3, (1, 2), (-2, 3))
    inst = RevisionInstance(f, f)
    models = frozenset(all_models(f))
    d, s = dalal_revise(inst), satoh_revise(inst)
    assert d.delta_min == 0 and d.selected_models == models
    assert s.minimal_diffs == {frozenset()} and s.selected_models == models


def test_dalal_hardness_gadget_instance():
    for f, expect in ((cnf(2, (1, 2)), True), (cnf(2, (1,), (1, 2)), True),
                      (cnf(2, (2,), (1, 2)), False)):
        d = reduce_cardmin_to_dalal(OptQuery(f, 1)).target
        inst = RevisionInstance(d.psi, d.mu)
        assert dalal_model_check(inst, d.m2)
        assert dalal_model_check(inst, d.m1) == expect == brute_force_card_min(OptQuery(f, 1)).answer


def test_satoh_example():
    r = satoh_revise(SAT1)
    assert r.minimal_diffs == {frozenset({1}), frozenset({2})}
    assert r.selected_models == {A(2, 1), A(2, 2)}
    assert satoh_model_check(SAT1, A(2, 2))
    assert not satoh_model_check(SAT1, A(2))
    assert not satoh_implication(SAT1, 1)


def test_satoh_hardness_gadget_instance():
    for f, sat in ((cnf(2, (1, 2, -1)), True), (cnf(1, (1, 1, 1), (-1, -1, -1)), False)):
        s = reduce_3sat_to_satoh_mc(f).target
        assert satoh_model_check(RevisionInstance(s.psi, s.mu), s.model) == sat


def test_satoh_poly_examples():
    I = A(2, 1, 2)
    assert satoh_minimality_check_poly(SAT1, I, A(2, 2))
    assert not satoh_minimality_check_poly(SAT1, I, A(2))
    f = cnf(2, (1, 2))
    assert satoh_minimality_check_poly(RevisionInstance(f, f), A(2, 1), A(2, 1))


def test_satoh_poly_contracts():
    inst = RevisionInstance(cnf(3, (1, 2, 3)), cnf(3, (1, 2, 3)))
    with pytest.raises(ContractError):
        satoh_minimality_check_poly(inst, A(3, 1), A(3, 1))
    with pytest.raises(ContractError):
        satoh_minimality_check_poly(SAT1, A(2), A(2, 2))
    with pytest.raises(ContractError):
        satoh_minimality_check_poly(SAT1, A(2, 1, 2), A(2, 1, 2))


def _random_instances(seed, count, gen):
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        n = rng.randint(1, 10)
        psi, mu = gen(rng, n), gen(rng, n)
        out.append(RevisionInstance(psi, mu))
    return out


@pytest.mark.parametrize("gen", [random_krom, random_horn])
def test_satoh_poly_matches_brute_force(gen):
    rng = random.Random(7)
    checked = 0
    for inst in _random_instances(gen.__name__, 250, gen):
        I, M = random_model(rng, inst.psi), random_model(rng, inst.mu)
        if I is None or M is None:
            continue
        assert satoh_minimality_check_poly(inst, I, M) == brute_force_satoh_minimal(inst, I, M)
        checked += 1
    assert checked > 50


def test_dalal_diff_contains_satoh_minimal():
    for inst in _random_instances(3, 200, random_krom):
        d, s = dalal_revise(inst), satoh_revise(inst)
        psi_models = all_models(inst.psi)
        for m in d.selected_models:
            closest = [p for p in psi_models if len(m.delta(p)) == d.delta_min]
            assert any(any(diff <= m.delta(p) for diff in s.minimal_diffs) for p in closest)
        for m in s.selected_models:
            assert evaluate(inst.mu, m)


def test_mu_entailing_psi_gives_zero():
    for inst in _random_instances(5, 100, random_krom):
        mu = inst.mu.extended(clauses=inst.psi.clauses)
        r = dalal_revise(RevisionInstance(inst.psi, mu))
        if all_models(mu):
            assert r.delta_min == 0 and r.selected_models == frozenset(all_models(mu))


def test_dalal_oracle_matches_brute_force():
    rng = random.Random(11)
    for inst in _random_instances(9, 150, random_positive_krom):
        assert dalal_delta_min_oracle(inst) == dalal_revise(inst).delta_min
        x = rng.randint(1, inst.universe_size)
        assert dalal_implication(inst, x, "oracle") == dalal_implication(inst, x, "brute")
        sel = dalal_revise(inst).selected_models
        # independent path: intersection of the selected models
        assert dalal_implication(inst, x) == all(x in m.true_set for m in sel)
        M = random_model(rng, inst.mu)
        if M is not None:
            assert dalal_model_check(inst, M, "oracle") == (M in sel)
