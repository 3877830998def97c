import math

import pytest
from hypothesis import given, settings, strategies as st

from cardsat.logic import (EQ, NEQ, ONE, ZERO, BooleanRelation, CnfFormula, ConstraintFormula,
                           ContractError, VariableOrder, all_models, evaluate, to_cnf)
from cardsat.optsat import (Cluster, OptQuery, brute_force_card_max, brute_force_card_min,
                            brute_force_constraint_card_min, brute_force_log_lex_max,
                            card_max_sat, card_min_sat, clusters, lex_max_model,
                            log_lex_max_sat, width2affine_card_min_sat)
from cardsat.sat import horn_min_model
from strategies import formulas


def cnf(n, *clauses):
    return CnfFormula(n, tuple(clauses))


CHAIN = cnf(3, (1, 2), (2, 3))


@pytest.mark.parametrize("solver", [card_min_sat, brute_force_card_min])
def test_card_min_examples(solver):
    a = solver(OptQuery(CHAIN, 2))
    assert (a.answer, a.optimum, a.witness.true_set) == (True, 1, {2})
    assert solver(OptQuery(CHAIN, 1)).key() == (False, 1)
    a = solver(OptQuery(cnf(1, (1,), (-1,)), 1))
    assert a.key() == (False, None) and a.witness is None


@pytest.mark.parametrize("solver", [card_max_sat, brute_force_card_max])
def test_card_max_examples(solver):
    f = cnf(2, (-1, -2))
    assert solver(OptQuery(f, 1)).key() == (True, 1)
    assert solver(OptQuery(f, 2)).key() == (True, 1)
    a = solver(OptQuery(cnf(2), 1))
    assert a.key() == (True, 2) and a.witness.true_set == {1, 2}


def test_brute_force_both_singletons_minimal():
    assert brute_force_card_min(OptQuery(cnf(2, (1, 2)), 1)).answer
    assert not brute_force_card_min(OptQuery(cnf(2, ()), 1)).answer


def test_query_outside_universe():
    with pytest.raises(ContractError):
        OptQuery(cnf(2), 3)


def _check_witness(q, a):
    if a.answer:
        assert a.witness is not None and evaluate(q.formula, a.witness)
        assert q.query_var in a.witness and a.witness.cardinality == a.optimum
    else:
        assert a.witness is None


@settings(max_examples=400, deadline=None)
@given(formulas(max_n=10), st.data())
def test_card_opt_matches_brute_force(f, data):
    q = OptQuery(f, data.draw(st.integers(1, f.universe_size)))
    budget = math.ceil(math.log2(f.universe_size + 1)) + 1
    for fast, slow in ((card_min_sat, brute_force_card_min), (card_max_sat, brute_force_card_max)):
        a = fast(q)
        assert a.key() == slow(q).key()
        assert a.bounded_calls <= budget
        _check_witness(q, a)


def _hornify(f):
    """Keep the first positive literal of each clause, negate the others."""
    out = []
    for c in f.clauses:
        pos = [l for l in c if l > 0][:1]
        out.append(tuple(pos + [-abs(l) for l in c if l not in pos]))
    return CnfFormula(f.universe_size, tuple(out))


@settings(max_examples=300, deadline=None)
@given(formulas(max_n=10), st.data())
def test_horn_card_min_is_least_model(f, data):
    f = _hornify(f)
    assert f.is_horn
    q = OptQuery(f, data.draw(st.integers(1, f.universe_size)))
    m = horn_min_model(f)
    a = card_min_sat(q)
    if m is None:
        assert a.optimum is None
    else:
        assert a.answer == (q.query_var in m) and a.optimum == m.cardinality


def test_lex_max_examples():
    order = VariableOrder((1, 2))
    assert lex_max_model(cnf(2, (-1, 2)), order).true_set == {1, 2}
    assert lex_max_model(cnf(2, (-1,), (2,)), order).true_set == {2}
    assert lex_max_model(cnf(2, (1,), (-1,)), order) is None
    with pytest.raises(ContractError):
        lex_max_model(cnf(3), order)


def test_log_lex_examples():
    assert log_lex_max_sat(cnf(3, (-1, 2)), VariableOrder((1, 2))) == ((1, 1), True)
    assert log_lex_max_sat(cnf(2, (-1,), (-2,)), VariableOrder((1, 2))) == ((0, 0), False)
    assert log_lex_max_sat(cnf(2, (1, 2)), VariableOrder((1,))) == ((1,), True)
    assert log_lex_max_sat(cnf(1, (1,), (-1,)), VariableOrder((1,))) is None
    with pytest.raises(ContractError):
        log_lex_max_sat(cnf(1), VariableOrder(()))


@settings(max_examples=300, deadline=None)
@given(formulas(max_n=10), st.randoms(use_true_random=False))
def test_lex_max_is_greatest_model(f, rnd):
    order = list(range(1, f.universe_size + 1))
    rnd.shuffle(order)
    order = VariableOrder(tuple(order))
    m = lex_max_model(f, order)
    models = all_models(f)
    if not models:
        assert m is None
        return
    assert evaluate(f, m)
    assert order.key(m) == max(order.key(x) for x in models)
    k = rnd.randint(1, f.universe_size)
    prefix = VariableOrder(order.ordered_prefix[:k])
    assert log_lex_max_sat(f, prefix) == brute_force_log_lex_max(f, prefix)


W2 = {"EQ": EQ, "NEQ": NEQ, "ZERO": ZERO, "ONE": ONE}


def w2(n, *apps):
    return ConstraintFormula(n, tuple(apps), W2)


def test_width2affine_examples():
    # a..e = 1..5: (a != b) (b != c) (d = e)
    cf = w2(5, ("NEQ", (1, 2)), ("NEQ", (2, 3)), ("EQ", (4, 5)))
    a = width2affine_card_min_sat(cf, 2)
    assert a.key() == (True, 1) and a.witness.true_set == {2}
    assert width2affine_card_min_sat(cf, 1).key() == (False, 1)
    assert width2affine_card_min_sat(w2(1, ("NEQ", (1, 1))), 1).key() == (False, None)


def test_width2affine_rejects_other_relations():
    cf = ConstraintFormula(2, (("IMP", (1, 2)),),
                           {"IMP": BooleanRelation.from_strings(2, ["00", "01", "11"])})
    with pytest.raises(ContractError):
        width2affine_card_min_sat(cf, 1)


def test_clusters_and_forcing():
    cf = w2(4, ("NEQ", (1, 2)), ("EQ", (2, 3)), ("ONE", (3,)))
    cl = clusters(cf)
    assert Cluster(frozenset({1}), frozenset({2, 3}), 0) in cl
    assert Cluster(frozenset({4}), frozenset(), None) in cl
    a = width2affine_card_min_sat(cf, 2)
    assert a.key() == (True, 2)


@st.composite
def width2_formulas(draw):
    n = draw(st.integers(1, 10))
    apps = []
    for _ in range(draw(st.integers(0, n + 3))):
        kind = draw(st.sampled_from(sorted(W2)))
        arity = W2[kind].arity
        apps.append((kind, tuple(draw(st.lists(st.integers(1, n), min_size=arity, max_size=arity)))))
    return ConstraintFormula(n, tuple(apps), W2)


@settings(max_examples=400, deadline=None)
@given(width2_formulas(), st.data())
def test_width2affine_matches_brute_force(cf, data):
    v = data.draw(st.integers(1, cf.universe_size))
    a = width2affine_card_min_sat(cf, v)
    assert a.key() == brute_force_constraint_card_min(cf, v).key()
    assert a.key() == brute_force_card_min(OptQuery(to_cnf(cf), v)).key()
