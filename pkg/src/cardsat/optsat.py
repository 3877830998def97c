"""Cardinality- and lexicographically-optimal satisfiability.

Each decision procedure comes in two flavours: an oracle-guided algorithm
driving the SAT backend with a logarithmic number of bounded queries, and a
brute-force counterpart that enumerates every model.  The brute-force
versions exist only to check the others.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .logic import (Assignment, CnfFormula, ConstraintFormula, ContractError,
                    VariableOrder, constraint_model_masks, model_masks, popcount)
from .sat import CardinalityBound, Oracle, sat, sat_with_bound


@dataclass(frozen=True)
class OptQuery:
    formula: CnfFormula
    query_var: int

    def __post_init__(self):
        if not 1 <= self.query_var <= self.formula.universe_size:
            raise ContractError(f"query variable {self.query_var} outside universe")


@dataclass(frozen=True)
class OptAnswer:
    answer: bool
    optimum: int | None = None
    witness: Assignment | None = None
    bounded_calls: int = field(default=0, compare=False)

    def key(self):
        return (self.answer, self.optimum)


@dataclass(frozen=True)
class Cluster:
    side_a: frozenset
    side_b: frozenset = frozenset()
    forced: int | None = None  # value side_a must take, if a unary constraint fixes it


def _card_opt(q: OptQuery, direction: str, oracle: Oracle | None) -> OptAnswer:
    f = q.formula
    scope = range(1, f.universe_size + 1)
    first = sat(f, oracle=oracle)
    if not first.satisfiable:
        return OptAnswer(False)
    calls = 0
    best = first.witness
    if direction == "at-most":
        # optimum lies in [lo, best]; every witness tightens the upper end
        lo, hi = 0, best.cardinality
        while lo < hi:
            mid = (lo + hi) // 2
            calls += 1
            r = sat_with_bound(f, CardinalityBound.at_most(mid, scope), oracle=oracle)
            if r.satisfiable:
                best, hi = r.witness, r.witness.cardinality
            else:
                lo = mid + 1
        opt = hi
    else:
        lo, hi = best.cardinality, f.universe_size
        while lo < hi:
            mid = (lo + hi + 1) // 2
            calls += 1
            r = sat_with_bound(f, CardinalityBound.at_least(mid, scope), oracle=oracle)
            if r.satisfiable:
                best, lo = r.witness, r.witness.cardinality
            else:
                hi = mid - 1
        opt = lo
    if q.query_var in best:
        return OptAnswer(True, opt, best, calls)
    calls += 1
    bound = CardinalityBound(direction, opt, frozenset(scope))
    r = sat_with_bound(f, bound, assumptions=[q.query_var], oracle=oracle)
    if r.satisfiable:
        return OptAnswer(True, opt, r.witness, calls)
    return OptAnswer(False, opt, None, calls)


def card_min_sat(q: OptQuery, oracle: Oracle | None = None) -> OptAnswer:
    """Is the query atom true in some cardinality-minimal model?"""
    return _card_opt(q, "at-most", oracle)


def card_max_sat(q: OptQuery, oracle: Oracle | None = None) -> OptAnswer:
    return _card_opt(q, "at-least", oracle)


def brute_force_from_masks(masks: np.ndarray, n: int, var: int, minimise: bool) -> OptAnswer:
    if masks.size == 0:
        return OptAnswer(False)
    sizes = popcount(masks)
    opt = int(sizes.min() if minimise else sizes.max())
    hits = masks[(sizes == opt) & (((masks >> (var - 1)) & 1) == 1)]
    if hits.size == 0:
        return OptAnswer(False, opt)
    return OptAnswer(True, opt, Assignment.from_mask(n, int(hits[0])))


def brute_force_card_min(q: OptQuery, cap: int | None = None) -> OptAnswer:
    f = q.formula
    return brute_force_from_masks(model_masks(f, cap), f.universe_size, q.query_var, True)


def brute_force_card_max(q: OptQuery, cap: int | None = None) -> OptAnswer:
    f = q.formula
    return brute_force_from_masks(model_masks(f, cap), f.universe_size, q.query_var, False)


def brute_force_constraint_card_min(cf: ConstraintFormula, query_var: int,
                                    cap: int | None = None) -> OptAnswer:
    return brute_force_from_masks(constraint_model_masks(cf, cap), cf.universe_size, query_var, True)


def lex_max_model(formula: CnfFormula, order: VariableOrder,
                  oracle: Oracle | None = None) -> Assignment | None:
    """Lexicographically largest model, fixing one bit per oracle call."""
    order.check_universe(formula.universe_size, complete=True)
    res = sat(formula, oracle=oracle)
    if not res.satisfiable:
        return None
    fixed: list[int] = []
    witness = res.witness
    for v in order:
        if v in witness:
            fixed.append(v)
            continue
        r = sat(formula, fixed + [v], oracle=oracle)
        if r.satisfiable:
            fixed.append(v)
            witness = r.witness
        else:
            fixed.append(-v)
    return witness


def log_lex_max_sat(formula: CnfFormula, prefix: VariableOrder,
                    oracle: Oracle | None = None) -> tuple[tuple[int, ...], bool] | None:
    """Lex-max extendable bit vector over ``prefix`` and whether its last bit is 1.

    Returns None when the formula has no model.
    """
    if len(prefix) < 1:
        raise ContractError("prefix must name at least one variable")
    prefix.check_universe(formula.universe_size)
    res = sat(formula, oracle=oracle)
    if not res.satisfiable:
        return None
    fixed: list[int] = []
    witness = res.witness
    for v in prefix:
        if v in witness:
            fixed.append(v)
            continue
        r = sat(formula, fixed + [v], oracle=oracle)
        if r.satisfiable:
            fixed.append(v)
            witness = r.witness
        else:
            fixed.append(-v)
    bits = tuple(int(l > 0) for l in fixed)
    return bits, bool(bits[-1])


def brute_force_log_lex_max(formula: CnfFormula, prefix: VariableOrder,
                            cap: int | None = None):
    masks = model_masks(formula, cap)
    if masks.size == 0:
        return None
    vecs = {tuple(int(m >> (v - 1) & 1) for v in prefix) for m in masks.tolist()}
    best = max(vecs)
    return best, bool(best[-1])


# -- width-2 affine formulas -------------------------------------------------

EQ_TUPLES = frozenset({(0, 0), (1, 1)})
NEQ_TUPLES = frozenset({(0, 1), (1, 0)})


class Unsatisfiable(Exception):
    pass


class _ParityUnionFind:
    def __init__(self, n):
        self.parent = list(range(n + 1))
        self.parity = [0] * (n + 1)  # parity relative to parent

    def find(self, v):
        path = []
        while self.parent[v] != v:
            path.append(v)
            v = self.parent[v]
        root, acc = v, 0
        for u in reversed(path):
            acc ^= self.parity[u]
            self.parity[u] = acc
            self.parent[u] = root
        return root

    def relation(self, v):
        root = self.find(v)
        return root, (self.parity[v] if v != root else 0)

    def union(self, u, v, differ):
        ru, pu = self.relation(u)
        rv, pv = self.relation(v)
        if ru == rv:
            if pu ^ pv != differ:
                raise Unsatisfiable(f"x{u} and x{v} are forced both equal and different")
            return
        self.parent[rv] = ru
        self.parity[rv] = pu ^ pv ^ differ


def _width2_atoms(cf: ConstraintFormula):
    """One ('unary', v, bit) | ('eq'|'neq', u, v) | ('false',) atom per application."""
    atoms = []
    for name, args in cf.applications:
        rel = cf.relations[name]
        if rel.arity == 1:
            if rel.tuples == {(0,), (1,)}:
                continue
            atoms.append(("unary", args[0], next(iter(rel.tuples))[0])
                         if rel.tuples else ("false",))
        elif rel.arity == 2 and rel.tuples == EQ_TUPLES:
            atoms.append(("eq", *args))
        elif rel.arity == 2 and rel.tuples == NEQ_TUPLES:
            atoms.append(("neq", *args))
        else:
            raise ContractError(
                f"relation {name} is not a unary, equality or disequality constraint")
    return atoms


def clusters(cf: ConstraintFormula) -> list[Cluster]:
    """Group variables into clusters of opposite-valued classes.

    Raises :class:`Unsatisfiable` when the constraints contradict each other.
    """
    atoms = _width2_atoms(cf)
    uf = _ParityUnionFind(cf.universe_size)
    for atom in atoms:
        if atom[0] == "false":
            raise Unsatisfiable("empty unary relation applied")
        if atom[0] in ("eq", "neq"):
            uf.union(atom[1], atom[2], int(atom[0] == "neq"))
    forced: dict[int, int] = {}
    for atom in atoms:
        if atom[0] == "unary":
            root, par = uf.relation(atom[1])
            want = atom[2] ^ par
            if forced.setdefault(root, want) != want:
                raise Unsatisfiable(f"x{atom[1]} is forced to both truth values")
    sides: dict[int, tuple[set, set]] = {}
    for v in range(1, cf.universe_size + 1):
        root, par = uf.relation(v)
        sides.setdefault(root, (set(), set()))[par].add(v)
    return [Cluster(frozenset(a), frozenset(b), forced.get(root))
            for root, (a, b) in sides.items()]


def width2affine_card_min_sat(cf: ConstraintFormula, query_var: int) -> OptAnswer:
    """Polynomial CardMinSat for formulas over unary, = and != constraints."""
    if not 1 <= query_var <= cf.universe_size:
        raise ContractError("query variable outside universe")
    try:
        cl = clusters(cf)
    except Unsatisfiable:
        return OptAnswer(False)
    optimum = 0
    true: set[int] = set()
    answer = False
    for c in cl:
        if c.forced is not None:
            pick_a = c.forced == 1
        else:
            pick_a = len(c.side_a) <= len(c.side_b)
            if query_var in c.side_a | c.side_b:
                mine = c.side_a if query_var in c.side_a else c.side_b
                other = c.side_b if mine is c.side_a else c.side_a
                if len(mine) <= len(other):
                    pick_a = mine is c.side_a
        chosen = c.side_a if pick_a else c.side_b
        optimum += len(chosen)
        true |= chosen
        if query_var in chosen:
            answer = True
    if not answer:
        return OptAnswer(False, optimum)
    return OptAnswer(True, optimum, Assignment(cf.universe_size, frozenset(true)))
