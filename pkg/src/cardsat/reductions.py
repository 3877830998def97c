"""Reduction gadgets between the optimisation, revision and abduction problems.

Every construction keeps the source variables at their original ids and
appends fresh variables after them in a fixed order, so outputs are
reproducible byte for byte.  Biconditionals and implications are written
out as explicit two-literal clauses.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any

from .clones import closure_report
from .logic import (OR2, Assignment, BooleanRelation, CnfFormula, ConstraintFormula,
                    ContractError, Graph, RefusalError, VariableOrder)
from .optsat import OptQuery

LOGLEX_PREFIX_GUARD = 20


@dataclass(frozen=True)
class ReductionOutput:
    target: Any
    var_map: dict = field(default_factory=dict)
    note: str = ""


@dataclass(frozen=True)
class IndSetInstance:
    graph: Graph
    query_vertex: int
    bound_k: int | None = None

    def __post_init__(self):
        if not 1 <= self.query_vertex <= self.graph.vertex_count:
            raise ContractError("query vertex outside graph")
        if self.bound_k is not None and self.bound_k < 1:
            raise ContractError("bound must be a positive integer")


def _iff(a, b):
    return [(-a, b), (a, -b)]


def _identity(n):
    return {v: v for v in range(1, n + 1)}


def reduce_loglex_to_cardmax(formula: CnfFormula, prefix: VariableOrder) -> ReductionOutput:
    """Weight the ordered variables by binary copies; pair the rest with complements."""
    ell = len(prefix)
    if ell < 1:
        raise ContractError("prefix must name at least one variable")
    if ell > LOGLEX_PREFIX_GUARD:
        raise RefusalError(f"prefix of length {ell} needs 2^{ell} copies "
                           f"(guard {LOGLEX_PREFIX_GUARD})")
    prefix.check_universe(formula.universe_size)
    n = formula.universe_size
    top = n
    extra = []
    copies = {}
    for i, v in enumerate(prefix, 1):
        ids = list(range(top + 1, top + 2 ** (ell - i)))
        top += len(ids)
        copies[v] = ids
        for c in ids:
            extra += _iff(v, c)
    ordered = set(prefix)
    for v in range(1, n + 1):
        if v not in ordered:
            top += 1
            copies[v] = [top]
            extra += [(v, top), (-v, -top)]
    target = OptQuery(formula.extended(top, extra), prefix.ordered_prefix[-1])
    return ReductionOutput(target, _identity(n), "LogLexMaxSat <= CardMaxSat (copies gadget)")


def pad_3cnf(formula: CnfFormula) -> list[tuple[int, int, int]]:
    out = []
    for c in formula.clauses:
        if not 1 <= len(c) <= 3:
            raise ContractError("formula is not in 3-CNF")
        out.append(tuple((c * 3)[:3]))
    return out


def reduce_cardmax3cnf_to_maxindset(q: OptQuery) -> ReductionOutput:
    """L copies of the clause triangles plus one vertex u_i per variable."""
    f = q.formula
    clauses = pad_3cnf(f)
    n, m = f.universe_size, len(clauses)
    L = n + 1
    K = L * m

    def vid(i, j, s):  # clause i, copy j, slot s (0-based)
        return 1 + (i * L + j) * 3 + s

    u = {x: 3 * K + x for x in range(1, n + 1)}
    edges = set()
    for i in range(m):
        for j in range(L):
            a, b, c = vid(i, j, 0), vid(i, j, 1), vid(i, j, 2)
            edges |= {(a, b), (a, c), (b, c)}
    occ = [(i, s, clauses[i][s]) for i in range(m) for s in range(3)]
    for (i1, s1, l1), (i2, s2, l2) in itertools.combinations(occ, 2):
        if l1 == -l2:
            for j1 in range(L):
                for j2 in range(L):
                    edges.add((vid(i1, j1, s1), vid(i2, j2, s2)))
    for i, s, l in occ:
        if l < 0:
            for j in range(L):
                edges.add((vid(i, j, s), u[-l]))
    g = Graph(3 * K + n, frozenset(edges))
    return ReductionOutput(IndSetInstance(g, u[q.query_var], K), u,
                           "CardMaxSat(3-CNF) <= MaxIndependentSet (triangle copies)")


def drop_bound(inst: IndSetInstance) -> IndSetInstance:
    if inst.bound_k is None:
        raise ContractError("instance carries no bound")
    g = inst.graph
    n, K = g.vertex_count, inst.bound_k
    edges = set(g.edges)
    for i in range(1, K + 1):
        for v in range(1, n + 1):
            edges.add((v, n + i))
    return IndSetInstance(Graph(n + K, frozenset(edges)), inst.query_vertex)


def graph_to_negative_krom(inst: IndSetInstance) -> OptQuery:
    if inst.bound_k is not None:
        raise ContractError("drop the bound first")
    g = inst.graph
    clauses = tuple((-a, -b) for a, b in sorted(g.edges))
    return OptQuery(CnfFormula(g.vertex_count, clauses), inst.query_vertex)


def tau(I: Assignment) -> Assignment:
    """Embedding of an assignment into the duplicated universe (x', x'' mark x false)."""
    n = I.universe_size
    false = [v for v in range(1, n + 1) if v not in I]
    return Assignment(3 * n, I.true_set | {n + v for v in false} | {2 * n + v for v in false})


def negkrom_cardmax_to_poskrom_cardmin(q: OptQuery) -> ReductionOutput:
    f = q.formula
    if not (f.is_negative and f.is_krom):
        raise ContractError("expected a Krom formula with negative literals only")
    n = f.universe_size
    p1 = lambda v: n + v  # x'
    p2 = lambda v: 2 * n + v  # x''
    clauses = []
    for v in range(1, n + 1):
        clauses += [(v, p1(v)), (v, p2(v))]
    for c in f.clauses:
        if not c:
            clauses.append(())
            continue
        x, y = -c[0], -c[-1]
        clauses += [(p1(x), p1(y)), (p2(x), p1(y)), (p1(x), p2(y)), (p2(x), p2(y))]
    target = OptQuery(CnfFormula(3 * n, tuple(clauses)), q.query_var)
    return ReductionOutput(target, _identity(n),
                           "CardMaxSat(negative Krom) <= CardMinSat(positive Krom)")


def _require_positive_krom(f: CnfFormula):
    if not (f.is_positive and f.is_krom) or any(not c for c in f.clauses):
        raise ContractError("expected a positive Krom formula without empty clauses")


@dataclass(frozen=True)
class DalalInstance:
    psi: CnfFormula
    mu: CnfFormula
    m1: Assignment
    m2: Assignment
    y: int


def reduce_cardmin_to_dalal(q: OptQuery) -> ReductionOutput:
    f = q.formula
    _require_positive_krom(f)
    n, x0 = f.universe_size, q.query_var
    y = n + 1
    psi = [(-c[0], -c[-1]) for c in f.clauses] + [(y,)]
    others = [v for v in range(1, n + 1) if v != x0]
    mu = [(v,) for v in others] + [(x0, -y), (-x0, y)]
    m1 = Assignment(n + 1, frozenset(others))
    m2 = Assignment(n + 1, frozenset(others) | {x0, y})
    inst = DalalInstance(CnfFormula(n + 1, tuple(psi)), CnfFormula(n + 1, tuple(mu)), m1, m2, y)
    return ReductionOutput(inst, _identity(n), "CardMinSat <= Dalal model checking / implication")


@dataclass(frozen=True)
class SatohInstance:
    psi: CnfFormula
    mu: CnfFormula
    model: Assignment
    d: int


def reduce_3sat_to_satoh_mc(formula: CnfFormula) -> ReductionOutput:
    clauses = pad_3cnf(formula)
    n, m = formula.universe_size, len(clauses)
    y = lambda i: n + i
    a = lambda j: 2 * n + j
    b = lambda j: 2 * n + m + j
    d = 2 * n + 2 * m + 1
    star = lambda l: l if l > 0 else y(-l)
    psi = [(-i, -y(i)) for i in range(1, n + 1)]
    for j, c in enumerate(clauses, 1):
        psi += [(-star(l), -a(j)) for l in c]
    for j in range(1, m + 1):
        psi += _iff(a(j), b(j))
    mu = [(i,) for i in range(1, n + 1)] + [(y(i),) for i in range(1, n + 1)]
    mu += [(a(j),) for j in range(1, m + 1)]
    mu += [(-b(j), d) for j in range(1, m + 1)]
    model = Assignment(d, frozenset(range(1, 2 * n + m + 1)))
    inst = SatohInstance(CnfFormula(d, tuple(psi)), CnfFormula(d, tuple(mu)), model, d)
    return ReductionOutput(inst, _identity(n), "3SAT <= Satoh model checking")


def reduce_cardmin_to_abduction(q: OptQuery) -> ReductionOutput:
    from .abduction import Pap

    f = q.formula
    _require_positive_krom(f)
    n, m = f.universe_size, len(f.clauses)
    theory = []
    for j, c in enumerate(f.clauses, 1):
        g = n + j
        for p in dict.fromkeys((c[0], c[-1])):
            theory.append((-p, g))
    pap = Pap(n + m, frozenset(range(1, n + 1)), frozenset(range(n + 1, n + m + 1)),
              CnfFormula(n + m, tuple(theory)))
    return ReductionOutput((pap, q.query_var), _identity(n), "CardMinSat <= <=-Relevance")


def _or2_edges(cf: ConstraintFormula):
    edges = []
    for name, args in cf.applications:
        rel = cf.relations[name]
        if rel.arity != 2 or rel.tuples != OR2.tuples:
            raise ContractError(f"application {name}{args} is not an OR2 constraint")
        edges.append(args)
    return edges


def reduce_or2_to_r4p(cf: ConstraintFormula, query_var: int) -> ReductionOutput:
    from .clones import r4p

    edges = _or2_edges(cf)
    n = cf.universe_size
    apps = []
    for i, j in edges:
        apps.append(("R4p", (i, j, n + i, n + j)))
        apps.append(("R4p", (2 * n + i, 2 * n + j, n + i, n + j)))
    target = ConstraintFormula(3 * n, tuple(apps), {"R4p": r4p()})
    return ReductionOutput((target, query_var), _identity(n), "CardMinSat(OR2) <= CardMinSat(R4p)")


@dataclass(frozen=True)
class S01Gadget:
    m1: tuple
    m2: tuple
    classes: dict  # (i, j) -> coordinates (1-based) where m1=i, m2=j
    M: BooleanRelation
    branch: str  # "1001-absent" | "1001-present"


def s01_gadget(S: BooleanRelation, R: BooleanRelation) -> S01Gadget:
    checks = [
        (S.tuples and (1,) * S.arity in S.tuples, "S must be 1-valid"),
        ((0,) * S.arity not in S.tuples, "S must not be 0-valid"),
    ]
    rep = closure_report(R)
    checks += [(rep.one_valid, "R must be 1-valid"),
               (rep.dual_horn, "R must be dual Horn"),
               (not rep.horn, "R must not be Horn")]
    for ok, msg in checks:
        if not ok:
            raise ContractError(msg)
    ts = R.sorted_tuples()
    m1 = m2 = None
    for p, q in itertools.product(ts, repeat=2):
        if tuple(a & b for a, b in zip(p, q)) not in R.tuples:
            m1, m2 = p, q
            break
    classes = {(i, j): tuple(c + 1 for c in range(R.arity) if (m1[c], m2[c]) == (i, j))
               for i in (0, 1) for j in (0, 1)}
    assert classes[(0, 1)] and classes[(1, 0)]
    order = [(0, 0), (0, 1), (1, 0), (1, 1)]  # w, x, y, t

    def in_m(bits):
        val = {}
        for cls, bit in zip(order, bits):
            for c in classes[cls]:
                val[c] = bit
        return tuple(val[c] for c in range(1, R.arity + 1)) in R.tuples

    M = BooleanRelation(4, frozenset(t for t in itertools.product((0, 1), repeat=4) if in_m(t)))
    branch = "1001-present" if (1, 0, 0, 1) in M.tuples else "1001-absent"
    return S01Gadget(m1, m2, classes, M, branch)


def s01_witness_reduction(cf: ConstraintFormula, query_var: int,
                          S: BooleanRelation, R: BooleanRelation) -> ReductionOutput:
    edges = _or2_edges(cf)
    gad = s01_gadget(S, R)
    n, m = cf.universe_size, len(edges)
    reps = 1 if gad.branch == "1001-absent" else n + 1
    t = n + m * reps + 1
    order = [(0, 0), (0, 1), (1, 0), (1, 1)]

    def apply_m(w, x, y):
        var_of = dict(zip(order, (w, x, y, t)))
        args = [0] * R.arity
        for cls, coords in gad.classes.items():
            for c in coords:
                args[c - 1] = var_of[cls]
        return ("R", tuple(args))

    apps = []
    for i, (x, y) in enumerate(edges):
        for j in range(reps):
            apps.append(apply_m(n + i * reps + j + 1, x, y))
    apps.append(("S", (t,) * S.arity))
    target = ConstraintFormula(t, tuple(apps), {"R": R, "S": S})
    return ReductionOutput((target, query_var), _identity(n),
                           f"CardMinSat(OR2) <= CardMinSat({{S,R}}), branch {gad.branch}")


# -- brute-force oracles for independent sets ---------------------------------

def _mis(adj: tuple[int, ...], cand: int, memo: dict) -> int:
    if cand == 0:
        return 0
    hit = memo.get(cand)
    if hit is not None:
        return hit
    best_v, best_deg = -1, -1
    c = cand
    while c:
        low = c & -c
        v = low.bit_length() - 1
        deg = (adj[v] & cand).bit_count()
        if deg <= 1:
            best_v, best_deg = v, deg
            break
        if deg > best_deg:
            best_v, best_deg = v, deg
        c ^= low
    v = best_v
    take = 1 + _mis(adj, cand & ~adj[v] & ~(1 << v), memo)
    if best_deg <= 1:
        res = take
    else:
        res = max(take, _mis(adj, cand & ~(1 << v), memo))
    memo[cand] = res
    return res


def max_independent_set_size(g: Graph, exclude: int = 0) -> int:
    adj = tuple(g.adjacency()[1:])
    full = ((1 << g.vertex_count) - 1) & ~exclude
    return _mis(adj, full, {})


def brute_force_indset(inst: IndSetInstance) -> bool:
    """Is the query vertex in a maximum independent set (of size >= K if bounded)?"""
    g = inst.graph
    adj = tuple(g.adjacency()[1:])
    memo: dict = {}
    full = (1 << g.vertex_count) - 1
    alpha = _mis(adj, full, memo)
    if inst.bound_k is not None and alpha < inst.bound_k:
        return False
    v = inst.query_vertex - 1
    with_v = 1 + _mis(adj, full & ~adj[v] & ~(1 << v), memo)
    return with_v == alpha


def maximum_independent_set(g: Graph) -> frozenset:
    """One maximum independent set, recovered from the memoised sizes."""
    adj = tuple(g.adjacency()[1:])
    memo: dict = {}
    cand = (1 << g.vertex_count) - 1
    chosen = set()
    while cand:
        v = (cand & -cand).bit_length() - 1
        rest = cand & ~adj[v] & ~(1 << v)
        if 1 + _mis(adj, rest, memo) == _mis(adj, cand, memo):
            chosen.add(v + 1)
            cand = rest
        else:
            cand &= ~(1 << v)
    return frozenset(chosen)


def normalise_copies(q: OptQuery, inst: IndSetInstance, s: frozenset) -> frozenset:
    """Rebuild ``s`` so every clause picks the same slot in all of its copies.

    A slot used by any copy keeps all of its complementary vertices and its
    u-neighbour out of ``s``, so copying that choice to every copy of the
    clause stays independent and never shrinks the set.
    """
    clauses = pad_3cnf(q.formula)
    n, m = q.formula.universe_size, len(clauses)
    L = n + 1
    out = {v for v in s if v > 3 * L * m}
    for i in range(m):
        for slot in range(3):
            ids = [1 + (i * L + j) * 3 + slot for j in range(L)]
            if any(v in s for v in ids):
                out.update(ids)
                break
    return frozenset(out)


def is_independent(g: Graph, s) -> bool:
    return not any(u in s and v in s for u, v in g.edges)
