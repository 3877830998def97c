"""Seeded instance generators and the exhaustive small Krom corpus."""

from __future__ import annotations

import itertools
import random
from functools import lru_cache

import numpy as np

from .logic import (EQ, NEQ, ONE, OR2, ZERO, Assignment, BooleanRelation, CnfFormula,
                    ConstraintFormula, Graph, model_masks)
from .abduction import Pap

THREE_CNF_RATIOS = (2.0, 3.0, 4.2)


def _lit(rng: random.Random, n: int) -> int:
    v = rng.randint(1, n)
    return v if rng.random() < 0.5 else -v


def random_graph(rng: random.Random, n: int, p: float = 0.4) -> Graph:
    edges = {(u, v) for u, v in itertools.combinations(range(1, n + 1), 2) if rng.random() < p}
    return Graph(n, frozenset(edges))


def random_positive_krom(rng: random.Random, n: int, p: float = 0.4) -> CnfFormula:
    """One clause (x_u or x_v) per edge of a G(n, p) graph."""
    return CnfFormula(n, tuple(sorted(random_graph(rng, n, p).edges)))


def random_negative_krom(rng: random.Random, n: int, p: float = 0.4) -> CnfFormula:
    return CnfFormula(n, tuple((-u, -v) for u, v in sorted(random_graph(rng, n, p).edges)))


def random_krom(rng: random.Random, n: int, m: int | None = None) -> CnfFormula:
    if m is None:
        m = rng.randint(0, 2 * n)
    return CnfFormula(n, tuple(tuple(_lit(rng, n) for _ in range(rng.randint(1, 2)))
                               for _ in range(m)))


def random_3cnf(rng: random.Random, n: int, ratio: float | None = None) -> CnfFormula:
    if ratio is None:
        ratio = rng.choice(THREE_CNF_RATIOS)
    m = max(1, round(ratio * n))
    return CnfFormula(n, tuple(tuple(_lit(rng, n) for _ in range(3)) for _ in range(m)))


def random_horn(rng: random.Random, n: int, m: int | None = None) -> CnfFormula:
    if m is None:
        m = rng.randint(1, 2 * n)
    clauses = []
    for _ in range(m):
        body = rng.sample(range(1, n + 1), rng.randint(0, min(3, n)))
        clause = [-v for v in body]
        if rng.random() < 0.7:
            clause.append(rng.randint(1, n))
        clauses.append(tuple(clause))
    return CnfFormula(n, tuple(clauses))


def random_width2affine(rng: random.Random, n: int, m: int | None = None) -> ConstraintFormula:
    if m is None:
        m = rng.randint(0, n + 2)
    rels = {"EQ": EQ, "NEQ": NEQ, "ZERO": ZERO, "ONE": ONE}
    apps = []
    for _ in range(m):
        kind = rng.choices(("EQ", "NEQ", "ZERO", "ONE"), (4, 4, 1, 1))[0]
        if kind in ("EQ", "NEQ"):
            apps.append((kind, tuple(rng.sample(range(1, n + 1), 2)) if n > 1 else (1, 1)))
        else:
            apps.append((kind, (rng.randint(1, n),)))
    return ConstraintFormula(n, tuple(apps), rels)


def random_or2(rng: random.Random, n: int, m: int | None = None) -> ConstraintFormula:
    if m is None:
        m = rng.randint(0, n + 1)
    apps = tuple(("OR2", (rng.randint(1, n), rng.randint(1, n))) for _ in range(m))
    return ConstraintFormula(n, apps, {"OR2": OR2})


def random_pap(rng: random.Random, n: int) -> Pap:
    """A PAP over a consistent random Krom theory."""
    while True:
        theory = random_krom(rng, n, rng.randint(0, n + 2))
        if model_masks(theory).size:
            break
    vs = list(range(1, n + 1))
    rng.shuffle(vs)
    h = rng.randint(1, max(1, n - 1))
    hyps = frozenset(vs[:h])
    rest = vs[h:] or vs
    man = frozenset(rng.sample(rest, rng.randint(1, len(rest))))
    return Pap(n, hyps, man, theory)


def random_model(rng: random.Random, formula: CnfFormula) -> Assignment | None:
    masks = model_masks(formula)
    if masks.size == 0:
        return None
    return Assignment.from_mask(formula.universe_size, int(masks[rng.randrange(masks.size)]))


def random_relation(rng: random.Random, arity: int) -> BooleanRelation:
    tuples = [t for t in itertools.product((0, 1), repeat=arity) if rng.random() < 0.5]
    return BooleanRelation(arity, frozenset(tuples or [(1,) * arity]))


# -- exhaustive Krom corpus ---------------------------------------------------

def _krom_clauses(n: int):
    lits = [l for v in range(1, n + 1) for l in (v, -v)]
    out = [()] + [(l,) for l in lits]
    out += [(a, b) for a, b in itertools.combinations(lits, 2) if a != -b]
    return out


def _clause_models(n: int, clause) -> int:
    """Bit a is set iff assignment mask a satisfies the clause."""
    bits = 0
    for a in range(1 << n):
        if any((a >> (abs(l) - 1) & 1) == (l > 0) for l in clause):
            bits |= 1 << a
    return bits


@lru_cache(maxsize=None)
def _perm_tables(n: int):
    perms = list(itertools.permutations(range(n)))
    table = np.zeros((len(perms), 1 << n), dtype=np.uint64)
    for k, p in enumerate(perms):
        for a in range(1 << n):
            b = 0
            for i in range(n):
                if a >> i & 1:
                    b |= 1 << p[i]
            table[k, a] = b
    return perms, table


def _canonical(n: int, sets: np.ndarray):
    """Smallest image of each model set under variable permutations, and the permutation used."""
    perms, table = _perm_tables(n)
    bits = (sets[:, None] >> np.arange(1 << n, dtype=np.uint64)) & np.uint64(1)
    images = np.zeros((sets.size, len(perms)), dtype=np.uint64)
    for k in range(len(perms)):
        images[:, k] = (bits << table[k]).sum(axis=1, dtype=np.uint64)
    best = images.argmin(axis=1)
    return images[np.arange(sets.size), best], [perms[k] for k in best]


def _permute_clause(clause, p):
    return tuple((p[abs(l) - 1] + 1) * (1 if l > 0 else -1) for l in clause)


def exhaustive_krom_corpus(n: int, max_clauses: int = 6) -> list[CnfFormula]:
    """One Krom formula per model set reachable with ``max_clauses`` clauses, up to renaming.

    Formulas with the same model set, or whose model sets differ only by a
    permutation of variables, have the same optimisation answers (for the
    correspondingly permuted query), so one representative per class
    suffices when every query variable is tested.
    """
    clauses = _krom_clauses(n)
    cmodels = np.array([_clause_models(n, c) for c in clauses], dtype=np.uint64)
    full = np.array([(1 << (1 << n)) - 1], dtype=np.uint64)
    canon, _ = _canonical(n, full)
    seen = {int(canon[0]): ()}
    frontier = {int(canon[0]): ()}
    for _ in range(max_clauses):
        keys = np.array(list(frontier), dtype=np.uint64)
        children = (keys[:, None] & cmodels[None, :]).ravel()
        parent = np.repeat(np.arange(keys.size), cmodels.size)
        which = np.tile(np.arange(cmodels.size), keys.size)
        children, first = np.unique(children, return_index=True)
        canon, perm = _canonical(n, children)
        nxt = {}
        for c, idx, p in zip(canon.tolist(), first.tolist(), perm):
            if c in seen or c in nxt:
                continue
            body = frontier[int(keys[parent[idx]])] + (clauses[which[idx]],)
            nxt[c] = tuple(_permute_clause(cl, p) for cl in body)
        seen.update(nxt)
        frontier = nxt
        if not frontier:
            break
    return [CnfFormula(n, body) for _, body in sorted(seen.items())]


# -- the S01 gadget's second branch --------------------------------------------

SINGLETON_ONE = BooleanRelation(1, frozenset({(1,)}))


def s01_branch_relations(max_arity: int = 4):
    """Every relation R of arity <= max_arity meeting the S01 preconditions, by branch."""
    from .clones import closure_report
    from .reductions import s01_gadget

    found = {"1001-absent": [], "1001-present": []}
    for k in range(2, max_arity + 1):
        space = list(itertools.product((0, 1), repeat=k))
        for mask in range(1, 1 << len(space)):
            r = BooleanRelation(k, frozenset(t for i, t in enumerate(space) if mask >> i & 1))
            rep = closure_report(r)
            if rep.one_valid and rep.dual_horn and not rep.horn:
                found[s01_gadget(SINGLETON_ONE, r).branch].append(r)
    return found
