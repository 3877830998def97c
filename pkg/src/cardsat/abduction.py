"""Propositional abduction: solutions, and relevance under three preorders."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .logic import CnfFormula, ContractError, RefusalError, model_masks
from .sat import CardinalityBound, Oracle, bound_clauses, sat, solve_2sat

HYPOTHESIS_CAP = 20


@dataclass(frozen=True)
class Pap:
    universe_size: int
    hypotheses: frozenset
    manifestations: frozenset
    theory: CnfFormula

    def __post_init__(self):
        n = self.universe_size
        if self.theory.universe_size != n:
            raise ContractError("theory universe differs from the PAP universe")
        for name in ("hypotheses", "manifestations"):
            vals = frozenset(getattr(self, name))
            if any(v < 1 or v > n for v in vals):
                raise ContractError(f"{name} leave the universe")
            object.__setattr__(self, name, vals)
        if not _consistent(self.theory, ()):
            raise ContractError("the theory is inconsistent")


@dataclass(frozen=True)
class AbductionAnswer:
    relevant: bool
    min_size: int | None = None
    witness_solution: frozenset | None = None

    def key(self):
        return (self.relevant, self.min_size)


def _consistent(theory: CnfFormula, units) -> bool:
    f = theory.extended(clauses=[(u,) for u in units])
    return (solve_2sat(f) if f.is_krom else sat(f)).satisfiable


def is_solution(p: Pap, s) -> bool:
    s = frozenset(s)
    if not s <= p.hypotheses:
        raise ContractError("candidate contains non-hypotheses")
    units = sorted(s)
    if not _consistent(p.theory, units):
        return False
    return all(not _consistent(p.theory, units + [-m]) for m in sorted(p.manifestations))


def _check_h(p, h):
    if not 1 <= h <= p.universe_size:
        raise ContractError(f"x{h} is outside the universe")


def _candidate(p: Pap, k: int, blocks, force: int | None, oracle):
    """Consistent hypothesis set of size <= k avoiding every blocked pattern."""
    n = p.universe_size
    hyps = sorted(p.hypotheses)
    sel = {h: n + i + 1 for i, h in enumerate(hyps)}
    top = n + len(hyps)
    cl = list(p.theory.clauses)
    cl += [(-sel[h], h) for h in hyps]
    cl += [tuple(sel[h] for h in b) for b in blocks]
    card, top = bound_clauses(CardinalityBound.at_most(k, sel.values()), top)
    cl += card
    if force is not None:
        cl.append((sel[force],))
    r = sat(CnfFormula(top, tuple(cl)), oracle=oracle)
    if not r.satisfiable:
        return None
    return frozenset(h for h in hyps if sel[h] in r.witness)


def _search(p: Pap, k: int, blocks: list, force, oracle):
    """Solution of size <= k (containing ``force`` if given), refining ``blocks``."""
    while True:
        s = _candidate(p, k, blocks, force, oracle)
        if s is None:
            return None
        for m in sorted(p.manifestations):
            f = p.theory.extended(clauses=[(u,) for u in sorted(s)] + [(-m,)])
            r = solve_2sat(f) if f.is_krom else sat(f, oracle=oracle)
            if r.satisfiable:
                # any subset of the counter-model's true hypotheses fails too
                blocks.append(tuple(sorted(p.hypotheses - r.witness.true_set)))
                break
        else:
            return s


def leq_relevance(p: Pap, h: int, mode: str = "oracle",
                  oracle: Oracle | None = None) -> AbductionAnswer:
    """Is ``h`` in some cardinality-minimal solution?

    A variable outside H is in no solution, so the answer is then false,
    with the minimum solution size still reported.
    """
    _check_h(p, h)
    if mode == "brute":
        return _enumerated_relevance(p, h)
    blocks: list = []
    best = _search(p, len(p.hypotheses), blocks, None, oracle)
    if best is None:
        return AbductionAnswer(False)
    lo, hi = 0, len(best)
    while lo < hi:
        mid = (lo + hi) // 2
        s = _search(p, mid, blocks, None, oracle)
        if s is None:
            lo = mid + 1
        else:
            best, hi = s, len(s)
    if h in best:
        return AbductionAnswer(True, hi, best)
    if h not in p.hypotheses:
        return AbductionAnswer(False, hi)
    s = _search(p, hi, blocks, h, oracle)
    if s is None:
        return AbductionAnswer(False, hi)
    return AbductionAnswer(True, hi, s)


def _enumerated_relevance(p: Pap, h: int) -> AbductionAnswer:
    hyps = sorted(p.hypotheses)
    if len(hyps) > HYPOTHESIS_CAP:
        raise RefusalError(f"{len(hyps)} hypotheses exceed the cap of {HYPOTHESIS_CAP}")
    for k in range(len(hyps) + 1):
        sols = [frozenset(c) for c in itertools.combinations(hyps, k) if is_solution(p, c)]
        if sols:
            hit = next((s for s in sols if h in s), None)
            return AbductionAnswer(hit is not None, k, hit)
    return AbductionAnswer(False)


def _solution_table(p: Pap, cap=None):
    """Every solution, found from the theory's model set without the SAT backend."""
    hyps = sorted(p.hypotheses)
    if len(hyps) > HYPOTHESIS_CAP:
        raise RefusalError(f"{len(hyps)} hypotheses exceed the cap of {HYPOTHESIS_CAP}")
    models = model_masks(p.theory, cap)
    man = sum(1 << (m - 1) for m in p.manifestations)
    sols = []
    for k in range(len(hyps) + 1):
        for c in itertools.combinations(hyps, k):
            smask = sum(1 << (v - 1) for v in c)
            ext = models[(models & smask) == smask]
            if ext.size and np.all((ext & man) == man):
                sols.append(frozenset(c))
    return sols


def brute_force_solutions(p: Pap, cap=None) -> list[frozenset]:
    return _solution_table(p, cap)


def brute_force_relevance(p: Pap, h: int, preorder: str = "card", cap=None) -> AbductionAnswer:
    _check_h(p, h)
    sols = _solution_table(p, cap)
    if not sols:
        return AbductionAnswer(False)
    if preorder == "card":
        k = min(len(s) for s in sols)
        pool = [s for s in sols if len(s) == k]
    elif preorder == "subset":
        pool = [s for s in sols if not any(t < s for t in sols)]
        k = None
    elif preorder == "any":
        pool, k = sols, None
    else:
        raise ContractError(f"unknown preorder {preorder!r}")
    hit = next((s for s in pool if h in s), None)
    size = k if preorder == "card" else (len(hit) if hit else None)
    return AbductionAnswer(hit is not None, size, hit)


def relevance(p: Pap, h: int, preorder: str = "card", mode: str = "oracle",
              oracle: Oracle | None = None) -> AbductionAnswer:
    if preorder == "card":
        return leq_relevance(p, h, mode, oracle)
    return brute_force_relevance(p, h, preorder)
