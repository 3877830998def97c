"""Dalal and Satoh belief revision: model checking and atom implication.

Brute-force mode enumerates the models of both formulas.  Dalal also has
an oracle mode that finds the minimum distance by binary search over a
cardinality bound on difference indicators, so it is not limited by the
enumeration cap.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .logic import Assignment, CnfFormula, ContractError, evaluate, model_masks, popcount
from .sat import CardinalityBound, Oracle, horn_min_model, sat, sat_with_bound, solve_2sat


@dataclass(frozen=True)
class RevisionInstance:
    psi: CnfFormula
    mu: CnfFormula

    def __post_init__(self):
        if self.psi.universe_size != self.mu.universe_size:
            raise ContractError("psi and mu must share a universe")

    @property
    def universe_size(self) -> int:
        return self.psi.universe_size


@dataclass(frozen=True)
class DalalResult:
    delta_min: int | None
    selected_models: frozenset
    psi_unsatisfiable: bool = False


@dataclass(frozen=True)
class SatohResult:
    minimal_diffs: frozenset
    selected_models: frozenset
    psi_unsatisfiable: bool = False


def _masks(inst, cap):
    return model_masks(inst.psi, cap), model_masks(inst.mu, cap)


def _as_models(n, masks):
    return frozenset(Assignment.from_mask(n, int(m)) for m in masks)


def _distance_rows(P: np.ndarray, Q: np.ndarray) -> np.ndarray:
    """Minimum Hamming distance from each mu-model to any psi-model."""
    out = np.empty(Q.size, dtype=np.int64)
    step = max(1, 4_000_000 // max(P.size, 1))
    for s in range(0, Q.size, step):
        block = Q[s:s + step]
        out[s:s + step] = popcount(block[:, None] ^ P[None, :]).min(axis=1)
    return out


def dalal_revise(inst: RevisionInstance, cap: int | None = None) -> DalalResult:
    P, Q = _masks(inst, cap)
    if P.size == 0 or Q.size == 0:
        return DalalResult(None, frozenset(), P.size == 0)
    dist = _distance_rows(P, Q)
    dmin = int(dist.min())
    return DalalResult(dmin, _as_models(inst.universe_size, Q[dist == dmin]))


def _dalal_encoding(inst: RevisionInstance):
    """psi over x (1..n), mu over x' (n+1..2n), d_i <-> x_i xor x'_i (2n+1..3n)."""
    n = inst.universe_size
    cl = list(inst.psi.clauses)
    cl += [tuple(l + n if l > 0 else l - n for l in c) for c in inst.mu.clauses]
    for i in range(1, n + 1):
        x, xp, d = i, n + i, 2 * n + i
        cl += [(-d, x, xp), (-d, -x, -xp), (d, -x, xp), (d, x, -xp)]
    return CnfFormula(3 * n, tuple(cl)), frozenset(range(2 * n + 1, 3 * n + 1))


def dalal_delta_min_oracle(inst: RevisionInstance, oracle: Oracle | None = None) -> int | None:
    enc, diffs = _dalal_encoding(inst)
    first = sat(enc, oracle=oracle)
    if not first.satisfiable:
        return None
    lo, hi = 0, len(first.witness.true_set & diffs)
    while lo < hi:
        mid = (lo + hi) // 2
        r = sat_with_bound(enc, CardinalityBound.at_most(mid, diffs), oracle=oracle)
        if r.satisfiable:
            hi = len(r.witness.true_set & diffs)
        else:
            lo = mid + 1
    return hi


def _check_model_of_mu(inst, M):
    if M.universe_size != inst.universe_size or not evaluate(inst.mu, M):
        raise ContractError("model checking needs a model of mu")


def dalal_model_check(inst: RevisionInstance, M: Assignment, mode: str = "brute",
                      oracle: Oracle | None = None, cap: int | None = None) -> bool:
    _check_model_of_mu(inst, M)
    if mode == "brute":
        return M in dalal_revise(inst, cap).selected_models
    dmin = dalal_delta_min_oracle(inst, oracle)
    if dmin is None:
        return False
    enc, diffs = _dalal_encoding(inst)
    n = inst.universe_size
    fix = [n + v if v in M else -(n + v) for v in range(1, n + 1)]
    return sat_with_bound(enc, CardinalityBound.at_most(dmin, diffs), fix, oracle).satisfiable


def dalal_implication(inst: RevisionInstance, x: int, mode: str = "brute",
                      oracle: Oracle | None = None, cap: int | None = None) -> bool:
    """Does every Dalal-selected model make ``x`` true?  Vacuously true when none."""
    if not 1 <= x <= inst.universe_size:
        raise ContractError("atom outside universe")
    if mode == "brute":
        return all(x in m for m in dalal_revise(inst, cap).selected_models)
    dmin = dalal_delta_min_oracle(inst, oracle)
    if dmin is None:
        return True
    enc, diffs = _dalal_encoding(inst)
    n = inst.universe_size
    return not sat_with_bound(enc, CardinalityBound.at_most(dmin, diffs),
                              [-(n + x)], oracle).satisfiable


def _minimal_masks(diffs: np.ndarray) -> np.ndarray:
    diffs = np.unique(diffs)
    keep = np.ones(diffs.size, dtype=bool)
    for i, d in enumerate(diffs):
        # some other diff that is a proper subset of d
        sub = (diffs & d) == diffs
        sub[i] = False
        if sub.any():
            keep[i] = False
    return diffs[keep]


def satoh_revise(inst: RevisionInstance, cap: int | None = None) -> SatohResult:
    P, Q = _masks(inst, cap)
    n = inst.universe_size
    if P.size == 0 or Q.size == 0:
        return SatohResult(frozenset(), frozenset(), P.size == 0)
    diffs = (Q[:, None] ^ P[None, :])
    minimal = _minimal_masks(diffs.ravel())
    selected = np.isin(diffs, minimal).any(axis=1)
    to_set = lambda m: frozenset(v for v in range(1, n + 1) if int(m) >> (v - 1) & 1)
    return SatohResult(frozenset(to_set(m) for m in minimal), _as_models(n, Q[selected]))


def satoh_model_check(inst: RevisionInstance, M: Assignment, cap: int | None = None) -> bool:
    _check_model_of_mu(inst, M)
    return M in satoh_revise(inst, cap).selected_models


def satoh_implication(inst: RevisionInstance, x: int, cap: int | None = None) -> bool:
    if not 1 <= x <= inst.universe_size:
        raise ContractError("atom outside universe")
    return all(x in m for m in satoh_revise(inst, cap).selected_models)


def brute_force_satoh_minimal(inst: RevisionInstance, I: Assignment, M: Assignment,
                              cap: int | None = None) -> bool:
    """Is I delta M subset-minimal among all psi/mu model differences?"""
    P, Q = _masks(inst, cap)
    d = I.mask ^ M.mask
    diffs = (Q[:, None] ^ P[None, :]).ravel()
    return not np.any(((diffs & d) == diffs) & (diffs != d))


def satoh_minimality_check_poly(inst: RevisionInstance, I: Assignment, M: Assignment) -> bool:
    """Polynomial check that I delta M is subset-minimal, for Krom or Horn inputs.

    For each x_j in the difference, asks whether psi over fresh copies y,
    mu over x, y_j <-> x_j and y_i <-> x_i outside the difference is
    satisfiable; any yes means a strictly smaller difference exists.
    """
    psi, mu = inst.psi, inst.mu
    krom = psi.is_krom and mu.is_krom
    horn = psi.is_horn and mu.is_horn
    if not (krom or horn):
        raise ContractError("both formulas must be Krom, or both Horn")
    n = inst.universe_size
    if I.universe_size != n or not evaluate(psi, I):
        raise ContractError("I must be a model of psi")
    _check_model_of_mu(inst, M)
    diff = I.delta(M)
    shifted = [tuple(l + n if l > 0 else l - n for l in c) for c in psi.clauses]
    base = shifted + list(mu.clauses)
    for i in range(1, n + 1):
        if i not in diff:
            base += [(-(n + i), i), (n + i, -i)]
    for j in sorted(diff):
        f = CnfFormula(2 * n, tuple(base + [(-(n + j), j), (n + j, -j)]))
        found = solve_2sat(f).satisfiable if krom else horn_min_model(f) is not None
        if found:
            return False
    return True
