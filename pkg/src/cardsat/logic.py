"""Propositional data model: CNF formulas, assignments, graphs, Boolean relations.

Variables are 1-based integers and literals are DIMACS-style signed integers
(``3`` is x3, ``-3`` is its negation).  An assignment is the set of variables
it makes true, so cardinality and symmetric difference are plain set
operations.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

ENUMERATION_CAP = 22


class ContractError(ValueError):
    """An operation was called outside its precondition."""


class RefusalError(RuntimeError):
    """An operation declined to run because a size cap would be exceeded."""


def _dedupe(lits: Iterable[int]) -> tuple[int, ...]:
    return tuple(dict.fromkeys(lits))


@dataclass(frozen=True)
class CnfFormula:
    universe_size: int
    clauses: tuple[tuple[int, ...], ...] = ()

    def __post_init__(self):
        if self.universe_size < 0:
            raise ContractError("universe size must be non-negative")
        norm = tuple(_dedupe(int(l) for l in c) for c in self.clauses)
        for c in norm:
            for l in c:
                if l == 0 or abs(l) > self.universe_size:
                    raise ContractError(
                        f"literal {l} outside universe 1..{self.universe_size}")
        object.__setattr__(self, "clauses", norm)

    def __len__(self):
        return len(self.clauses)

    @property
    def tautological(self) -> tuple[int, ...]:
        """Indices of clauses containing a complementary literal pair."""
        return tuple(i for i, c in enumerate(self.clauses)
                     if any(-l in c for l in c))

    @property
    def is_krom(self) -> bool:
        return all(len(c) <= 2 for c in self.clauses)

    @property
    def is_horn(self) -> bool:
        return all(sum(l > 0 for l in c) <= 1 for c in self.clauses)

    @property
    def is_dual_horn(self) -> bool:
        return all(sum(l < 0 for l in c) <= 1 for c in self.clauses)

    @property
    def is_positive(self) -> bool:
        return all(l > 0 for c in self.clauses for l in c)

    @property
    def is_negative(self) -> bool:
        return all(l < 0 for c in self.clauses for l in c)

    @property
    def max_clause_width(self) -> int:
        return max((len(c) for c in self.clauses), default=0)

    def extended(self, universe_size: int | None = None,
                 clauses: Iterable[Sequence[int]] = ()) -> "CnfFormula":
        n = self.universe_size if universe_size is None else universe_size
        return CnfFormula(n, self.clauses + tuple(tuple(c) for c in clauses))


@dataclass(frozen=True)
class Assignment:
    universe_size: int
    true_set: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        ts = frozenset(int(v) for v in self.true_set)
        if any(v < 1 or v > self.universe_size for v in ts):
            raise ContractError(
                f"assignment mentions variables outside 1..{self.universe_size}")
        object.__setattr__(self, "true_set", ts)

    @classmethod
    def from_mask(cls, universe_size: int, mask: int) -> "Assignment":
        mask = int(mask)
        return cls(universe_size,
                   frozenset(v for v in range(1, universe_size + 1)
                             if mask >> (v - 1) & 1))

    @classmethod
    def from_bits(cls, bits: Sequence[int] | str) -> "Assignment":
        """Bit i (0-based) of ``bits`` is the value of variable i+1."""
        bits = [int(b) for b in bits]
        return cls(len(bits), frozenset(i + 1 for i, b in enumerate(bits) if b))

    @property
    def mask(self) -> int:
        return sum(1 << (v - 1) for v in self.true_set)

    @property
    def cardinality(self) -> int:
        return len(self.true_set)

    def __len__(self):
        return len(self.true_set)

    def __contains__(self, v):
        return v in self.true_set

    def __iter__(self):
        return iter(sorted(self.true_set))

    def bits(self) -> tuple[int, ...]:
        return tuple(int(v in self.true_set)
                     for v in range(1, self.universe_size + 1))

    def bitstring(self) -> str:
        return "".join(map(str, self.bits()))

    def value(self, lit: int) -> bool:
        return (abs(lit) in self.true_set) == (lit > 0)

    def delta(self, other: "Assignment") -> frozenset:
        if other.universe_size != self.universe_size:
            raise ContractError("symmetric difference needs a shared universe")
        return self.true_set ^ other.true_set

    def restrict(self, universe_size: int) -> "Assignment":
        return Assignment(universe_size,
                          frozenset(v for v in self.true_set if v <= universe_size))

    def __repr__(self):
        return "{" + ",".join(f"x{v}" for v in self) + "}"


@dataclass(frozen=True)
class VariableOrder:
    """Variables listed from most to least significant."""

    ordered_prefix: tuple[int, ...]

    def __post_init__(self):
        prefix = tuple(int(v) for v in self.ordered_prefix)
        if len(set(prefix)) != len(prefix):
            raise ContractError("variable order repeats a variable")
        if any(v < 1 for v in prefix):
            raise ContractError("variable ids are 1-based")
        object.__setattr__(self, "ordered_prefix", prefix)

    def __len__(self):
        return len(self.ordered_prefix)

    def __iter__(self):
        return iter(self.ordered_prefix)

    def check_universe(self, universe_size: int, complete: bool = False):
        if any(v > universe_size for v in self.ordered_prefix):
            raise ContractError("variable order leaves the universe")
        if complete and len(self.ordered_prefix) != universe_size:
            raise ContractError("variable order must cover the whole universe")

    def key(self, a: Assignment) -> tuple[int, ...]:
        return tuple(int(v in a) for v in self.ordered_prefix)


@dataclass(frozen=True)
class Graph:
    vertex_count: int
    edges: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        norm = set()
        for u, v in self.edges:
            u, v = int(u), int(v)
            if u == v:
                raise ContractError(f"self-loop at vertex {u}")
            if not (1 <= u <= self.vertex_count and 1 <= v <= self.vertex_count):
                raise ContractError(f"edge ({u},{v}) outside 1..{self.vertex_count}")
            norm.add((min(u, v), max(u, v)))
        object.__setattr__(self, "edges", frozenset(norm))

    def adjacency(self) -> list[int]:
        """Neighbourhood bitmask per vertex; index 0 is unused."""
        adj = [0] * (self.vertex_count + 1)
        for u, v in self.edges:
            adj[u] |= 1 << (v - 1)
            adj[v] |= 1 << (u - 1)
        return adj


@dataclass(frozen=True)
class BooleanRelation:
    arity: int
    tuples: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        if self.arity < 1:
            raise ContractError("relation arity must be at least 1")
        ts = frozenset(tuple(int(b) for b in t) for t in self.tuples)
        for t in ts:
            if len(t) != self.arity or any(b not in (0, 1) for b in t):
                raise ContractError(f"tuple {t} does not fit arity {self.arity}")
        object.__setattr__(self, "tuples", ts)

    @classmethod
    def from_strings(cls, arity: int, rows: Iterable[str]) -> "BooleanRelation":
        return cls(arity, frozenset(tuple(int(c) for c in r) for r in rows))

    @classmethod
    def from_predicate(cls, arity: int, pred) -> "BooleanRelation":
        return cls(arity, frozenset(t for t in itertools.product((0, 1), repeat=arity)
                                    if pred(*t)))

    @property
    def is_empty(self) -> bool:
        return not self.tuples

    def __contains__(self, t):
        return tuple(t) in self.tuples

    def __len__(self):
        return len(self.tuples)

    def sorted_tuples(self) -> list[tuple[int, ...]]:
        return sorted(self.tuples)


OR2 = BooleanRelation(2, frozenset({(0, 1), (1, 0), (1, 1)}))
EQ = BooleanRelation(2, frozenset({(0, 0), (1, 1)}))
NEQ = BooleanRelation(2, frozenset({(0, 1), (1, 0)}))
IMP = BooleanRelation(2, frozenset({(0, 0), (0, 1), (1, 1)}))
ZERO = BooleanRelation(1, frozenset({(0,)}))
ONE = BooleanRelation(1, frozenset({(1,)}))


@dataclass(frozen=True)
class ConstraintFormula:
    universe_size: int
    applications: tuple[tuple[str, tuple[int, ...]], ...]
    relations: Mapping[str, BooleanRelation]

    def __post_init__(self):
        apps = tuple((str(name), tuple(int(v) for v in args))
                     for name, args in self.applications)
        for name, args in apps:
            rel = self.relations.get(name)
            if rel is None:
                raise ContractError(f"unknown relation {name!r}")
            if len(args) != rel.arity:
                raise ContractError(
                    f"{name} has arity {rel.arity} but was applied to {len(args)} variables")
            if any(v < 1 or v > self.universe_size for v in args):
                raise ContractError(f"application {name}{args} leaves the universe")
        object.__setattr__(self, "applications", apps)
        object.__setattr__(self, "relations", dict(self.relations))

    def __hash__(self):
        return hash((self.universe_size, self.applications,
                     tuple(sorted(self.relations.items(), key=lambda kv: kv[0]))))

    def used_relations(self) -> dict[str, BooleanRelation]:
        names = {n for n, _ in self.applications}
        return {n: r for n, r in self.relations.items() if n in names}


def _check_universe(n: int, a: Assignment):
    if a.universe_size != n:
        raise ContractError(
            f"assignment universe {a.universe_size} does not match formula universe {n}")


def evaluate(formula: CnfFormula, a: Assignment) -> bool:
    _check_universe(formula.universe_size, a)
    ts = a.true_set
    return all(any((abs(l) in ts) == (l > 0) for l in c) for c in formula.clauses)


def _check_cap(n: int, cap: int | None):
    cap = ENUMERATION_CAP if cap is None else cap
    if n > cap:
        raise RefusalError(
            f"universe of {n} variables exceeds the enumeration cap of {cap}")


def model_masks(formula: CnfFormula, cap: int | None = None) -> np.ndarray:
    """Bitmasks (bit v-1 = variable v) of all models, ascending."""
    n = formula.universe_size
    _check_cap(n, cap)
    # grow partial assignments one variable at a time, filtering each clause
    # as soon as its highest variable has been placed
    by_last: dict[int, list] = {}
    for c in formula.clauses:
        if not c:
            return np.zeros(0, dtype=np.int64)
        by_last.setdefault(max(abs(l) for l in c), []).append(c)
    masks = np.zeros(1, dtype=np.int64)
    for v in range(1, n + 1):
        masks = np.concatenate([masks, masks | (1 << (v - 1))])
        for c in by_last.get(v, ()):
            keep = np.zeros(masks.size, dtype=bool)
            for l in c:
                bit = ((masks >> (abs(l) - 1)) & 1).astype(bool)
                keep |= bit if l > 0 else ~bit
            masks = masks[keep]
        if masks.size == 0:
            break
    return np.sort(masks)


def all_models(formula: CnfFormula, cap: int | None = None) -> list[Assignment]:
    """Every model, ordered by bitmask value with x1 as the lowest bit."""
    n = formula.universe_size
    return [Assignment.from_mask(n, m) for m in model_masks(formula, cap)]


def _projection_index(masks: np.ndarray, args: Sequence[int]) -> np.ndarray:
    """Tuple index (first argument most significant) of each mask's projection."""
    idx = np.zeros(masks.size, dtype=np.int64)
    for v in args:
        idx = (idx << 1) | ((masks >> (v - 1)) & 1)
    return idx


def constraint_model_masks(cf: ConstraintFormula, cap: int | None = None) -> np.ndarray:
    n = cf.universe_size
    _check_cap(n, cap)
    masks = np.arange(1 << n, dtype=np.int64)
    tables = {}
    for name, rel in cf.relations.items():
        table = np.zeros(1 << rel.arity, dtype=bool)
        for t in rel.tuples:
            table[int("".join(map(str, t)), 2)] = True
        tables[name] = table
    for name, args in cf.applications:
        if masks.size == 0:
            break
        masks = masks[tables[name][_projection_index(masks, args)]]
    return masks


def eval_constraint(cf: ConstraintFormula, a: Assignment) -> bool:
    _check_universe(cf.universe_size, a)
    for name, args in cf.applications:
        rel = cf.relations[name]
        if len(args) != rel.arity:
            raise ContractError(f"arity mismatch in {name}{args}")
        if tuple(int(v in a) for v in args) not in rel.tuples:
            return False
    return True


def _falsifies_only_nontuples(clause, args, rel) -> bool:
    """Whether every assignment to ``args`` falsifying ``clause`` is outside ``rel``."""
    forced = {abs(l): int(l < 0) for l in clause}
    free = sorted(set(args) - forced.keys())
    for bits in itertools.product((0, 1), repeat=len(free)):
        val = dict(forced)
        val.update(zip(free, bits))
        if tuple(val[v] for v in args) in rel.tuples:
            return False
    return True


def relation_clauses(rel: BooleanRelation, args: Sequence[int]) -> list[tuple[int, ...]]:
    """Clauses over ``args`` whose conjunction is exactly ``rel(args)``."""
    args = tuple(args)
    out: list[tuple[int, ...]] = []
    for t in itertools.product((0, 1), repeat=rel.arity):
        if t in rel.tuples:
            continue
        clause = _dedupe(-v if b else v for v, b in zip(args, t))
        if any(-l in clause for l in clause):
            continue  # repeated variable with clashing bits: not realisable
        for l in list(clause):
            shorter = tuple(x for x in clause if x != l)
            if _falsifies_only_nontuples(shorter, args, rel):
                clause = shorter
        out.append(clause)
    out = list(dict.fromkeys(out))
    sets = [frozenset(c) for c in out]
    return [c for i, c in enumerate(out)
            if not any(j != i and sets[j] < sets[i] for j in range(len(out)))]


def to_cnf(cf: ConstraintFormula) -> CnfFormula:
    clauses: list[tuple[int, ...]] = []
    for name, args in cf.applications:
        clauses.extend(relation_clauses(cf.relations[name], args))
    return CnfFormula(cf.universe_size, tuple(clauses))


def popcount(x: np.ndarray) -> np.ndarray:
    return np.bitwise_count(np.asarray(x, dtype=np.uint64)).astype(np.int64)
