"""Polymorphism tests and the complexity verdict for Krom constraint languages.

Closure properties are computed twice on purpose: :func:`closure_report`
iterates tuple pairs and triples with bit arithmetic, while
:func:`is_polymorphism` applies an explicit truth table coordinate-wise.
The test suite checks one against the other.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping

from .logic import (EQ, NEQ, ONE, ZERO, BooleanRelation, ConstraintFormula,
                    ContractError, to_cnf)


@dataclass(frozen=True)
class BooleanFunction:
    """Truth table indexed by the argument bits, first argument most significant."""

    arity: int
    table: tuple[int, ...]

    def __post_init__(self):
        if len(self.table) != 1 << self.arity:
            raise ContractError("truth table must list every input")

    @classmethod
    def from_callable(cls, arity: int, fn: Callable[..., int]) -> "BooleanFunction":
        return cls(arity, tuple(int(fn(*bits)) & 1
                                for bits in itertools.product((0, 1), repeat=arity)))

    def __call__(self, *bits):
        idx = 0
        for b in bits:
            idx = idx << 1 | b
        return self.table[idx]


AND = BooleanFunction.from_callable(2, lambda a, b: a & b)
OR = BooleanFunction.from_callable(2, lambda a, b: a | b)
XOR3 = BooleanFunction.from_callable(3, lambda a, b, c: a ^ b ^ c)
MAJORITY = BooleanFunction.from_callable(3, lambda a, b, c: int(a + b + c >= 2))


def projection(arity: int, i: int) -> BooleanFunction:
    """The function returning its ``i``-th argument (1-based)."""
    if not 1 <= i <= arity:
        raise ContractError("projection index outside arity")
    return BooleanFunction.from_callable(arity, lambda *bits: bits[i - 1])


def is_polymorphism(f: BooleanFunction, r: BooleanRelation) -> bool:
    for rows in itertools.product(r.tuples, repeat=f.arity):
        image = tuple(f(*col) for col in zip(*rows))
        if image not in r.tuples:
            return False
    return True


FLAGS = ("horn", "dual_horn", "affine", "krom", "width2affine", "zero_valid", "one_valid")


@dataclass(frozen=True)
class ClosureReport:
    horn: bool
    dual_horn: bool
    affine: bool
    krom: bool
    width2affine: bool
    zero_valid: bool
    one_valid: bool
    per_relation: tuple = ()

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in FLAGS}


def _relation_flags(r: BooleanRelation) -> dict:
    k = r.arity
    ints = {int("".join(map(str, t)), 2) for t in r.tuples}
    full = (1 << k) - 1
    horn = all(a & b in ints for a in ints for b in ints)
    dual = all(a | b in ints for a in ints for b in ints)
    affine = krom = True
    for a, b, c in itertools.product(ints, repeat=3):
        if affine and a ^ b ^ c not in ints:
            affine = False
        if krom and (a & b) | (a & c) | (b & c) not in ints:
            krom = False
        if not (affine or krom):
            break
    return {"horn": horn, "dual_horn": dual, "affine": affine, "krom": krom,
            "width2affine": affine and krom, "zero_valid": 0 in ints,
            "one_valid": full in ints}


def closure_report(rels: BooleanRelation | Mapping[str, BooleanRelation] | Iterable[BooleanRelation]) -> ClosureReport:
    if isinstance(rels, BooleanRelation):
        items = [("R", rels)]
    elif isinstance(rels, Mapping):
        items = list(rels.items())
    else:
        items = [(f"R{i + 1}", r) for i, r in enumerate(rels)]
    per = tuple((name, _relation_flags(r)) for name, r in items)
    agg = {f: all(flags[f] for _, flags in per) for f in FLAGS}
    return ClosureReport(**agg, per_relation=per)


def is_frozen(r: BooleanRelation, position: int) -> int | None:
    """The constant bit at 1-based ``position``, or None if it varies."""
    if r.is_empty:
        raise ContractError("frozen positions are undefined for the empty relation")
    if not 1 <= position <= r.arity:
        raise ContractError("position outside relation arity")
    bits = {t[position - 1] for t in r.tuples}
    return bits.pop() if len(bits) == 1 else None


def is_irredundant(r: BooleanRelation) -> bool:
    k = r.arity
    for i, j in itertools.combinations(range(k), 2):
        if all(t[i] == t[j] for t in r.tuples):
            return False
    for i in range(k):
        if all(t[:i] + (1 - t[i],) + t[i + 1:] in r.tuples for t in r.tuples):
            return False
    return True


def r4p() -> BooleanRelation:
    """(x1 or x2) and x1 != x3 and x2 != x4."""
    return BooleanRelation.from_predicate(
        4, lambda a, b, c, d: (a or b) and a != c and b != d)


POLYNOMIAL = "polynomial"
THETA2 = "theta2_complete"
OUTSIDE = "outside_scope"

VERDICT_LABELS = {POLYNOMIAL: "polynomial", THETA2: "Theta2-complete",
                  OUTSIDE: "outside scope (not Krom)"}


@dataclass(frozen=True)
class Verdict:
    kind: str
    reason: str
    report: ClosureReport
    proof_case: str | None = None

    @property
    def label(self) -> str:
        return VERDICT_LABELS[self.kind]


def _proof_case(rep: ClosureReport) -> str:
    if not rep.dual_horn:
        return "D2: frozen implementation of R4p, then OR2 <= R4p gadget"
    not_zero_valid = any(not f["zero_valid"] for _, f in rep.per_relation)
    if rep.one_valid and not_zero_valid:
        return "S01^2 technique: C1(t) = S(t,...,t) plus the M(w,x,y,t) gadget"
    return "S00^2/S02^2/S0^2: frozen implementation of OR2 (these three cases are not told apart)"


def classify_language(rels: Mapping[str, BooleanRelation] | Iterable[BooleanRelation]) -> Verdict:
    items = rels.values() if isinstance(rels, Mapping) else list(rels)
    if any(r.is_empty for r in items):
        raise ContractError("language contains an empty relation")
    rep = closure_report(rels)
    if not rep.krom:
        return Verdict(OUTSIDE, "not closed under majority: the language is not Krom", rep)
    if rep.width2affine:
        return Verdict(POLYNOMIAL, "closed under majority and x^y^z: width-2 affine", rep)
    if rep.horn:
        return Verdict(POLYNOMIAL, "closed under AND: Horn", rep)
    return Verdict(THETA2, "Krom, but neither width-2 affine nor Horn", rep,
                   _proof_case(rep))


# -- routing languages to the polynomial algorithms ---------------------------

def width2_definition(rel: BooleanRelation, guard: int = 6):
    """Unary/=/!= atoms over positions 1..k defining ``rel``, or None.

    Uses every such atom that holds on all tuples; if any definition exists,
    this strongest one is it.
    """
    k = rel.arity
    if k > guard:
        raise ContractError(f"definability search is limited to arity {guard}")
    if rel.is_empty:
        return [("unary", 1, 0), ("unary", 1, 1)]
    atoms = []
    ts = rel.tuples
    for i in range(k):
        bits = {t[i] for t in ts}
        if len(bits) == 1:
            atoms.append(("unary", i + 1, bits.pop()))
    for i, j in itertools.combinations(range(k), 2):
        if all(t[i] == t[j] for t in ts):
            atoms.append(("eq", i + 1, j + 1))
        elif all(t[i] != t[j] for t in ts):
            atoms.append(("neq", i + 1, j + 1))

    def holds(t):
        for a in atoms:
            if a[0] == "unary" and t[a[1] - 1] != a[2]:
                return False
            if a[0] == "eq" and t[a[1] - 1] != t[a[2] - 1]:
                return False
            if a[0] == "neq" and t[a[1] - 1] == t[a[2] - 1]:
                return False
        return True

    defined = {t for t in itertools.product((0, 1), repeat=k) if holds(t)}
    return atoms if defined == set(ts) else None


def compile_width2(cf: ConstraintFormula) -> ConstraintFormula:
    """Rewrite a width-2 affine formula into unary, EQ and NEQ applications."""
    table = {"ZERO": ZERO, "ONE": ONE, "EQ": EQ, "NEQ": NEQ}
    apps = []
    for name, args in cf.applications:
        atoms = width2_definition(cf.relations[name])
        if atoms is None:
            raise ContractError(f"relation {name} is not width-2 affine")
        for kind, *pos in atoms:
            if kind == "unary":
                apps.append(("ONE" if pos[1] else "ZERO", (args[pos[0] - 1],)))
            else:
                apps.append((kind.upper(), (args[pos[0] - 1], args[pos[1] - 1])))
    return ConstraintFormula(cf.universe_size, tuple(apps), table)


def gamma_card_min_sat(cf: ConstraintFormula, query_var: int, oracle=None):
    """CardMinSat for a Gamma-formula, routed by the language's verdict."""
    from .optsat import OptAnswer, OptQuery, card_min_sat, width2affine_card_min_sat
    from .sat import horn_min_model

    used = cf.used_relations()
    if not used or any(r.is_empty for r in used.values()):
        verdict = None
    else:
        verdict = classify_language(used)
    if verdict is not None and verdict.kind == POLYNOMIAL:
        if verdict.report.width2affine:
            return width2affine_card_min_sat(compile_width2(cf), query_var), "width2affine"
        m = horn_min_model(to_cnf(cf))
        if m is None:
            return OptAnswer(False), "horn"
        if query_var in m:
            return OptAnswer(True, m.cardinality, m), "horn"
        return OptAnswer(False, m.cardinality), "horn"
    return card_min_sat(OptQuery(to_cnf(cf), query_var), oracle), "binary-search"
