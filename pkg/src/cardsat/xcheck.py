"""Cross-check suites: fast solvers against brute force, and reduction preservation.

Every reduction suite decides the source and the target instance with
brute-force oracles only, so a solver bug cannot hide a gadget bug.  The
functions here back both the acceptance tests and the ``xcheck``
subcommand.
"""

from __future__ import annotations

import itertools
import math
import random
import time
from dataclasses import dataclass, field

import numpy as np

from . import abduction as abd
from . import reductions as red
from . import revision as rev
from .clones import (AND, MAJORITY, OR, OUTSIDE, POLYNOMIAL, THETA2, XOR3,
                     classify_language, closure_report, is_polymorphism, r4p)
from .generators import (SINGLETON_ONE, exhaustive_krom_corpus, random_3cnf, random_horn,
                         random_krom, random_model, random_negative_krom, random_or2,
                         random_positive_krom, random_relation, random_width2affine,
                         s01_branch_relations)
from .logic import (EQ, IMP, NEQ, OR2, Assignment, BooleanRelation, CnfFormula, Graph,
                    VariableOrder, all_models, evaluate, model_masks)
from .optsat import (OptQuery, brute_force_card_max, brute_force_card_min,
                     brute_force_constraint_card_min, brute_force_from_masks,
                     brute_force_log_lex_max, card_max_sat, card_min_sat,
                     width2affine_card_min_sat)
from .sat import horn_min_model

MAX_FAILURES_KEPT = 5


@dataclass
class SuiteResult:
    name: str
    criterion: int
    passed: int = 0
    total: int = 0
    failures: list = field(default_factory=list)
    seconds: float = 0.0
    notes: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.total > 0 and self.passed == self.total

    def check(self, cond: bool, what=None):
        self.total += 1
        if cond:
            self.passed += 1
        elif len(self.failures) < MAX_FAILURES_KEPT:
            self.failures.append(str(what))

    def tally(self, answer: bool):
        """Count source answers, so a one-sided corpus is visible in the report."""
        counts = self.notes.setdefault("answers", {"true": 0, "false": 0})
        counts["true" if answer else "false"] += 1

    def as_dict(self) -> dict:
        return {"name": self.name, "criterion": self.criterion, "passed": self.passed,
                "total": self.total, "ok": self.ok, "failures": self.failures,
                "seconds": round(self.seconds, 3), "notes": self.notes}


@dataclass(frozen=True)
class XcheckConfig:
    seed: int = 0
    scale: float = 1.0  # multiplies every random instance count

    def count(self, base: int) -> int:
        return max(1, round(base * self.scale))

    def rng(self, suite: str) -> random.Random:
        return random.Random(f"{self.seed}:{suite}")


def call_budget(n: int) -> int:
    return math.ceil(math.log2(n + 1)) + 1


# -- criterion 1 ----------------------------------------------------------------

def _compare_opt(res: SuiteResult, q: OptQuery):
    for fast, slow in ((card_min_sat, brute_force_card_min), (card_max_sat, brute_force_card_max)):
        a = fast(q)
        res.check(a.key() == slow(q).key(), (fast.__name__, q.formula.clauses, q.query_var))
        res.check(a.bounded_calls <= call_budget(q.formula.universe_size),
                  ("call budget", fast.__name__, a.bounded_calls, q.formula.universe_size))


def suite_optsat_exhaustive(cfg: XcheckConfig) -> SuiteResult:
    res = SuiteResult("optsat-exhaustive", 1)
    sizes = {}
    for n in range(1, 6):
        corpus = exhaustive_krom_corpus(n, 6)
        sizes[n] = len(corpus)
        for f in corpus:
            for v in range(1, n + 1):
                _compare_opt(res, OptQuery(f, v))
    res.notes["formulas_per_n"] = sizes
    return res


def suite_optsat_random(cfg: XcheckConfig) -> SuiteResult:
    res = SuiteResult("optsat-random", 1)
    rng = cfg.rng(res.name)
    for _ in range(cfg.count(500)):
        n = rng.randint(1, 16)
        _compare_opt(res, OptQuery(random_krom(rng, n), rng.randint(1, n)))
    return res


# -- criterion 2 ----------------------------------------------------------------

def suite_horn(cfg: XcheckConfig) -> SuiteResult:
    res = SuiteResult("horn-min-model", 2)
    rng = cfg.rng(res.name)
    for _ in range(cfg.count(500)):
        n = rng.randint(1, 12)
        f = random_horn(rng, n)
        masks = model_masks(f).tolist()
        minimal = [m for m in masks if not any(o != m and o & m == o for o in masks)]
        got = horn_min_model(f)
        if not masks:
            res.check(got is None, f.clauses)
        else:
            res.check(len(minimal) == 1 and got is not None and got.mask == minimal[0], f.clauses)
    return res


def suite_width2affine(cfg: XcheckConfig) -> SuiteResult:
    res = SuiteResult("width2affine", 2)
    rng = cfg.rng(res.name)
    for _ in range(cfg.count(500)):
        n = rng.randint(1, 12)
        cf = random_width2affine(rng, n)
        v = rng.randint(1, n)
        res.check(width2affine_card_min_sat(cf, v).key()
                  == brute_force_constraint_card_min(cf, v).key(), (cf.applications, v))
    return res


# -- criterion 3: one suite per reduction -----------------------------------------

def suite_loglex(cfg: XcheckConfig) -> SuiteResult:
    res = SuiteResult("loglex-to-cardmax", 3)
    rng = cfg.rng(res.name)
    for _ in range(cfg.count(200)):
        n = rng.randint(1, 5)
        f = random_krom(rng, n) if rng.random() < 0.5 else random_3cnf(rng, n)
        prefix = VariableOrder(tuple(rng.sample(range(1, n + 1), rng.randint(1, min(n, 4)))))
        src = brute_force_log_lex_max(f, prefix)
        res.tally(src is not None and src[1])
        tgt = brute_force_card_max(red.reduce_loglex_to_cardmax(f, prefix).target)
        res.check((src is not None and src[1]) == tgt.answer, (f.clauses, prefix.ordered_prefix))
    return res


def _balanced(draw, count: int, tries: int = 50):
    """Instances from ``draw()`` with about half true and half false answers.

    Rejects draws whose answer quota is full; gives up on balance after
    ``tries * count`` draws so a skewed generator cannot hang the suite.
    """
    quota = {True: (count + 1) // 2, False: count // 2}
    out = []
    for _ in range(tries * count):
        if len(out) == count:
            break
        inst, answer = draw()
        if quota[answer] > 0:
            quota[answer] -= 1
            out.append((inst, answer))
    while len(out) < count:
        out.append(draw())
    return out


def _mentions(f: CnfFormula, v: int) -> bool:
    return any(abs(l) == v for c in f.clauses for l in c)


def suite_indset(cfg: XcheckConfig) -> SuiteResult:
    res = SuiteResult("cardmax-to-indset", 3)
    rng = cfg.rng(res.name)

    def draw():
        while True:
            n, m = rng.randint(1, 4), rng.randint(1, 3)
            f = CnfFormula(n, random_3cnf(rng, n).clauses[:m])
            v = rng.randint(1, n)
            if _mentions(f, v):
                q = OptQuery(f, v)
                return q, brute_force_card_max(q).answer

    for q, a in _balanced(draw, cfg.count(200)):
        f, v = q.formula, q.query_var
        inst = red.reduce_cardmax3cnf_to_maxindset(q).target
        res.tally(a)
        res.check(a == red.brute_force_indset(inst), (f.clauses, v))
        alpha = red.max_independent_set_size(inst.graph)
        if model_masks(f).size:
            res.check(alpha >= inst.bound_k, ("alpha < K", f.clauses))
        s = red.maximum_independent_set(inst.graph)
        t = red.normalise_copies(q, inst, s)
        res.check(red.is_independent(inst.graph, t) and len(t) == len(s) == alpha,
                  ("normalisation", f.clauses))
    return res


def _all_graphs(max_vertices: int):
    for nv in range(1, max_vertices + 1):
        pairs = list(itertools.combinations(range(1, nv + 1), 2))
        for mask in range(1 << len(pairs)):
            yield Graph(nv, frozenset(p for i, p in enumerate(pairs) if mask >> i & 1))


def suite_drop_bound(cfg: XcheckConfig) -> SuiteResult:
    res = SuiteResult("drop-bound", 3)
    for g in _all_graphs(5):
        for v in range(1, g.vertex_count + 1):
            for k in range(1, 5):
                inst = red.IndSetInstance(g, v, k)
                a = red.brute_force_indset(inst)
                res.tally(a)
                res.check(a == red.brute_force_indset(red.drop_bound(inst)),
                          (sorted(g.edges), v, k))
    return res


def suite_graph_negkrom(cfg: XcheckConfig) -> SuiteResult:
    res = SuiteResult("graph-to-negative-krom", 3)
    for g in _all_graphs(6):
        f = red.graph_to_negative_krom(red.IndSetInstance(g, 1)).formula
        masks = model_masks(f)
        for v in range(1, g.vertex_count + 1):
            ans = brute_force_from_masks(masks, g.vertex_count, v, False).answer
            res.tally(ans)
            res.check(ans == red.brute_force_indset(red.IndSetInstance(g, v)), (sorted(g.edges), v))
    return res


def suite_negkrom_poskrom(cfg: XcheckConfig) -> SuiteResult:
    res = SuiteResult("negkrom-to-poskrom", 3)
    rng = cfg.rng(res.name)

    def draw():
        n = rng.randint(1, 8)
        q = OptQuery(random_negative_krom(rng, n, rng.choice((0.2, 0.4, 0.6))), rng.randint(1, n))
        return q, brute_force_card_max(q).answer

    for q, a in _balanced(draw, cfg.count(300)):
        f, n = q.formula, q.formula.universe_size
        out = red.negkrom_cardmax_to_poskrom_cardmin(q).target
        hat = out.formula
        res.check(hat.is_positive and hat.is_krom, ("not positive Krom", f.clauses))
        res.tally(a)
        res.check(a == brute_force_card_min(out, cap=3 * n).answer, (f.clauses, q.query_var))
        hat_masks = model_masks(hat, cap=3 * n)
        opt = int(np.bitwise_count(hat_masks).min())
        taus = {red.tau(Assignment.from_mask(n, a)).mask for a in range(1 << n)}
        minimal = hat_masks[np.bitwise_count(hat_masks) == opt].tolist()
        res.check(all(m in taus for m in minimal), ("minimal models are tau images", f.clauses))
        for a in range(1 << n):
            i = Assignment.from_mask(n, a)
            t = red.tau(i)
            res.check(evaluate(f, i) == evaluate(hat, t), ("tau preserves satisfaction", f.clauses, a))
            res.check(t.cardinality == 2 * n - i.cardinality, ("tau cardinality", a))
    return res


def _dalal_sides(q: OptQuery):
    d = red.reduce_cardmin_to_dalal(q).target
    return d, rev.RevisionInstance(d.psi, d.mu)


def suite_dalal(cfg: XcheckConfig) -> SuiteResult:
    res = SuiteResult("cardmin-to-dalal", 3)
    rng = cfg.rng(res.name)
    for _ in range(cfg.count(200)):
        n = rng.randint(1, 6)
        q = OptQuery(random_positive_krom(rng, n), rng.randint(1, n))
        d, inst = _dalal_sides(q)
        mu_models = {a.mask for a in all_models(d.mu)}
        res.check(mu_models == {d.m1.mask, d.m2.mask}, ("mu models", q.formula.clauses))
        a = brute_force_card_min(q).answer
        res.tally(a)
        b = rev.dalal_model_check(inst, d.m1)
        c = not rev.dalal_implication(inst, d.y)
        res.check(a == b == c, (q.formula.clauses, q.query_var, a, b, c))
    return res


def suite_satoh(cfg: XcheckConfig) -> SuiteResult:
    res = SuiteResult("3sat-to-satoh", 3)
    rng = cfg.rng(res.name)

    def draw():
        n = rng.randint(1, 3)
        if rng.random() < 0.5:
            f = CnfFormula(n, tuple(random_3cnf(rng, n, 3.0).clauses[:rng.randint(1, 3)]))
        else:
            # narrow clauses make unsatisfiable inputs common; they are padded to width 3
            f = CnfFormula(n, tuple(tuple(rng.choice((v, -v)) for v in
                                          (rng.randint(1, n) for _ in range(rng.randint(1, 2))))
                                    for _ in range(rng.randint(1, 5))))
        return f, bool(model_masks(f).size)

    for f, a in _balanced(draw, cfg.count(200)):
        s = red.reduce_3sat_to_satoh_mc(f).target
        inst = rev.RevisionInstance(s.psi, s.mu)
        res.check(evaluate(s.mu, s.model), ("M not a model of mu", f.clauses))
        res.tally(a)
        b = rev.satoh_model_check(inst, s.model)
        c = not rev.satoh_implication(inst, s.d)
        res.check(a == b == c, (f.clauses, a, b, c))
    return res


def suite_abduction(cfg: XcheckConfig) -> SuiteResult:
    res = SuiteResult("cardmin-to-abduction", 3)
    rng = cfg.rng(res.name)
    for _ in range(cfg.count(200)):
        n = rng.randint(1, 6)
        f = random_positive_krom(rng, n)
        q = OptQuery(f, rng.randint(1, n))
        pap, h = red.reduce_cardmin_to_abduction(q).target
        sols = {frozenset(s) for s in abd.brute_force_solutions(pap)}
        models = {a.true_set for a in all_models(f)}
        res.check(sols == models, ("solutions differ from models", f.clauses))
        a = brute_force_card_min(q).answer
        res.tally(a)
        res.check(a == abd.brute_force_relevance(pap, h).relevant, (f.clauses, q.query_var))
    return res


def suite_r4p(cfg: XcheckConfig) -> SuiteResult:
    res = SuiteResult("or2-to-r4p", 3)
    rng = cfg.rng(res.name)
    for _ in range(cfg.count(200)):
        n = rng.randint(1, 5)
        cf = random_or2(rng, n)
        v = rng.randint(1, n)
        tgt, qv = red.reduce_or2_to_r4p(cf, v).target
        a = brute_force_constraint_card_min(cf, v).answer
        res.tally(a)
        res.check(a == brute_force_constraint_card_min(tgt, qv).answer, (cf.applications, v))
    return res


def s01_pairs() -> dict:
    """Hand-picked (S, R) per branch: OR2 and the first arity-3 relation hitting 1001."""
    present = s01_branch_relations(3)["1001-present"]
    return {"1001-absent": (SINGLETON_ONE, OR2), "1001-present": (SINGLETON_ONE, present[0])}


def suite_s01(cfg: XcheckConfig) -> SuiteResult:
    res = SuiteResult("s01-gadget", 3)
    rng = cfg.rng(res.name)
    for branch, (S, R) in s01_pairs().items():
        seen = 0
        for _ in range(cfg.count(200)):
            n = rng.randint(1, 4)
            # the second branch needs n+1 copies per clause; keep within the cap
            cf = random_or2(rng, n, rng.randint(0, 3 if branch == "1001-present" else n + 1))
            v = rng.randint(1, n)
            out = red.s01_witness_reduction(cf, v, S, R)
            tgt, qv = out.target
            res.check(branch in out.note, ("wrong branch", branch))
            a = brute_force_constraint_card_min(cf, v).answer
            res.tally(a)
            res.check(a == brute_force_constraint_card_min(tgt, qv).answer,
                      (branch, cf.applications, v))
            seen += 1
        res.notes[branch] = seen
    return res


# -- criterion 4 --------------------------------------------------------------------

def suite_horn_krom(cfg: XcheckConfig) -> SuiteResult:
    res = SuiteResult("horn-and-krom-outputs", 4)
    rng = cfg.rng(res.name)
    for _ in range(cfg.count(200)):
        n = rng.randint(1, 8)
        d = red.reduce_cardmin_to_dalal(OptQuery(random_positive_krom(rng, n), rng.randint(1, n))).target
        s = red.reduce_3sat_to_satoh_mc(random_3cnf(rng, n)).target
        for f in (d.psi, d.mu, s.psi, s.mu):
            res.check(f.is_horn and f.is_krom, f.clauses)
    return res


# -- criterion 5 --------------------------------------------------------------------

def _revision_triple(rng, gen, n):
    while True:
        psi, mu = gen(rng, n), gen(rng, n)
        i, m = random_model(rng, psi), random_model(rng, mu)
        if i is not None and m is not None:
            return rev.RevisionInstance(psi, mu), i, m


def suite_satoh_poly(cfg: XcheckConfig) -> SuiteResult:
    res = SuiteResult("satoh-minimality-poly", 5)
    rng = cfg.rng(res.name)
    verdicts = {"krom": [0, 0], "horn": [0, 0]}
    for kind, gen in (("krom", random_krom), ("horn", random_horn)):
        for _ in range(cfg.count(500)):
            inst, i, m = _revision_triple(rng, gen, rng.randint(1, 10))
            fast = rev.satoh_minimality_check_poly(inst, i, m)
            verdicts[kind][fast] += 1
            res.check(fast == rev.brute_force_satoh_minimal(inst, i, m),
                      (kind, inst.psi.clauses, inst.mu.clauses, i, m))
    res.notes["false/true per class"] = verdicts
    return res


# -- criterion 6 --------------------------------------------------------------------

OR3 = BooleanRelation.from_predicate(3, lambda a, b, c: a or b or c)


def relation_corpus(rng: random.Random, random_arity4: int = 300) -> list[BooleanRelation]:
    """All non-empty relations of arity <= 3, plus random arity-4 relations."""
    out = []
    for k in range(1, 4):
        space = list(itertools.product((0, 1), repeat=k))
        for mask in range(1, 1 << len(space)):
            out.append(BooleanRelation(k, frozenset(t for i, t in enumerate(space) if mask >> i & 1)))
    out += [random_relation(rng, 4) for _ in range(random_arity4)]
    out.append(r4p())
    return out


def suite_classifier(cfg: XcheckConfig) -> SuiteResult:
    res = SuiteResult("classifier", 6)
    expected = [({"EQ": EQ, "NEQ": NEQ}, POLYNOMIAL), ({"IMP": IMP}, POLYNOMIAL),
                ({"OR2": OR2}, THETA2), ({"R4p": r4p()}, THETA2), ({"OR3": OR3}, OUTSIDE)]
    for lang, kind in expected:
        got = classify_language(lang).kind
        res.check(got == kind, (sorted(lang), got, kind))
    funcs = {"horn": AND, "dual_horn": OR, "affine": XOR3, "krom": MAJORITY}
    for r in relation_corpus(cfg.rng(res.name), cfg.count(300)):
        rep = closure_report(r)
        for flag, fn in funcs.items():
            res.check(getattr(rep, flag) == is_polymorphism(fn, r), (flag, r.sorted_tuples()))
        res.check(rep.width2affine == (is_polymorphism(XOR3, r) and is_polymorphism(MAJORITY, r)),
                  ("width2affine", r.sorted_tuples()))
    return res


# -- criterion 7 --------------------------------------------------------------------

def suite_end_to_end_chain(cfg: XcheckConfig) -> SuiteResult:
    res = SuiteResult("end-to-end-chain", 7)
    rng = cfg.rng(res.name)
    for _ in range(cfg.count(100)):
        n = rng.randint(1, 6)
        q = OptQuery(random_positive_krom(rng, n), rng.randint(1, n))
        d, inst = _dalal_sides(q)
        pap, h = red.reduce_cardmin_to_abduction(q).target
        chain = (card_min_sat(q).answer,
                 rev.dalal_model_check(inst, d.m1, mode="oracle"),
                 not rev.dalal_implication(inst, d.y, mode="oracle"),
                 abd.leq_relevance(pap, h, mode="oracle").relevant,
                 brute_force_card_min(q).answer,
                 rev.dalal_model_check(inst, d.m1),
                 abd.brute_force_relevance(pap, h).relevant)
        res.check(len(set(chain)) == 1, (q.formula.clauses, q.query_var, chain))
    return res


SUITES = {
    "optsat-exhaustive": suite_optsat_exhaustive,
    "optsat-random": suite_optsat_random,
    "horn-min-model": suite_horn,
    "width2affine": suite_width2affine,
    "loglex-to-cardmax": suite_loglex,
    "cardmax-to-indset": suite_indset,
    "drop-bound": suite_drop_bound,
    "graph-to-negative-krom": suite_graph_negkrom,
    "negkrom-to-poskrom": suite_negkrom_poskrom,
    "cardmin-to-dalal": suite_dalal,
    "3sat-to-satoh": suite_satoh,
    "cardmin-to-abduction": suite_abduction,
    "or2-to-r4p": suite_r4p,
    "s01-gadget": suite_s01,
    "horn-and-krom-outputs": suite_horn_krom,
    "satoh-minimality-poly": suite_satoh_poly,
    "classifier": suite_classifier,
    "end-to-end-chain": suite_end_to_end_chain,
}


def run_suite(name: str, cfg: XcheckConfig) -> SuiteResult:
    t = time.perf_counter()
    res = SUITES[name](cfg)
    res.seconds = time.perf_counter() - t
    return res


def run(cfg: XcheckConfig | None = None, names=None) -> list[SuiteResult]:
    cfg = cfg or XcheckConfig()
    return [run_suite(name, cfg) for name in (names or SUITES)]
