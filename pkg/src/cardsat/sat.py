"""Decision oracle: a complete CDCL procedure plus polynomial fast paths.

The builtin solver is a small conflict-driven solver with two watched
literals, first-UIP learning and non-chronological backjumping.  It is
wrapped in an :class:`Oracle` so callers can swap in an external DIMACS
solver process instead.
"""

from __future__ import annotations

import os
import shlex
import subprocess
import tempfile
from dataclasses import dataclass
from typing import Iterable, Sequence

from .logic import Assignment, CnfFormula, ContractError

BACKEND_ENV = "CARDSAT_BACKEND"
SOLVER_CMD_ENV = "CARDSAT_SOLVER_CMD"


@dataclass(frozen=True)
class SatResult:
    satisfiable: bool
    witness: Assignment | None = None

    def __bool__(self):
        return self.satisfiable


@dataclass(frozen=True)
class CardinalityBound:
    direction: str  # "at-most" | "at-least"
    k: int
    scope: frozenset

    def __post_init__(self):
        if self.direction not in ("at-most", "at-least"):
            raise ContractError(f"unknown bound direction {self.direction!r}")
        if self.k < 0:
            raise ContractError("cardinality bound must be non-negative")
        object.__setattr__(self, "scope", frozenset(self.scope))
        if self.k > len(self.scope) + 1:
            raise ContractError("bound exceeds scope size + 1")

    @classmethod
    def at_most(cls, k, scope):
        return cls("at-most", k, frozenset(scope))

    @classmethod
    def at_least(cls, k, scope):
        return cls("at-least", k, frozenset(scope))


class _Cdcl:
    """One-shot CDCL search over clauses in DIMACS integer form."""

    def __init__(self, nvars: int, clauses: Iterable[Sequence[int]]):
        self.n = nvars
        self.assign = [0] * (nvars + 1)  # 1 true, -1 false, 0 unassigned
        self.level = [0] * (nvars + 1)
        self.reason: list = [None] * (nvars + 1)
        self.activity = [0.0] * (nvars + 1)
        self.bump = 1.0
        self.trail: list[int] = []
        self.trail_lim: list[int] = []
        self.qhead = 0
        self.watches: dict[int, list] = {}
        self.ok = True
        for c in clauses:
            c = list(dict.fromkeys(c))
            if any(-l in c for l in c):
                continue
            if not c:
                self.ok = False
            elif len(c) == 1:
                if not self._enqueue(c[0], None):
                    self.ok = False
            else:
                self._attach(c)

    def _attach(self, c):
        self.watches.setdefault(-c[0], []).append(c)
        self.watches.setdefault(-c[1], []).append(c)

    def _value(self, lit):
        v = self.assign[abs(lit)]
        return v if lit > 0 else -v

    def _enqueue(self, lit, reason):
        val = self._value(lit)
        if val:
            return val > 0
        v = abs(lit)
        self.assign[v] = 1 if lit > 0 else -1
        self.level[v] = len(self.trail_lim)
        self.reason[v] = reason
        self.trail.append(lit)
        return True

    def _propagate(self):
        """Returns a conflicting clause or None."""
        assign = self.assign
        while self.qhead < len(self.trail):
            lit = self.trail[self.qhead]
            self.qhead += 1
            # clauses watching -lit, keyed by the literal whose truth falsifies a watch
            ws = self.watches.get(lit)
            if not ws:
                continue
            false_lit = -lit
            i = 0
            kept = []
            while i < len(ws):
                c = ws[i]
                i += 1
                if c[0] == false_lit:
                    c[0], c[1] = c[1], c[0]
                first = c[0]
                fv = assign[abs(first)]
                if (fv if first > 0 else -fv) > 0:
                    kept.append(c)
                    continue
                for k in range(2, len(c)):
                    l = c[k]
                    lv = assign[abs(l)]
                    if (lv if l > 0 else -lv) >= 0:
                        c[1], c[k] = l, c[1]
                        self.watches.setdefault(-l, []).append(c)
                        break
                else:
                    kept.append(c)
                    if (fv if first > 0 else -fv) < 0:
                        kept.extend(ws[i:])
                        self.watches[lit] = kept
                        self.qhead = len(self.trail)
                        return c
                    self._enqueue(first, c)
            self.watches[lit] = kept
        return None

    def _analyze(self, confl):
        seen = set()
        learnt = [0]
        counter = 0
        p = None
        idx = len(self.trail) - 1
        cur = len(self.trail_lim)
        while True:
            for q in confl:
                if p is not None and q == p:
                    continue
                v = abs(q)
                if v in seen or self.level[v] == 0:
                    continue
                seen.add(v)
                self.activity[v] += self.bump
                if self.level[v] == cur:
                    counter += 1
                else:
                    learnt.append(q)
            while abs(self.trail[idx]) not in seen:
                idx -= 1
            p = self.trail[idx]
            idx -= 1
            confl = self.reason[abs(p)]
            seen.discard(abs(p))
            counter -= 1
            if counter == 0:
                break
        learnt[0] = -p
        self.bump *= 1.05
        if len(learnt) == 1:
            return learnt, 0
        best = max(range(1, len(learnt)), key=lambda j: self.level[abs(learnt[j])])
        learnt[1], learnt[best] = learnt[best], learnt[1]
        return learnt, self.level[abs(learnt[1])]

    def _cancel_until(self, lvl):
        if len(self.trail_lim) <= lvl:
            return
        stop = self.trail_lim[lvl]
        for lit in self.trail[stop:]:
            v = abs(lit)
            self.assign[v] = 0
            self.reason[v] = None
        del self.trail[stop:]
        del self.trail_lim[lvl:]
        self.qhead = min(self.qhead, stop)

    def _pick(self):
        best, best_act = 0, -1.0
        for v in range(1, self.n + 1):
            if self.assign[v] == 0 and self.activity[v] > best_act:
                best, best_act = v, self.activity[v]
        return best

    def solve(self, assumptions: Sequence[int] = ()):
        if not self.ok:
            return None
        if self._propagate() is not None:
            return None
        assumptions = list(assumptions)
        while True:
            confl = self._propagate()
            if confl is not None:
                if not self.trail_lim:
                    return None
                learnt, back = self._analyze(confl)
                self._cancel_until(back)
                if len(learnt) == 1:
                    self._enqueue(learnt[0], None)
                else:
                    self._attach(learnt)
                    self._enqueue(learnt[0], learnt)
                continue
            lvl = len(self.trail_lim)
            if lvl < len(assumptions):
                a = assumptions[lvl]
                val = self._value(a)
                if val < 0:
                    return None
                self.trail_lim.append(len(self.trail))
                if val == 0:
                    self._enqueue(a, None)
                continue
            v = self._pick()
            if v == 0:
                return [v for v in range(1, self.n + 1) if self.assign[v] > 0]
            self.trail_lim.append(len(self.trail))
            self._enqueue(-v, None)


class Oracle:
    """A satisfiability decision procedure with assumption support."""

    name = "abstract"

    def solve(self, formula: CnfFormula, assumptions: Sequence[int] = ()) -> SatResult:
        raise NotImplementedError


class BuiltinOracle(Oracle):
    name = "builtin"

    def solve(self, formula, assumptions=()):
        model = _Cdcl(formula.universe_size, formula.clauses).solve(assumptions)
        if model is None:
            return SatResult(False)
        return SatResult(True, Assignment(formula.universe_size, frozenset(model)))


class ExternalOracle(Oracle):
    """Runs ``cmd <file.cnf>`` and reads SAT-competition style output."""

    name = "external"

    def __init__(self, cmd: str | Sequence[str]):
        self.cmd = shlex.split(cmd) if isinstance(cmd, str) else list(cmd)

    def solve(self, formula, assumptions=()):
        from .formats import write_dimacs

        full = formula.extended(clauses=[(a,) for a in assumptions])
        with tempfile.NamedTemporaryFile("w", suffix=".cnf", delete=False) as fh:
            write_dimacs(full, fh)
            path = fh.name
        try:
            proc = subprocess.run(self.cmd + [path], capture_output=True, text=True)
        finally:
            os.unlink(path)
        status, values = None, []
        for line in proc.stdout.splitlines():
            parts = line.split()
            if not parts:
                continue
            if parts[0] == "s":
                status = " ".join(parts[1:]).upper()
            elif parts[0] == "v":
                values.extend(int(x) for x in parts[1:])
        if status is None:
            status = {10: "SATISFIABLE", 20: "UNSATISFIABLE"}.get(proc.returncode)
        if status == "UNSATISFIABLE":
            return SatResult(False)
        if status != "SATISFIABLE":
            raise RuntimeError(f"external solver gave no verdict: {proc.stderr.strip()}")
        true = frozenset(v for v in values if 0 < v <= formula.universe_size)
        return SatResult(True, Assignment(formula.universe_size, true))


class CountingOracle(Oracle):
    """Delegates to ``inner`` and counts the calls."""

    def __init__(self, inner: Oracle):
        self.inner = inner
        self.name = inner.name
        self.calls = 0

    def solve(self, formula, assumptions=()):
        self.calls += 1
        return self.inner.solve(formula, assumptions)


def get_oracle(name: str | None = None, cmd: str | None = None) -> Oracle:
    name = name or os.environ.get(BACKEND_ENV, "builtin")
    if name == "builtin":
        return BuiltinOracle()
    if name == "external":
        cmd = cmd or os.environ.get(SOLVER_CMD_ENV)
        if not cmd:
            raise ContractError(f"external backend needs a solver command ({SOLVER_CMD_ENV})")
        return ExternalOracle(cmd)
    raise ContractError(f"unknown backend {name!r}")


_default: Oracle | None = None


def default_oracle() -> Oracle:
    global _default
    if _default is None:
        _default = get_oracle()
    return _default


def set_default_oracle(oracle: Oracle | None):
    global _default
    _default = oracle


def _check_assumptions(formula, assumptions):
    for a in assumptions:
        if a == 0 or abs(a) > formula.universe_size:
            raise ContractError(f"assumption {a} outside universe")


def sat(formula: CnfFormula, assumptions: Sequence[int] = (),
        oracle: Oracle | None = None) -> SatResult:
    _check_assumptions(formula, assumptions)
    return (oracle or default_oracle()).solve(formula, tuple(assumptions))


def at_most_clauses(lits: Sequence[int], k: int, top: int):
    """Sequential-counter encoding of ``sum(lits) <= k``.

    Auxiliary variables are numbered from ``top + 1``.  Returns the clauses
    and the new highest variable id.
    """
    lits = list(lits)
    n = len(lits)
    if k >= n:
        return [], top
    if k == 0:
        return [(-l,) for l in lits], top
    # s[i][j]: at least j+1 of the first i+1 literals are true
    s = [[top + i * k + j + 1 for j in range(k)] for i in range(n - 1)]
    top += (n - 1) * k
    cl = [(-lits[0], s[0][0])]
    cl += [(-s[0][j],) for j in range(1, k)]
    for i in range(1, n - 1):
        cl.append((-lits[i], s[i][0]))
        cl.append((-s[i - 1][0], s[i][0]))
        for j in range(1, k):
            cl.append((-lits[i], -s[i - 1][j - 1], s[i][j]))
            cl.append((-s[i - 1][j], s[i][j]))
        cl.append((-lits[i], -s[i - 1][k - 1]))
    cl.append((-lits[n - 1], -s[n - 2][k - 1]))
    return cl, top


def bound_clauses(bound: CardinalityBound, top: int):
    scope = sorted(bound.scope)
    if bound.direction == "at-most":
        return at_most_clauses(scope, bound.k, top)
    if bound.k > len(scope):
        return [()], top
    return at_most_clauses([-v for v in scope], len(scope) - bound.k, top)


def sat_with_bound(formula: CnfFormula, bound: CardinalityBound,
                   assumptions: Sequence[int] = (), oracle: Oracle | None = None) -> SatResult:
    n = formula.universe_size
    if any(v < 1 or v > n for v in bound.scope):
        raise ContractError("bound scope leaves the universe")
    extra, top = bound_clauses(bound, n)
    res = sat(formula.extended(top, extra), assumptions, oracle)
    if not res.satisfiable:
        return res
    return SatResult(True, res.witness.restrict(n))


def _lit_index(l: int) -> int:
    return 2 * abs(l) + (l < 0)


def solve_2sat(formula: CnfFormula) -> SatResult:
    """Implication-graph SCC decision for Krom formulas (linear time)."""
    if not formula.is_krom:
        raise ContractError("solve_2sat needs a Krom formula")
    n = formula.universe_size
    size = 2 * n + 2
    adj: list[list[int]] = [[] for _ in range(size)]
    for c in formula.clauses:
        if not c:
            return SatResult(False)
        a, b = (c[0], c[0]) if len(c) == 1 else c
        adj[_lit_index(-a)].append(_lit_index(b))
        adj[_lit_index(-b)].append(_lit_index(a))

    # iterative Tarjan; components come out in reverse topological order
    index = [0] * size
    low = [0] * size
    on_stack = [False] * size
    comp = [-1] * size
    stack: list[int] = []
    counter = 1
    ncomp = 0
    for root in range(2, size):
        if index[root]:
            continue
        work = [(root, 0)]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            node, i = work[-1]
            if i < len(adj[node]):
                work[-1] = (node, i + 1)
                w = adj[node][i]
                if not index[w]:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, 0))
                elif on_stack[w]:
                    low[node] = min(low[node], index[w])
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[node])
            if low[node] == index[node]:
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp[w] = ncomp
                    if w == node:
                        break
                ncomp += 1
    true = set()
    for v in range(1, n + 1):
        p, q = comp[2 * v], comp[2 * v + 1]
        if p == q:
            return SatResult(False)
        # earlier Tarjan component = later in topological order
        if p < q:
            true.add(v)
    return SatResult(True, Assignment(n, frozenset(true)))


def horn_min_model(formula: CnfFormula) -> Assignment | None:
    """Least model of a Horn formula by forward chaining, or None."""
    if not formula.is_horn:
        raise ContractError("horn_min_model needs a Horn formula")
    n = formula.universe_size
    pending = []
    heads = []
    watch: list[list[int]] = [[] for _ in range(n + 1)]
    queue = []
    for i, c in enumerate(formula.clauses):
        if any(-l in c for l in c):
            pending.append(-1)
            heads.append(None)
            continue
        body = [-l for l in c if l < 0]
        head = next((l for l in c if l > 0), None)
        pending.append(len(body))
        heads.append(head)
        for v in body:
            watch[v].append(i)
        if not body:
            if head is None:
                return None
            queue.append(head)
    true = set()
    while queue:
        v = queue.pop()
        if v in true:
            continue
        true.add(v)
        for i in watch[v]:
            pending[i] -= 1
            if pending[i] == 0:
                if heads[i] is None:
                    return None
                queue.append(heads[i])
    return Assignment(n, frozenset(true))
