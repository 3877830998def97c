"""Command-line front end.

Exit codes: 0 answer true / success, 1 answer false, 2 usage or format
error, 3 refusal (an enumeration or size cap was hit).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

from . import formats as fmt
from . import reductions as red
from .abduction import relevance
from .clones import THETA2, classify_language
from .logic import Assignment, CnfFormula, ContractError, RefusalError, VariableOrder
from .optsat import (OptQuery, brute_force_card_max, brute_force_card_min, card_max_sat,
                     card_min_sat, lex_max_model, log_lex_max_sat)
from .revision import (RevisionInstance, dalal_implication, dalal_model_check,
                       dalal_revise, satoh_implication, satoh_model_check, satoh_revise)
from .sat import CountingOracle, get_oracle, set_default_oracle


class UsageError(Exception):
    pass


@dataclass
class RunReport:
    subcommand: str
    inputs: dict = field(default_factory=dict)  # path -> sha256
    payload: dict = field(default_factory=dict)
    oracle_calls: int = 0
    wall_time: float = 0.0
    seed: int | None = None

    def as_dict(self) -> dict:
        return {"subcommand": self.subcommand, "inputs": self.inputs, "payload": self.payload,
                "oracle_calls": self.oracle_calls, "wall_time": round(self.wall_time, 6),
                "seed": self.seed}


class _Run:
    """Per-invocation state: the report, the counting oracle and text output."""

    def __init__(self, args):
        self.args = args
        self.report = RunReport(args.command)
        self.lines: list[str] = []
        self.oracle = CountingOracle(get_oracle(args.backend, args.solver_cmd))

    def read(self, path: str) -> str:
        data = sys.stdin.buffer.read() if path == "-" else Path(path).read_bytes()
        self.report.inputs[path] = hashlib.sha256(data).hexdigest()
        return data.decode()

    def parse(self, reader, path: str):
        try:
            return reader(self.read(path))
        except fmt.FormatError as exc:
            raise fmt.FormatError(f"{path}: {exc}") from exc

    def say(self, line: str):
        self.lines.append(line)


def _witness(a: Assignment | None):
    return sorted(a.true_set) if a is not None else None


def _query(explicit, meta, what="--query"):
    if explicit is not None:
        return explicit
    if "query" in meta and len(meta["query"]) == 1:
        return meta["query"][0]
    raise UsageError(f"{what} is required (or a 'c query <v>' line in the input)")


# -- optimisation ---------------------------------------------------------------

def cmd_card(run: _Run, maximise: bool) -> bool:
    f, meta = run.parse(fmt.read_dimacs_with_meta, run.args.file)
    q = OptQuery(f, _query(run.args.query, meta))
    if run.args.mode == "brute":
        ans = (brute_force_card_max if maximise else brute_force_card_min)(q)
    else:
        ans = (card_max_sat if maximise else card_min_sat)(q, run.oracle)
    unsat = ans.optimum is None
    run.report.payload = {"answer": ans.answer, "optimum": ans.optimum,
                          "witness": _witness(ans.witness), "unsat": unsat}
    run.say("true" if ans.answer else "false")
    if unsat:
        run.say("note: unsat, the formula has no model")
    else:
        run.say(f"optimum: {ans.optimum}")
        if ans.witness is not None:
            run.say(f"witness: {ans.witness}")
    return ans.answer


def _log_bound(f: CnfFormula) -> int:
    size = max(2, f.universe_size + sum(len(c) for c in f.clauses))
    return math.ceil(math.log2(size))


def cmd_lexmax(run: _Run) -> bool:
    f, meta = run.parse(fmt.read_dimacs_with_meta, run.args.file)
    if run.args.order:
        try:
            order = [int(v) for v in run.args.order.split(",")]
        except ValueError as exc:
            raise UsageError("--order takes comma-separated variable ids") from exc
    elif "order" in meta:
        order = meta["order"]
    else:
        raise UsageError("--order is required (or a 'c order ...' line in the input)")
    order = VariableOrder(tuple(order))
    order.check_universe(f.universe_size)
    complete = len(order) == f.universe_size
    if not complete and len(order) > _log_bound(f):
        print(f"warning: prefix of length {len(order)} exceeds the logarithmic bound "
              f"{_log_bound(f)}; answering anyway", file=sys.stderr)
    res = log_lex_max_sat(f, order, run.oracle)
    if res is None:
        run.report.payload = {"answer": False, "vector": None, "model": None, "unsat": True}
        run.say("false")
        run.say("note: unsat, the formula has no model")
        return False
    bits, answer = res
    model = lex_max_model(f, order, run.oracle) if complete else None
    run.report.payload = {"answer": answer, "vector": list(bits),
                          "model": _witness(model), "unsat": False}
    run.say("true" if answer else "false")
    run.say("vector: " + "".join(map(str, bits)))
    if model is not None:
        run.say(f"model: {model}")
    return answer


# -- classification ---------------------------------------------------------------

def cmd_classify(run: _Run) -> bool:
    rels = run.parse(fmt.read_relations, run.args.file)
    if not rels:
        raise fmt.FormatError(f"{run.args.file}: no relations found")
    v = classify_language(rels)
    run.report.payload = {"verdict": v.kind, "label": v.label, "reason": v.reason,
                          "closure": v.report.as_dict(), "proof_case": v.proof_case,
                          "per_relation": {name: flags for name, flags in v.report.per_relation}}
    run.say(v.label)
    if run.args.explain:
        run.say(f"reason: {v.reason}")
        for name, flags in v.report.per_relation:
            run.say(f"  {name}: " + " ".join(f"{k}={int(b)}" for k, b in flags.items()))
        run.say("  language: " + " ".join(f"{k}={int(b)}" for k, b in v.report.as_dict().items()))
        if v.kind == THETA2:
            run.say(f"proof case: {v.proof_case}")
    return True


# -- reductions ---------------------------------------------------------------------

REDUCTIONS = {
    ("loglexmax", "cardmax"): "loglex",
    ("cardmax", "indset-k"): "indset",
    ("indset-k", "indset"): "drop",
    ("indset", "cardmax"): "graph",
    ("cardmax", "cardmin"): "negkrom",
    ("cardmin", "dalal"): "dalal",
    ("3sat", "satoh"): "satoh",
    ("cardmin", "abduction"): "abduction",
    ("or2", "r4p"): "r4p",
    ("or2", "s01"): "s01",
}


def _emit(run: _Run, text: str, suffix: str = ""):
    out = run.args.output
    if out is None:
        run.say(text.rstrip("\n"))
        return None
    path = Path(str(out) + suffix)
    path.write_text(text)
    return str(path)


def cmd_reduce(run: _Run) -> bool:
    a = run.args
    kind = REDUCTIONS.get((a.source, a.target))
    if kind is None:
        pairs = ", ".join(f"{s}->{t}" for s, t in REDUCTIONS)
        raise UsageError(f"no reduction {a.source}->{a.target}; available: {pairs}")
    payload: dict = {"from": a.source, "to": a.target}
    files = {}
    if kind in ("dalal", "satoh") and a.output is None:
        raise UsageError(f"{a.source}->{a.target} writes two formulas; give -o PREFIX")

    if kind == "loglex":
        f, meta = run.parse(fmt.read_dimacs_with_meta, a.file)
        if "order" not in meta:
            raise UsageError("the input needs a 'c order v1 v2 ...' line")
        out = red.reduce_loglex_to_cardmax(f, VariableOrder(tuple(meta["order"])))
        files["target"] = _emit(run, fmt.write_dimacs(out.target.formula, query=out.target.query_var))
    elif kind in ("indset", "negkrom", "dalal", "abduction"):
        f, meta = run.parse(fmt.read_dimacs_with_meta, a.file)
        q = OptQuery(f, _query(None, meta))
        if kind == "indset":
            out = red.reduce_cardmax3cnf_to_maxindset(q)
            t = out.target
            files["target"] = _emit(run, fmt.write_graph(t.graph, t.query_vertex, t.bound_k))
        elif kind == "negkrom":
            out = red.negkrom_cardmax_to_poskrom_cardmin(q)
            files["target"] = _emit(run, fmt.write_dimacs(out.target.formula, query=out.target.query_var))
        elif kind == "dalal":
            out = red.reduce_cardmin_to_dalal(q)
            d = out.target
            files["psi"] = _emit(run, fmt.write_dimacs(d.psi), ".psi.cnf")
            files["mu"] = _emit(run, fmt.write_dimacs(d.mu), ".mu.cnf")
            payload.update(m1=d.m1.bitstring(), m2=d.m2.bitstring(), query=d.y)
            run.say(f"M1: {d.m1.bitstring()}")
            run.say(f"M2: {d.m2.bitstring()}")
            run.say(f"query atom: {d.y}")
        else:
            out = red.reduce_cardmin_to_abduction(q)
            pap, h = out.target
            files["target"] = _emit(run, fmt.write_pap(pap, query=h))
    elif kind == "satoh":
        f = run.parse(fmt.read_dimacs, a.file)
        out = red.reduce_3sat_to_satoh_mc(f)
        s = out.target
        files["psi"] = _emit(run, fmt.write_dimacs(s.psi), ".psi.cnf")
        files["mu"] = _emit(run, fmt.write_dimacs(s.mu), ".mu.cnf")
        payload.update(model=s.model.bitstring(), query=s.d)
        run.say(f"M: {s.model.bitstring()}")
        run.say(f"query atom: {s.d}")
    elif kind in ("drop", "graph"):
        g, qv, k = run.parse(fmt.read_graph, a.file)
        if qv is None:
            raise UsageError("the graph needs a 'q <vertex>' line")
        inst = red.IndSetInstance(g, qv, k)
        if kind == "drop":
            if k is None:
                raise UsageError("the graph needs a 'k <bound>' line")
            t = red.drop_bound(inst)
            out = red.ReductionOutput(t, {v: v for v in range(1, g.vertex_count + 1)})
            files["target"] = _emit(run, fmt.write_graph(t.graph, t.query_vertex))
        else:
            if k is not None:
                raise UsageError("drop the bound first (indset-k -> indset)")
            q = red.graph_to_negative_krom(inst)
            out = red.ReductionOutput(q, {v: v for v in range(1, g.vertex_count + 1)})
            files["target"] = _emit(run, fmt.write_dimacs(q.formula, query=q.query_var))
    else:
        cf, meta = run.parse(fmt.read_constraint_formula_with_meta, a.file)
        qv = _query(None, meta)
        if kind == "r4p":
            out = red.reduce_or2_to_r4p(cf, qv)
        else:
            if a.relations is None:
                raise UsageError("or2->s01 needs --relations FILE defining S and R")
            rels = run.parse(fmt.read_relations, a.relations)
            if not {"S", "R"} <= set(rels):
                raise UsageError("--relations must define relations named S and R")
            out = red.s01_witness_reduction(cf, qv, rels["S"], rels["R"])
        tgt, tq = out.target
        files["target"] = _emit(run, fmt.write_constraint_formula(tgt, tq))
    if a.output is not None:
        files["map"] = _emit(run, fmt.write_correspondence(out.var_map), ".map")
    payload.update(note=out.note, files=files,
                   var_map={str(k): v for k, v in sorted(out.var_map.items())})
    run.report.payload = payload
    return True


# -- revision and abduction -------------------------------------------------------------

def _lift(f: CnfFormula, n: int, path: str) -> CnfFormula:
    if f.universe_size > n:
        raise UsageError(f"{path} uses {f.universe_size} variables, more than the shared {n}")
    return f.extended(universe_size=n)


def cmd_revise(run: _Run) -> bool:
    a = run.args
    psi = run.parse(fmt.read_dimacs, a.psi)
    mu = run.parse(fmt.read_dimacs, a.mu)
    n = a.shared_universe or max(psi.universe_size, mu.universe_size)
    inst = RevisionInstance(_lift(psi, n, a.psi), _lift(mu, n, a.mu))
    if a.op == "satoh" and a.mode == "oracle":
        raise UsageError("Satoh revision has no oracle mode; use --mode brute")
    payload: dict = {"op": a.op, "task": a.task}
    if a.task == "mc":
        if a.model is None:
            raise UsageError("--task mc needs --model <bitstring>")
        if len(a.model) != n or set(a.model) - {"0", "1"}:
            raise UsageError(f"--model must be a bit string of length {n} (x1 first)")
        m = Assignment.from_bits(a.model)
        if a.op == "dalal":
            answer = dalal_model_check(inst, m, a.mode, run.oracle)
        else:
            answer = satoh_model_check(inst, m)
    else:
        if a.query is None:
            raise UsageError("--task imp needs --query <var>")
        if a.op == "dalal":
            answer = dalal_implication(inst, a.query, a.mode, run.oracle)
        else:
            answer = satoh_implication(inst, a.query)
    if a.op == "dalal":
        if a.mode == "brute":
            payload["delta_min"] = dalal_revise(inst).delta_min
        else:
            from .revision import dalal_delta_min_oracle
            payload["delta_min"] = dalal_delta_min_oracle(inst, run.oracle)
        extra = f"delta_min: {payload['delta_min']}"
    else:
        diffs = sorted(sorted(d) for d in satoh_revise(inst).minimal_diffs)
        payload["minimal_diffs"] = diffs
        extra = "minimal_diffs: " + " ".join("{" + ",".join(f"x{v}" for v in d) + "}" for d in diffs)
    payload["answer"] = answer
    run.report.payload = payload
    run.say("true" if answer else "false")
    run.say(extra)
    return answer


def cmd_abduce(run: _Run) -> bool:
    a = run.args
    pap, meta = run.parse(fmt.read_pap_with_meta, a.file)
    h = _query(a.query, meta)
    ans = relevance(pap, h, a.preorder, a.mode, run.oracle)
    w = sorted(ans.witness_solution) if ans.witness_solution is not None else None
    run.report.payload = {"answer": ans.relevant, "preorder": a.preorder,
                          "min_size": ans.min_size, "witness_solution": w}
    run.say("true" if ans.relevant else "false")
    if ans.min_size is not None:
        run.say(f"{'minimum solution size' if a.preorder == 'card' else 'solution size'}: "
                f"{ans.min_size}")
    if w is not None:
        run.say("solution: {" + ",".join(f"x{v}" for v in w) + "}")
    elif ans.min_size is None and a.preorder == "card":
        run.say("note: the problem has no solution")
    return ans.relevant


# -- cross-checking -----------------------------------------------------------------------

def cmd_xcheck(run: _Run) -> bool:
    from .xcheck import SUITES, XcheckConfig, run_suite

    a = run.args
    conf: dict = {}
    if a.config:
        try:
            conf = json.loads(run.read(a.config))
        except json.JSONDecodeError as exc:
            raise fmt.FormatError(f"{a.config}: line {exc.lineno}: {exc.msg}") from exc
    seed = a.seed if a.seed is not None else conf.get("seed", 0)
    scale = a.scale if a.scale is not None else conf.get("scale", 1.0)
    names = a.suite or conf.get("suites") or list(SUITES)
    unknown = [s for s in names if s not in SUITES]
    if unknown:
        raise UsageError(f"unknown suite(s) {', '.join(unknown)}; known: {', '.join(SUITES)}")
    cfg = XcheckConfig(seed=int(seed), scale=float(scale))
    run.report.seed = cfg.seed
    results = []
    for name in names:
        r = run_suite(name, cfg)
        results.append(r)
        status = "ok" if r.ok else "FAIL"
        run.say(f"{name}: {r.passed}/{r.total} {status}")
        for fail in r.failures:
            run.say(f"  mismatch: {fail}")
    ok = all(r.ok for r in results)
    run.report.payload = {"ok": ok, "scale": cfg.scale,
                          "suites": [{k: v for k, v in r.as_dict().items() if k != "seconds"}
                                     for r in results]}
    return ok


# -- entry point ------------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="print a JSON run report")
    common.add_argument("--backend", choices=("builtin", "external"),
                        help="SAT backend (default: $CARDSAT_BACKEND or builtin)")
    common.add_argument("--solver-cmd", help="external solver command ($CARDSAT_SOLVER_CMD)")

    p = argparse.ArgumentParser(prog="cardsat", description=(
        "Cardinality-optimal satisfiability, belief revision, abduction and "
        "Krom constraint-language classification."))
    sub = p.add_subparsers(dest="command", required=True)

    for name, what in (("cardminsat", "minimal"), ("cardmaxsat", "maximal")):
        s = sub.add_parser(name, parents=[common],
                           help=f"is the query atom true in some cardinality-{what} model?")
        s.add_argument("file", help="DIMACS CNF file, or - for stdin")
        s.add_argument("--query", type=int)
        s.add_argument("--mode", choices=("oracle", "brute"), default="oracle")

    s = sub.add_parser("lexmaxsat", parents=[common],
                       help="is the last ordered variable true in the lexicographically maximal model?")
    s.add_argument("file")
    s.add_argument("--order", help="comma-separated variables, most significant first")

    s = sub.add_parser("classify", parents=[common], help="complexity verdict for a Krom language")
    s.add_argument("file", help="relation file")
    s.add_argument("--explain", action="store_true")

    s = sub.add_parser("reduce", parents=[common], help="apply a reduction gadget")
    s.add_argument("file")
    s.add_argument("--from", dest="source", required=True)
    s.add_argument("--to", dest="target", required=True)
    s.add_argument("-o", "--output", help="output path (a .map sidecar is written next to it)")
    s.add_argument("--relations", help="S and R for or2 -> s01")

    s = sub.add_parser("revise", parents=[common], help="Dalal or Satoh revision")
    s.add_argument("psi")
    s.add_argument("mu")
    s.add_argument("--op", choices=("dalal", "satoh"), required=True)
    s.add_argument("--task", choices=("mc", "imp"), required=True)
    s.add_argument("--shared-universe", type=int)
    s.add_argument("--model", help="bit string, x1 first (model checking)")
    s.add_argument("--query", type=int, help="atom (implication)")
    s.add_argument("--mode", choices=("brute", "oracle"), default="brute")

    s = sub.add_parser("abduce", parents=[common], help="relevance of a hypothesis")
    s.add_argument("file", help="PAP file")
    s.add_argument("--query", type=int)
    s.add_argument("--preorder", choices=("card", "subset", "any"), default="card")
    s.add_argument("--mode", choices=("oracle", "brute"), default="oracle")

    s = sub.add_parser("xcheck", parents=[common], help="run the cross-check suites")
    s.add_argument("--seed", type=int)
    s.add_argument("--scale", type=float, help="multiplier on random instance counts")
    s.add_argument("--suite", action="append", help="run only this suite (repeatable)")
    s.add_argument("--config", help="JSON file with seed, scale and suites")
    return p


COMMANDS = {
    "cardminsat": lambda run: cmd_card(run, False),
    "cardmaxsat": lambda run: cmd_card(run, True),
    "lexmaxsat": cmd_lexmax,
    "classify": cmd_classify,
    "reduce": cmd_reduce,
    "revise": cmd_revise,
    "abduce": cmd_abduce,
    "xcheck": cmd_xcheck,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    start = time.perf_counter()
    try:
        run = _Run(args)
        set_default_oracle(run.oracle)
        try:
            answer = COMMANDS[args.command](run)
        finally:
            set_default_oracle(None)
    except (fmt.FormatError, ContractError, UsageError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except RefusalError as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return 3
    run.report.oracle_calls = run.oracle.calls
    run.report.wall_time = time.perf_counter() - start
    if args.json:
        print(json.dumps(run.report.as_dict(), indent=2, sort_keys=True))
    else:
        print("\n".join(run.lines))
    return 0 if answer else 1
