"""Readers and writers for the text formats used by the command line.

DIMACS CNF::

    c query 2            (optional; the query atom)
    p cnf 3 2
    1 2 0
    2 3 0

Relations and constraint formulas::

    r 2 or2              (arity, optional name; tuples follow as bit strings)
    01
    10
    11
    vars 3               (constraint formulas only)
    or2 1 2
    or2 2 3

Propositional abduction problems::

    vars 4
    hyp 1 2
    man 3 4
    -1 3 0
    -2 4 0

Graphs use the DIMACS edge format with optional ``q <vertex>`` and
``k <bound>`` lines.

Every reader raises :class:`FormatError` carrying the 1-based line number.
"""

from __future__ import annotations

import io
from typing import IO, Iterable

from .logic import BooleanRelation, CnfFormula, ConstraintFormula, ContractError, Graph


class FormatError(ValueError):
    def __init__(self, msg: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {msg}" if line is not None else msg)


def _lines(src: IO[str] | str | Iterable[str]):
    if isinstance(src, str):
        src = io.StringIO(src)
    for no, raw in enumerate(src, 1):
        yield no, raw.strip()


def _ints(tokens, no):
    try:
        return [int(t) for t in tokens]
    except ValueError as exc:
        raise FormatError(f"expected integers, got {' '.join(tokens)!r}", no) from exc


def _one_int(parts, no) -> int:
    if len(parts) != 2:
        raise FormatError(f"expected '{parts[0]} <integer>'", no)
    return _ints(parts[1:], no)[0]


def read_dimacs_with_meta(src) -> tuple[CnfFormula, dict]:
    header = None
    meta: dict = {}
    clauses: list[list[int]] = []
    cur: list[int] = []
    last = 0
    for no, line in _lines(src):
        last = no
        if not line or line.startswith("%"):
            continue
        if line.startswith("c"):
            parts = line.split()
            if len(parts) >= 3 and parts[1] in ("query", "order"):
                meta[parts[1]] = _ints(parts[2:], no)
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise FormatError("header must read 'p cnf <vars> <clauses>'", no)
            if header is not None:
                raise FormatError("duplicate header", no)
            header = tuple(_ints(parts[2:], no))
            continue
        if header is None:
            raise FormatError("clause before 'p cnf' header", no)
        for x in _ints(line.split(), no):
            if x == 0:
                clauses.append(cur)
                cur = []
            else:
                if abs(x) > header[0]:
                    raise FormatError(f"literal {x} exceeds declared {header[0]} variables", no)
                cur.append(x)
    if header is None:
        raise FormatError("missing 'p cnf' header", last or 1)
    if cur:
        raise FormatError("last clause is not terminated by 0", last)
    if len(clauses) != header[1]:
        raise FormatError(f"header declares {header[1]} clauses, found {len(clauses)}", last)
    return CnfFormula(header[0], tuple(tuple(c) for c in clauses)), meta


def read_dimacs(src) -> CnfFormula:
    return read_dimacs_with_meta(src)[0]


def write_dimacs(f: CnfFormula, out: IO[str] | None = None, query: int | None = None) -> str:
    lines = []
    if query is not None:
        lines.append(f"c query {query}")
    lines.append(f"p cnf {f.universe_size} {len(f.clauses)}")
    lines += [" ".join(map(str, c + (0,))) for c in f.clauses]
    text = "\n".join(lines) + "\n"
    if out is not None:
        out.write(text)
    return text


def _parse_relation_block(header, rows, no):
    parts = header.split()
    if len(parts) not in (2, 3) or not parts[1].isdigit():
        raise FormatError("relation header must read 'r <arity> [name]'", no)
    arity = int(parts[1])
    name = parts[2] if len(parts) == 3 else None
    tuples = []
    for rno, row in rows:
        if len(row) != arity or set(row) - {"0", "1"}:
            raise FormatError(f"tuple {row!r} is not a bit string of length {arity}", rno)
        tuples.append(tuple(int(c) for c in row))
    try:
        return name, BooleanRelation(arity, frozenset(tuples))
    except ContractError as exc:
        raise FormatError(str(exc), no) from exc


def read_relations(src) -> dict[str, BooleanRelation]:
    """A language: one or more ``r`` blocks.  Unnamed relations get R1, R2, ..."""
    rels, _, _ = _read_relational(src, allow_apps=False)
    return rels


def read_constraint_formula_with_meta(src) -> tuple[ConstraintFormula, dict]:
    meta: dict = {}
    rels, n, apps = _read_relational(src, allow_apps=True, meta=meta)
    if n is None:
        raise FormatError("missing 'vars <n>' line")
    try:
        return ConstraintFormula(n, tuple(apps), rels), meta
    except ContractError as exc:
        raise FormatError(str(exc)) from exc


def read_constraint_formula(src) -> ConstraintFormula:
    return read_constraint_formula_with_meta(src)[0]


def _comment_meta(line, no, meta):
    parts = line.split()
    if meta is not None and len(parts) >= 3 and parts[1] in ("query", "order"):
        meta[parts[1]] = _ints(parts[2:], no)


def _read_relational(src, allow_apps, meta=None):
    rels: dict[str, BooleanRelation] = {}
    block = None
    n = None
    apps = []

    def flush():
        if block is not None:
            name, rel = _parse_relation_block(block[0], block[2], block[1])
            name = name or f"R{len(rels) + 1}"
            if name in rels:
                raise FormatError(f"relation {name!r} defined twice", block[1])
            rels[name] = rel

    for no, line in _lines(src):
        if not line or line.startswith("c ") or line == "c":
            _comment_meta(line, no, meta)
            continue
        parts = line.split()
        if parts[0] == "r":
            flush()
            block = (line, no, [])
        elif parts[0] == "vars":
            if not allow_apps:
                raise FormatError("'vars' line in a relation file", no)
            flush()
            block = None
            n = _one_int(parts, no)
        elif n is not None:
            if parts[0] not in rels:
                raise FormatError(f"unknown relation {parts[0]!r}", no)
            args = tuple(_ints(parts[1:], no))
            if len(args) != rels[parts[0]].arity:
                raise FormatError(f"{parts[0]} expects {rels[parts[0]].arity} arguments", no)
            if any(v < 1 or v > n for v in args):
                raise FormatError(f"variable outside 1..{n}", no)
            apps.append((parts[0], args))
        elif block is not None:
            block[2].append((no, line))
        else:
            raise FormatError(f"unexpected line {line!r}", no)
    flush()
    return rels, n, apps


def write_relations(rels: dict[str, BooleanRelation]) -> str:
    out = []
    for name, rel in rels.items():
        out.append(f"r {rel.arity} {name}")
        out += ["".join(map(str, t)) for t in rel.sorted_tuples()]
    return "\n".join(out) + "\n"


def write_constraint_formula(cf: ConstraintFormula, query: int | None = None) -> str:
    text = write_relations(cf.relations)
    lines = [f"c query {query}"] if query is not None else []
    lines.append(f"vars {cf.universe_size}")
    lines += [" ".join([name, *map(str, args)]) for name, args in cf.applications]
    return text + "\n".join(lines) + "\n"


def read_pap(src):
    return read_pap_with_meta(src)[0]


def read_pap_with_meta(src):
    from .abduction import Pap

    n = None
    hyps: list[int] | None = None
    mans: list[int] | None = None
    clauses = []
    cur: list[int] = []
    meta: dict = {}
    for no, line in _lines(src):
        if not line or line.startswith("c"):
            _comment_meta(line, no, meta)
            continue
        parts = line.split()
        if parts[0] == "vars":
            n = _one_int(parts, no)
        elif parts[0] == "hyp":
            hyps = _ints(parts[1:], no)
        elif parts[0] == "man":
            mans = _ints(parts[1:], no)
        else:
            if n is None:
                raise FormatError("theory clause before 'vars' line", no)
            for x in _ints(parts, no):
                if x == 0:
                    clauses.append(tuple(cur))
                    cur = []
                elif abs(x) > n:
                    raise FormatError(f"literal {x} outside 1..{n}", no)
                else:
                    cur.append(x)
    if n is None or hyps is None or mans is None:
        raise FormatError("PAP needs 'vars', 'hyp' and 'man' lines")
    if cur:
        raise FormatError("unterminated theory clause")
    try:
        return Pap(n, frozenset(hyps), frozenset(mans), CnfFormula(n, tuple(clauses))), meta
    except ContractError as exc:
        raise FormatError(str(exc)) from exc


def write_pap(p, query: int | None = None) -> str:
    lines = [f"c query {query}"] if query is not None else []
    lines += [f"vars {p.universe_size}",
             "hyp " + " ".join(map(str, sorted(p.hypotheses))),
             "man " + " ".join(map(str, sorted(p.manifestations)))]
    lines += [" ".join(map(str, c + (0,))) for c in p.theory.clauses]
    return "\n".join(lines) + "\n"


def read_graph(src) -> tuple[Graph, int | None, int | None]:
    n = None
    edges = []
    query = bound = None
    for no, line in _lines(src):
        if not line or line.startswith("c"):
            continue
        parts = line.split()
        if parts[0] == "p":
            if len(parts) != 4 or parts[1] not in ("edge", "col"):
                raise FormatError("header must read 'p edge <vertices> <edges>'", no)
            n = _ints(parts[2:3], no)[0]
        elif parts[0] == "e":
            if n is None:
                raise FormatError("edge before header", no)
            if len(parts) != 3:
                raise FormatError("expected 'e <u> <v>'", no)
            u, v = _ints(parts[1:], no)
            if not (1 <= u <= n and 1 <= v <= n) or u == v:
                raise FormatError(f"bad edge {u} {v}", no)
            edges.append((u, v))
        elif parts[0] == "q":
            query = _one_int(parts, no)
        elif parts[0] == "k":
            bound = _one_int(parts, no)
        else:
            raise FormatError(f"unexpected line {line!r}", no)
    if n is None:
        raise FormatError("missing 'p edge' header")
    try:
        return Graph(n, frozenset(edges)), query, bound
    except ContractError as exc:
        raise FormatError(str(exc)) from exc


def write_graph(g: Graph, query: int | None = None, bound: int | None = None) -> str:
    lines = [f"p edge {g.vertex_count} {len(g.edges)}"]
    lines += [f"e {u} {v}" for u, v in sorted(g.edges)]
    if query is not None:
        lines.append(f"q {query}")
    if bound is not None:
        lines.append(f"k {bound}")
    return "\n".join(lines) + "\n"


def write_correspondence(mapping: dict[int, int]) -> str:
    return "".join(f"{s} {t}\n" for s, t in sorted(mapping.items()))


def read_correspondence(src) -> dict[int, int]:
    out = {}
    for no, line in _lines(src):
        if line:
            pair = _ints(line.split(), no)
            if len(pair) != 2:
                raise FormatError("expected '<source> <target>'", no)
            out[pair[0]] = pair[1]
    return out
