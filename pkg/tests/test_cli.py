import json
import subprocess
import sys

import pytest

from cardsat.cli import main
from cardsat.formats import read_correspondence, read_dimacs, read_graph, read_pap

CHAIN = "p cnf 3 2\n1 2 0\n2 3 0\n"


@pytest.fixture
def put(tmp_path):
    def _put(name, text):
        p = tmp_path / name
        p.write_text(text)
        return str(p)
    return _put


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_cardminsat_true(put, capsys):
    code, out, _ = run(capsys, "cardminsat", put("f.cnf", CHAIN), "--query", "2")
    assert code == 0 and out.splitlines()[0] == "true"


def test_cardminsat_false_and_brute(put, capsys):
    f = put("f.cnf", CHAIN)
    assert run(capsys, "cardminsat", f, "--query", "1")[0] == 1
    assert run(capsys, "cardminsat", f, "--query", "1", "--mode", "brute")[0] == 1


def test_cardminsat_unsat(put, capsys):
    code, out, _ = run(capsys, "cardminsat", put("u.cnf", "p cnf 1 2\n1 0\n-1 0\n"), "--query", "1")
    assert code == 1 and out.startswith("false") and "unsat" in out


def test_query_from_comment(put, capsys):
    code, out, _ = run(capsys, "cardmaxsat", put("f.cnf", "c query 1\np cnf 2 1\n-1 -2 0\n"))
    assert code == 0 and "optimum: 1" in out


def test_missing_query_is_usage_error(put, capsys):
    code, _, err = run(capsys, "cardminsat", put("f.cnf", CHAIN))
    assert code == 2 and "--query" in err


def test_format_error_exit_and_line(put, capsys):
    code, _, err = run(capsys, "cardminsat", put("bad.cnf", "p cnf 2 1\n1 z 0\n"), "--query", "1")
    assert code == 2 and "line 2" in err


def test_missing_file(capsys):
    assert run(capsys, "cardminsat", "/nonexistent/f.cnf", "--query", "1")[0] == 2


def test_argparse_error(capsys):
    assert run(capsys, "cardminsat")[0] == 2
    assert run(capsys, "frobnicate")[0] == 2


def test_refusal_exit(put, capsys):
    text = "p cnf 23 0\n"
    code, _, err = run(capsys, "cardminsat", put("big.cnf", text), "--query", "1", "--mode", "brute")
    assert code == 3 and "refused" in err


def test_json_report(put, capsys):
    f = put("f.cnf", CHAIN)
    code, out, _ = run(capsys, "cardminsat", f, "--query", "2", "--json")
    rep = json.loads(out)
    assert code == 0 and rep["subcommand"] == "cardminsat"
    assert rep["payload"] == {"answer": True, "optimum": 1, "witness": [2], "unsat": False}
    assert len(rep["inputs"][f]) == 64
    assert rep["oracle_calls"] >= 1
    _, again, _ = run(capsys, "cardminsat", f, "--query", "2", "--json")
    assert json.loads(again)["payload"] == rep["payload"]


def test_lexmaxsat(put, capsys):
    f = put("f.cnf", "p cnf 3 1\n-1 2 0\n")
    code, out, _ = run(capsys, "lexmaxsat", f, "--order", "1,2")
    assert code == 0 and "vector: 11" in out
    code, out, _ = run(capsys, "lexmaxsat", f, "--order", "1,2,3")
    assert "model: {x1,x2,x3}" in out
    assert run(capsys, "lexmaxsat", f)[0] == 2
    assert run(capsys, "lexmaxsat", f, "--order", "1,a")[0] == 2


def test_lexmaxsat_long_prefix_warns(put, capsys):
    f = put("f.cnf", "p cnf 6 0\n")
    code, _, err = run(capsys, "lexmaxsat", f, "--order", "1,2,3,4")
    assert code == 0 and "warning" in err


def test_classify(put, capsys):
    code, out, _ = run(capsys, "classify", put("r.txt", "r 2 or2\n01\n10\n11\n"))
    assert code == 0 and out.strip() == "Theta2-complete"
    code, out, _ = run(capsys, "classify", put("r2.txt", "r 2 eq\n00\n11\nr 2 neq\n01\n10\n"),
                       "--explain")
    assert out.startswith("polynomial") and "eq:" in out and "width2affine=1" in out


def test_classify_explain_proof_case(put, capsys):
    _, out, _ = run(capsys, "classify", put("r.txt", "r 2 or2\n01\n10\n11\n"), "--explain")
    assert "proof case: S01" in out


def test_reduce_to_stdout(put, capsys):
    code, out, _ = run(capsys, "reduce", put("f.cnf", "c query 1\n" + CHAIN),
                       "--from", "cardmax", "--to", "indset-k")
    g, q, k = read_graph(out)
    assert code == 0 and k == 4 * 2 and g.vertex_count == 4 * 2 * 3 + 3 and q is not None


def test_reduce_writes_map(put, tmp_path, capsys):
    src = put("f.cnf", "c query 1\np cnf 2 1\n1 2 0\n")
    out = tmp_path / "pap.txt"
    assert run(capsys, "reduce", src, "--from", "cardmin", "--to", "abduction", "-o", str(out))[0] == 0
    assert read_pap(out.read_text()).manifestations == {3}
    assert read_correspondence((tmp_path / "pap.txt.map").read_text()) == {1: 1, 2: 2}


def test_reduce_dalal_needs_output(put, tmp_path, capsys):
    src = put("f.cnf", "c query 1\np cnf 2 1\n1 2 0\n")
    assert run(capsys, "reduce", src, "--from", "cardmin", "--to", "dalal")[0] == 2
    pre = tmp_path / "d"
    code, out, _ = run(capsys, "reduce", src, "--from", "cardmin", "--to", "dalal", "-o", str(pre))
    assert code == 0 and "M2: 111" in out
    psi = read_dimacs((tmp_path / "d.psi.cnf").read_text())
    assert psi.clauses == ((-1, -2), (3,))
    # the reduction's own output feeds revise
    code, out, _ = run(capsys, "revise", str(tmp_path / "d.psi.cnf"), str(tmp_path / "d.mu.cnf"),
                       "--op", "dalal", "--task", "mc", "--model", "010")
    assert code == 0


def test_reduce_unknown_pair(put, capsys):
    code, _, err = run(capsys, "reduce", put("f.cnf", CHAIN), "--from", "cardmin", "--to", "tsp")
    assert code == 2 and "available" in err


def test_reduce_s01(put, capsys):
    src = put("c.txt", "r 2 OR2\n01\n10\n11\nvars 2\nc query 1\nOR2 1 2\n")
    rels = put("sr.txt", "r 1 S\n1\nr 2 R\n01\n10\n11\n")
    code, out, _ = run(capsys, "reduce", src, "--from", "or2", "--to", "s01", "--relations", rels)
    assert code == 0 and "vars 4" in out
    assert run(capsys, "reduce", src, "--from", "or2", "--to", "s01")[0] == 2


REV_PSI = "p cnf 2 2\n1 0\n2 0\n"


def test_revise(put, capsys):
    psi, mu = put("psi.cnf", REV_PSI), put("mu.cnf", "p cnf 2 1\n-1 0\n")
    code, out, _ = run(capsys, "revise", psi, mu, "--op", "dalal", "--task", "mc", "--model", "01")
    assert code == 0 and "delta_min: 1" in out
    for mode in ("brute", "oracle"):
        assert run(capsys, "revise", psi, mu, "--op", "dalal", "--task", "imp", "--query", "1",
                   "--mode", mode)[0] == 1
    code, out, _ = run(capsys, "revise", psi, mu, "--op", "satoh", "--task", "imp", "--query", "2",
                       "--json")
    rep = json.loads(out)
    assert code == 0 and rep["payload"]["minimal_diffs"] == [[1]]


def test_revise_errors(put, capsys):
    psi, mu = put("psi.cnf", REV_PSI), put("mu.cnf", "p cnf 2 1\n-1 0\n")
    assert run(capsys, "revise", psi, mu, "--op", "dalal", "--task", "mc", "--model", "11")[0] == 2
    assert run(capsys, "revise", psi, mu, "--op", "dalal", "--task", "mc", "--model", "1")[0] == 2
    assert run(capsys, "revise", psi, mu, "--op", "dalal", "--task", "imp")[0] == 2
    assert run(capsys, "revise", psi, mu, "--op", "satoh", "--task", "imp", "--query", "1",
               "--mode", "oracle")[0] == 2
    assert run(capsys, "revise", psi, mu, "--op", "dalal", "--task", "imp", "--query", "1",
               "--shared-universe", "1")[0] == 2


def test_revise_shared_universe(put, capsys):
    psi, mu = put("psi.cnf", "p cnf 1 1\n1 0\n"), put("mu.cnf", "p cnf 2 1\n-1 0\n")
    code, out, _ = run(capsys, "revise", psi, mu, "--op", "dalal", "--task", "mc",
                       "--model", "000", "--shared-universe", "3")
    assert code == 0 and "delta_min: 1" in out


def test_abduce(put, capsys):
    pap = put("p.txt", "c query 1\nvars 3\nhyp 1 2\nman 3\n-1 3 0\n-2 3 0\n")
    code, out, _ = run(capsys, "abduce", pap)
    assert code == 0 and "minimum solution size: 1" in out
    assert run(capsys, "abduce", pap, "--mode", "brute", "--query", "2")[0] == 0
    empty = put("e.txt", "vars 2\nhyp\nman 2\n")
    code, out, _ = run(capsys, "abduce", empty, "--query", "1")
    assert code == 1 and "no solution" in out
    assert run(capsys, "abduce", pap, "--query", "7")[0] == 2


def test_xcheck_subset(capsys):
    code, out, _ = run(capsys, "xcheck", "--suite", "cardmin-to-dalal", "--scale", "0.1")
    assert code == 0 and out.startswith("cardmin-to-dalal:") and "ok" in out
    assert run(capsys, "xcheck", "--suite", "nope")[0] == 2


def test_xcheck_config(put, capsys):
    conf = put("c.json", json.dumps({"seed": 4, "scale": 0.1, "suites": ["horn-min-model"]}))
    code, out, _ = run(capsys, "xcheck", "--config", conf, "--json")
    rep = json.loads(out)
    assert code == 0 and rep["seed"] == 4 and rep["payload"]["suites"][0]["name"] == "horn-min-model"
    assert run(capsys, "xcheck", "--config", put("bad.json", "{"))[0] == 2


def test_module_entry_point(put):
    f = put("f.cnf", CHAIN)
    p = subprocess.run([sys.executable, "-m", "cardsat", "cardminsat", f, "--query", "2"],
                       capture_output=True, text=True)
    assert p.returncode == 0 and p.stdout.startswith("true")


def test_external_backend(put, capsys, monkeypatch):
    monkeypatch.setenv("CARDSAT_SOLVER_CMD", f"{sys.executable} -m cardsat.solve")
    code, out, _ = run(capsys, "cardminsat", put("f.cnf", CHAIN), "--query", "2",
                       "--backend", "external")
    assert code == 0 and out.startswith("true")
