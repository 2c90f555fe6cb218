import io
import json
import subprocess
import sys

import pytest

from oracles import all_words, balanced
from qautomata import catalog
from qautomata.cli import DEMO_GOLDEN, DEMOS, evaluator, main
from qautomata.io import loads, save
from qautomata.qfa import embed_dfa


def f(obj, w):
    return evaluator(obj)[0](w)


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main([str(a) for a in argv], out, err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture
def files(tmp_path):
    paths = {}
    for name, obj in {
        "dfa": catalog.bb_forbidden_dfa(),
        "parity": catalog.parity_dfa(),
        "meas": catalog.measurement_qfa(),
        "dyck": catalog.dyck_grammar(),
        "leq": catalog.build_leq_qpda(),
        "g1": catalog.equal_ab_then_c(),
        "g2": catalog.equal_bc_after_a(),
        "g3": catalog.equal_ac_around_b(),
    }.items():
        paths[name] = tmp_path / f"{name}.json"
        save(obj, paths[name])
    return paths


def test_prob(files):
    assert run("prob", files["meas"], "aaa") == (0, "0.750000000000\n", "")
    assert run("prob", files["dfa"], "abb")[1] == "0.000000000000\n"
    assert run("prob", files["dyck"], "aabb")[1] == "1.000000000000\n"
    assert run("prob", files["leq"], "abba")[1] == "1.000000000000\n"
    assert run("prob", files["leq"])[1] == "1.000000000000\n"


def test_prob_separator(tmp_path):
    from qautomata.grammar import QuantumGrammar

    g = QuantumGrammar.from_rules([("S", ["ab", "cd"], 0.5)], "S", terminals=("ab", "cd"))
    path = tmp_path / "g.json"
    save(g, path)
    assert run("prob", path, "ab cd", "--sep", " ")[1] == "0.250000000000\n"


def test_prob_errors(files, tmp_path):
    code, out, err = run("prob", files["meas"], "b")
    assert code == 1 and out == "" and err.startswith("qautomata: error:") and err.count("\n") == 1
    bad = tmp_path / "bad.json"
    bad.write_text('{"type": "qfa"}')
    code, _, err = run("prob", bad, "a")
    assert code == 1 and "alphabet" in err
    assert run("prob", tmp_path / "missing.json", "a")[0] == 1
    assert run("nonsense")[0] == 2
    assert run("prob")[0] == 2


def test_coeffs(files):
    code, out, _ = run("coeffs", files["dyck"], "--max-len", 6)
    assert code == 0
    assert [line.split("\t") for line in out.splitlines()] == [
        ["0", "1"], ["1", "0"], ["2", "1"], ["3", "0"], ["4", "2"], ["5", "0"], ["6", "5"]
    ]
    out = run("coeffs", files["dyck"], "--max-len", 6, "--method", "enumerate")[1]
    assert out.splitlines()[6] == "6\t5"
    out = run("coeffs", files["leq"], "--max-len", 4)[1]
    assert [l.split("\t")[1] for l in out.splitlines()] == ["1", "0", "2", "0", "6"]
    out = run("coeffs", files["parity"], "--max-len", 3)[1]
    assert [l.split("\t")[1] for l in out.splitlines()] == ["1", "1", "2", "4"]
    assert run("coeffs", files["leq"], "--max-len", 3, "--method", "fixpoint")[0] == 2


def test_pump(files):
    code, out, _ = run("pump", files["meas"], "--word", "a", "--eps", 0.1)
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "k = 1" and lines[1].startswith("verify: pass")
    code, out, _ = run("pump", files["parity"], "--word", "ab", "--eps", 0.01)
    assert code == 0 and "pass" in out


def test_convert(files):
    code, out, _ = run("convert", files["dyck"], "--to", "gnf")
    g = loads(out)
    assert all(f(g, w) == pytest.approx(1.0 if balanced(w) else 0.0, abs=1e-9) for w in all_words("ab", 6))
    p = loads(run("convert", files["dyck"], "--to", "qpda")[1])
    assert f(p, "abab") == pytest.approx(1.0)
    c = loads(run("convert", files["dyck"], "--to", "chomsky")[1])
    assert f(c, "aabb") == pytest.approx(1.0)
    g2 = loads(run("convert", files["leq"], "--to", "grammar")[1])
    assert f(g2, "abab") == pytest.approx(1.0) and f(g2, "aab") == pytest.approx(0.0, abs=1e-12)
    g3 = loads(run("convert", files["meas"], "--to", "grammar")[1])
    assert f(g3, "aa") == pytest.approx(0.75)
    b = loads(run("convert", files["dfa"], "--to", "bilinear", "--real")[1])
    assert b.kind == "real"
    assert run("convert", files["leq"], "--to", "gnf")[0] == 2


def test_convert_grammar_to_qfa(files, tmp_path):
    g = loads(run("convert", files["meas"], "--to", "grammar")[1])
    path = tmp_path / "mg.json"
    save(g, path)
    q = loads(run("convert", path, "--to", "qfa")[1])
    assert f(q, "aaaa") == pytest.approx(0.75)
    assert run("convert", files["dyck"], "--to", "qfa")[0] == 1


def test_check(files):
    out = run("check", files["meas"])[1]
    assert "U_a: unitary" in out
    out = run("check", files["dfa"])[1]
    assert "3 states" in out and "group: false" in out
    assert "group: true" in run("check", files["parity"])[1]
    out = run("check", files["dyck"])[1]
    assert "termination: ok" in out and "forms:" in out
    code, out, _ = run("check", files["leq"], "--depth", 4)
    assert code == 0 and "interior unitary at depth 4" in out


def test_closure(files, tmp_path):
    out = run("closure", "--op", "symdiff", files["g1"], files["g2"])[1]
    g = loads(out)
    assert f(g, "aabbc") == pytest.approx(1.0) and f(g, "abc") == pytest.approx(0.0, abs=1e-12)
    t = loads(run("closure", "--op", "threeway", files["g1"], files["g2"], files["g3"])[1])
    assert f(t, "abc") == pytest.approx(0.0, abs=1e-12)
    assert f(t, "aabbc") == pytest.approx(1.0)
    s = loads(run("closure", "--op", "sum", files["dfa"], files["parity"])[1])
    bb, par = catalog.bb_forbidden_dfa(), catalog.parity_dfa()
    for w in all_words("ab", 4):
        assert f(s, w) == pytest.approx(0.5 * bb.accepts(w) + 0.5 * par.accepts(w))
    c = loads(run("closure", "--op", "complement", files["meas"])[1])
    assert f(c, "a") == pytest.approx(0.25)
    h = loads(run("closure", "--op", "invhom", files["dfa"], "--map", "a=ab,b=b")[1])
    assert f(h, "a") == pytest.approx(1.0) and f(h, "ab") == pytest.approx(0.0)
    tq = loads(run("closure", "--op", "tensor", files["leq"], files["parity"])[1])
    leq = catalog.build_leq_qpda()
    for w in all_words("ab", 4):
        assert f(tq, w) == pytest.approx(leq(w) * par.accepts(w))
    assert run("closure", "--op", "invhom", files["dfa"])[0] == 2
    assert run("closure", "--op", "complement", files["dfa"], files["meas"])[0] == 2


@pytest.mark.parametrize("name", sorted(DEMOS))
def test_demo(name):
    code, out, _ = run("demo", name)
    assert code == 0 and out.rstrip("\n") == DEMO_GOLDEN[name]


def test_module_entry_point(files):
    r = subprocess.run(
        [sys.executable, "-m", "qautomata", "prob", str(files["meas"]), "a"], capture_output=True, text=True
    )
    assert r.returncode == 0 and r.stdout == "0.750000000000\n"
