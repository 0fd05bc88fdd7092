from __future__ import annotations

import io
import json
import subprocess
import sys

import pytest

from helpers import FIXTURES
from tsa.cli import main

FOO = str(FIXTURES / "foo.tsl")
FOO_OK = str(FIXTURES / "foo_ok.tsl")
LU = str(FIXTURES / "sparselu.tsl")

SUP = """class K {
    @EnableOnly(a)
    K();
    void a();
    @Disable(b)
    void b();
}
"""
SUB = """class K {
    @EnableOnly(a)
    K();
    @Enable(b)
    void a();
    @Disable(b)
    void b();
}
"""


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out)
    return code, out.getvalue()


def test_check_exit_codes(tmp_path):
    code, text = run("check", FOO)
    assert code == 1 and text.count("\n") == 1
    assert run("check", FOO_OK) == (0, "")
    bad = tmp_path / "bad.tsl"
    bad.write_text("class {")
    assert run("check", str(bad))[0] == 2
    assert run("check", str(tmp_path / "missing.tsl"))[0] == 2


def test_check_json_and_dfa():
    code, text = run("check", "--format", "json", FOO)
    data = json.loads(text)
    assert code == 1 and data["callee"] == "Foo.setupLU2" and data["col"] == 5
    assert run("check", "--analyzer", "dfa", FOO) == run("check", FOO)


def test_bad_arguments():
    assert run()[0] == 2
    assert run("check")[0] == 2
    assert run("nope")[0] == 2
    assert run("--help")[0] == 0


def test_expand_dfa(tmp_path, capsys):
    code, text = run("expand-dfa", LU)
    assert code == 0 and text.rstrip().endswith("# states: 5")
    code, mini = run("expand-dfa", "--minimize", LU)
    assert code == 0 and "# states: 5" in mini
    assert run("expand-dfa", "--state-limit", "2", LU)[0] == 2
    # a client file without its contract has nothing to expand
    client_only = tmp_path / "client.tsl"
    client_only.write_text("void f() { }\n")
    assert run("expand-dfa", str(client_only))[0] == 2
    assert "expected exactly one contract class" in capsys.readouterr().err


def test_subsume(tmp_path):
    sub, sup = tmp_path / "sub.tsl", tmp_path / "sup.tsl"
    sub.write_text(SUB)
    sup.write_text(SUP)
    assert run("subsume", str(sub), str(sup)) == (0, "subsumes\n")
    code, text = run("subsume", "--polarity", "literal", str(sub), str(sup))
    assert code == 1 and "first failing method: a" in text
    assert run("subsume", str(sup), str(sub))[0] == 1
    assert run("subsume", LU, str(sup))[0] == 2


def test_gen_contract(tmp_path):
    code, text = run("gen", "contract", "methods=3", "chain=3", "name=CR1")
    assert code == 0 and text.startswith("class CR1 {")
    path = tmp_path / "c.tsl"
    assert run("gen", "contract", "methods=3", "--out", str(path)) == (0, "")
    assert path.read_text().startswith("class ")
    assert run("gen", "contract", "bogus=1")[0] == 2
    assert run("gen", "contract", "methods=x")[0] == 2
    assert run("gen", "contract", "oops")[0] == 2


def test_gen_client_round_trip(tmp_path, capsys):
    path = tmp_path / "client.tsl"
    code, _ = run("gen", "client", "loc=120", "bases=2", "toggles=1", "seed=4", "--out", str(path))
    assert code == 0
    assert run("check", str(path)) == (0, "")
    code, _ = run("gen", "client", "loc=120", "bases=2", "toggles=1", "seed=4", "--inject-bug", "--out", str(path))
    err = capsys.readouterr().err
    assert code == 0 and "injected violation" in err
    site = err.split(" at ")[1].strip()
    code, text = run("check", str(path))
    assert code == 1 and all(f":{site}:" in line for line in text.splitlines())


def test_gen_client_without_toggles_cannot_hold_a_bug():
    assert run("gen", "client", "loc=60", "--inject-bug")[0] == 2


def test_bench(tmp_path, capsys):
    matrix = tmp_path / "m.txt"
    matrix.write_text("id=a methods=2 toggles=1 loc=40 runs=1 warmup=0\n")
    out = tmp_path / "rows.csv"
    assert run("bench", "--matrix", str(matrix), "--out", str(out))[0] == 0
    assert out.read_text().startswith("contract_id,")
    code, text = run("bench", "--matrix", str(matrix))
    assert code == 0 and text.count("\n") == 3
    assert "speedup" in capsys.readouterr().err
    matrix.write_text("id=a wat=1\n")
    assert run("bench", "--matrix", str(matrix))[0] == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "tsa", "check", FOO], capture_output=True, text=True)
    assert proc.returncode == 1 and "Foo.setupLU2" in proc.stdout
