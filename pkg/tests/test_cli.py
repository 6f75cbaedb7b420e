import json
import re
import shutil
import subprocess
import sys

import pytest

from galois_orders.cli import OUT_ENV, main


def run(argv):
    try:
        return main(argv)
    except SystemExit as e:
        return e.code


def test_certify_writes_certificate(tmp_path, capsys):
    assert run(["certify", "--family", "ogz", "--r", "1,2", "--out", str(tmp_path), "--samples", "3"]) == 0
    data = json.loads((tmp_path / "certificate.json").read_text())
    assert data["certificate"]["verdict"] == "pass"
    assert data["generators"] == ["X1+", "X1-"]
    assert "principal pass" in capsys.readouterr().out


def test_qogz_is_certified_coprincipal(tmp_path):
    assert run(["certify", "--family", "qogz", "--r", "1,2", "--out", str(tmp_path), "--samples", "2"]) == 0
    data = json.loads((tmp_path / "certificate.json").read_text())
    assert data["certificate"]["kind"] == "co-principal"


def test_env_var_sets_output_directory(tmp_path, monkeypatch):
    monkeypatch.setenv(OUT_ENV, str(tmp_path / "out"))
    assert run(["certify", "--family", "Xf", "--n", "2", "--samples", "2", "--name", "xf.json"]) == 0
    assert (tmp_path / "out" / "xf.json").is_file()


def test_certificates_are_deterministic(tmp_path):
    for d in ("a", "b"):
        assert run(["certify", "--family", "finiteW", "--pi", "1,1", "--out", str(tmp_path / d), "--seed", "4"]) == 0
    assert (tmp_path / "a" / "certificate.json").read_text() == (tmp_path / "b" / "certificate.json").read_text()


def test_config_file(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"family": "ogz", "r": [2, 2], "certify": {"samples": 2}}))
    assert run(["certify", "--config", str(cfg), "--out", str(tmp_path)]) == 0


@pytest.mark.parametrize("argv", [
    ["certify", "--family", "ogz", "--r", "1,x"],
    ["certify", "--family", "ogz", "--r", "0"],
    ["certify", "--family", "ogz", "--r", "1,2", "--J", "2"],
    ["certify"],
    ["frobnicate"],
    ["module", "--family", "Xf", "--n", "1", "--point", "1,2"],
    ["module", "--family", "Xf", "--n", "1", "--depth", "99"],
    ["evaluate", "--family", "ogz", "--r", "1,2", "Y9", "1"],
])
def test_usage_errors_exit_64(argv, tmp_path):
    assert run(argv + ["--out", str(tmp_path)] if argv[0] != "frobnicate" else argv) == 64


def test_schema_error_messages(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"family": "ogz", "r": "12", "extra": 1}))
    assert run(["certify", "--config", str(cfg)]) == 64
    err = capsys.readouterr().err
    assert "invalid configuration" in err and "r:" in err
    cfg.write_text("{not json")
    assert run(["certify", "--config", str(cfg)]) == 64
    assert run(["certify", "--config", str(tmp_path / "missing.json")]) == 64


def test_evaluate_and_multiply(tmp_path, capsys):
    assert run(["evaluate", "--family", "Xf", "--n", "1", "Xf", "x[1,1]"]) == 0
    assert "x[1,1]" in capsys.readouterr().out
    assert run(["multiply", "--family", "ogz", "--r", "1,1", "X1+", "X1-", "--json", "p.json", "--out", str(tmp_path)]) == 0
    data = json.loads((tmp_path / "p.json").read_text())
    assert data["product"] == ["X1+", "X1-"]


def test_module_reports(tmp_path):
    argv = ["module", "--family", "ogz", "--r", "1,2", "--depth", "2", "--out", str(tmp_path), "--seed", "3"]
    assert run(argv) == 0
    first = (tmp_path / "module.json").read_text()
    report = json.loads(first)
    assert report["label"] == "cyclic module truncation"
    assert {w["dimension"] for w in report["weights"]} == {1}
    assert (tmp_path / "module.csv").read_text().startswith("weight,")
    assert run(argv) == 0
    assert (tmp_path / "module.json").read_text() == first


def test_module_singular_seed_exit_3(tmp_path, capsys):
    argv = ["module", "--family", "ogz", "--r", "2,2", "--point", "1/3,1/3,2/7,3/11", "--out", str(tmp_path)]
    assert run(argv) == 3
    assert "singular character" in capsys.readouterr().err
    assert not (tmp_path / "module.json").exists()


def test_selftest(capsys):
    assert run(["selftest", "--verbose"]) == 0
    out = capsys.readouterr().out
    assert re.search(r"certification: pass .*\[\d+\.\d+s\]", out)
    assert run(["selftest", "--bad-convention"]) != 0


@pytest.mark.skipif(shutil.which("galois-orders") is None, reason="console script not installed")
def test_console_script(tmp_path):
    res = subprocess.run(["galois-orders", "selftest"], capture_output=True, text=True)
    assert res.returncode == 0
    res = subprocess.run([sys.executable, "-m", "galois_orders", "certify"], capture_output=True, text=True)
    assert res.returncode == 64
