import json
import subprocess
import sys

import pytest

from motint.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_euler_ray(capsys):
    code, out, _ = run(capsys, "euler", "--set", "0 < g1")
    assert code == 0 and out.strip() == "chi_g = -1"
    code, out, _ = run(capsys, "euler", "--set", "0 < g1", "--bounded")
    assert out.strip() == "chi_b = 0"
    code, out, _ = run(capsys, "--format", "json", "euler", "--set", "0 < g1")
    data = json.loads(out)
    assert data["schema_version"] and data["chi_g"] == -1 and data["chi_b"] == 0


def test_milnor_cusp(capsys):
    code, out, _ = run(capsys, "milnor", "--poly", "x^2 + y^3")
    assert code == 0
    assert "chi(S_f) = -1" in out and "blocks:" in out
    assert out.count("cls =") == 4


def test_milnor_json(capsys):
    code, out, _ = run(capsys, "milnor", "--poly", "x^2 + y^3", "--format", "json")
    data = json.loads(out)
    assert "schema_version" in data and data["euler"] == -1 and len(data["blocks"]) == 4


def test_verify_node(capsys):
    code, out, _ = run(capsys, "verify", "--poly", "x*y", "--p", "5", "--max-m", "3",
                       "--allow-nonconvenient")
    assert code == 0
    rows = out.strip().splitlines()[1:]
    assert len(rows) == 3 and all(r.endswith("yes") for r in rows)


def test_verify_default_primes(capsys):
    code, out, _ = run(capsys, "--format", "json", "verify", "--poly", "x^2 + y^5",
                       "--max-m", "2")
    data = json.loads(out)
    assert code == 0 and {r["p"] for r in data["rows"]} == {11}


def test_zeta_formats(capsys):
    code, out, _ = run(capsys, "zeta", "--poly", "x")
    assert code == 0 and out.startswith("Z_f(T) =")
    code, out, _ = run(capsys, "zeta", "--poly", "x", "--format", "latex")
    assert "\\mathds{L}" in out
    code, out, _ = run(capsys, "zeta", "--poly", "x", "--format", "json")
    assert json.loads(out)["schema_version"]


def test_sample_deterministic(capsys):
    argv = ("sample", "--poly", "x^2 + y^3", "--trials", "80", "--seed", "4")
    first = run(capsys, *argv)
    second = run(capsys, *argv)
    assert first[0] == 0 and first == second
    assert first[1].startswith("80/80 consistent")


def test_conv(capsys):
    code, out, _ = run(capsys, "conv", "--expr", "p(1/2)*p(1/3)", "--chi", "g")
    code2, out2, _ = run(capsys, "conv", "--expr", "p(5/6)")
    assert code == code2 == 0 and out == out2


def test_class_roundtrip(capsys, tmp_path):
    code, out, _ = run(capsys, "milnor", "--poly", "x^2 + y^3", "--format", "json")
    path = tmp_path / "cusp.json"
    path.write_text(json.dumps(json.loads(out)["class"]))
    code, out, _ = run(capsys, "retract", "--class", str(path), "--map", "ediamond")
    code2, fiber, _ = run(capsys, "milnor", "--poly", "x^2 + y^3")
    assert code == code2 == 0
    assert fiber.splitlines()[0] == "S_f = " + out.strip()
    code, out, _ = run(capsys, "zeta-class", "--class", str(path))
    code2, zf, _ = run(capsys, "zeta", "--poly", "x^2 + y^3")
    assert out.split("=", 1)[1] == zf.split("=", 1)[1]


@pytest.mark.parametrize("argv,code", [
    (("milnor", "--poly", "x*y"), 2),
    (("milnor", "--poly", "x^2 + 2*x*y + y^2"), 2),
    (("milnor", "--poly", "x + 1"), 2),
    (("milnor", "--poly", "x^^2"), 64),
    (("euler", "--set", "0 < "), 64),
    (("verify", "--poly", "x^2 + y^3", "--p", "9"), 2),
    (("frobnicate",), 64),
    (("retract", "--class", "/nonexistent.json", "--map", "eb"), 64),
])
def test_exit_codes(capsys, argv, code):
    try:
        got = main(list(argv))
    except SystemExit as e:
        got = e.code
    capsys.readouterr()
    assert got == code


def test_cap_env(capsys, monkeypatch):
    monkeypatch.setenv("MOTINT_CAP", "2000")
    code, _, err = run(capsys, "verify", "--poly", "x^2 + y^3", "--p", "7", "--max-m", "3")
    assert code == 2 and "TooLarge" in err
    monkeypatch.setenv("MOTINT_CAP", "lots")
    assert run(capsys, "euler", "--set", "0 < g1")[0] == 64
    monkeypatch.setenv("MOTINT_CAP", "10")
    assert run(capsys, "euler", "--set", "0 < g1")[0] == 64


def test_console_script_bytes_identical():
    cmd = [sys.executable, "-m", "motint.cli", "--format", "json", "milnor", "--poly", "x^2 + y^5"]
    a = subprocess.run(cmd, capture_output=True, check=True).stdout
    b = subprocess.run(cmd, capture_output=True, check=True).stdout
    assert a == b and json.loads(a)["euler"] == -3
