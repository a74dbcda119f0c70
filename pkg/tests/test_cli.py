import json
import subprocess
import sys

import jsonschema
import pytest

from lubintate.cli import COMMANDS, load_schema, main, run

FAST_ARGS = {
    "group-law": ["--p", "2", "--f", "cyclotomic", "--deg", "5"],
    "endo": ["--p", "3", "--a", "1/2", "--deg", "5"],
    "iterate": ["--p", "3", "--f", "standard", "--m", "2", "--deg", "9"],
    "verify-axioms": ["--p", "2", "--f", "standard", "--deg", "8"],
    "iso": ["--p", "3", "--f", "standard", "--f2", "cyclotomic", "--deg", "5"],
    "eisenstein": ["--p", "3", "--f", "standard", "--m", "1"],
    "torsion-check": ["--p", "2", "--m", "2"],
    "galois": ["--p", "3", "--m", "2", "--a", "2"],
    "norm": ["--p", "2", "--m", "1"],
    "reciprocity": ["--p", "2", "--f", "cyclotomic", "--m", "2", "--u", "3"],
    "af-frobenius": ["--p", "3", "--window=-4,12"],
    "af-gamma": ["--p", "2", "--a", "5", "--window=-4,12"],
    "ve": ["--p", "3", "--d", "2", "--window=-3,5"],
    "solve-modp": ["--p", "3", "--window", "1,4"],
    "lt4": ["--p", "2", "--kl", "2", "--window", "0,3"],
    "lt5": ["--p", "3", "--m", "1"],
    "descend": ["--p", "3", "--level", "1", "--char", "2"],
}


def test_every_command_has_a_fast_case_and_a_schema():
    assert sorted(FAST_ARGS) == sorted(COMMANDS)
    for name in COMMANDS:
        jsonschema.Draft202012Validator.check_schema(load_schema(name))


@pytest.mark.parametrize("name", COMMANDS)
def test_output_validates_and_is_deterministic(name):
    code, out = run([name] + FAST_ARGS[name])
    assert code == 0, out
    jsonschema.validate(out, load_schema(name))
    code2, out2 = run([name] + FAST_ARGS[name])
    assert json.dumps(out, sort_keys=True) == json.dumps(out2, sort_keys=True)


def test_documented_examples(capsys):
    assert main(["iterate", "--p", "3", "--f", "standard", "--m", "2", "--deg", "9"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["string"] == "9*X + 30*X^3 + 27*X^5 + 9*X^7 + X^9"
    assert main(["eisenstein", "--p", "3", "--f", "standard", "--m", "1"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["Phi"] == "X^2+3" and out["eisenstein"] is True
    assert main(["verify-axioms", "--p", "2", "--f", "standard", "--deg", "8"]) == 0
    assert json.loads(capsys.readouterr().out)["status"] == "pass"


def test_usage_errors_name_the_flag():
    err = load_schema("error")
    for argv, flag in [
        (["iterate", "--p", "3", "--f", "bogus"], "--f"),
        (["iterate", "--pp", "3"], "--pp"),
        (["af-frobenius", "--window", "5,1"], "--window"),
        (["endo", "--a", "x"], "--a"),
    ]:
        code, out = run(argv)
        assert code == 2
        assert out["flag"] == flag
        jsonschema.validate(out, err)
    assert run(["no-such-command"])[0] == 2


def test_library_errors_surface_verbatim():
    code, out = run(["eisenstein", "--p", "4"])
    assert code == 1 and out["error"] == "NotPrime"
    code, out = run(["lt5", "--p", "3", "--m", "0", "--x", json.dumps({"window": [1, 1], "exact": True, "prec": 8, "coeffs": {"1": {"e_digits": [[1]], "prec": 8, "shift": 0}}})])
    assert code == 1 and out["error"] == "NoPthRootHypothesis"


def test_config_file_and_transcript(tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"p": 3, "f": "standard", "m": 2, "deg": 9}))
    out_file = tmp_path / "t.json"
    code, out = run(["iterate", "--config", str(cfg), "--out", str(out_file)])
    assert code == 0 and out["m"] == 2
    transcript = json.loads(out_file.read_text())
    assert transcript["output"] == out and transcript["config"]["p"] == 3
    # flags override the file
    code, out = run(["iterate", "--config", str(cfg), "--m", "1", "--deg", "3"])
    assert out["string"] == "3*X + X^3"
    cfg.write_text(json.dumps({"nonsense": 1}))
    assert run(["iterate", "--config", str(cfg)])[0] == 2


def test_verification_failure_exit_code():
    # X + X^2 over Q_2 is not a Lubin-Tate series for 2
    code, out = run(["verify-axioms", "--p", "2", "--f", "0,1,1"])
    assert code == 1 and out["error"] == "NotAdmissible"


def test_console_script_is_byte_identical():
    argv = [sys.executable, "-m", "lubintate.cli", "galois", "--p", "3", "--m", "1", "--a", "2"]
    a = subprocess.run(argv, capture_output=True, check=True).stdout
    b = subprocess.run(argv, capture_output=True, check=True).stdout
    assert a == b and a.endswith(b"\n")
