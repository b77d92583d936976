"""Command line front end: outputs, exit codes, determinism and schemas."""

from __future__ import annotations

import json
from pathlib import Path

import jsonschema
import pytest

from svinterp.cli import (EXIT_FAILED, EXIT_HYPOTHESIS, EXIT_INPUT, EXIT_NONCONVERGENT, EXIT_OK, build_parser,
                          main)
from svinterp.reiteration import RuleId

SCHEMA_DIR = Path(__file__).resolve().parents[1] / "docs" / "schema"


def _schema(name: str) -> dict:
    return json.loads((SCHEMA_DIR / f"{name}.schema.json").read_text())


def _validate(doc, name: str) -> None:
    jsonschema.validate(doc, _schema(name), cls=jsonschema.Draft202012Validator)


@pytest.fixture
def files(tmp_path):
    def write(name, obj):
        p = tmp_path / name
        p.write_text(json.dumps(obj))
        return str(p)

    const = {"kind": "const", "c": 1.0}
    return {
        "space": write("space.json", {"kind": "standard", "theta": 0.5, "q": 2, "b": const}),
        "endpoint_space": write("s0.json", {"kind": "standard", "theta": 0.0, "q": 2, "b": const}),
        "indicator": write("ind.json", {"breakpoints": [1.0], "values": [1.0], "tail_value": 0.0}),
        "constant": write("const.json", {"breakpoints": [1.0], "values": [1.0], "tail_value": 1.0}),
        "bad_t25": write("t25.json", {
            "left": {"kind": "llim", "sigma": 0.25, "r": 2, "b": const, "q": 2, "a": const},
            "right": {"kind": "llim", "sigma": 0.75, "r": 2, "b": {"kind": "logpow", "gamma": -1.0}, "q": 2,
                      "a": const},
            "outer": {"theta": 0.5, "r": 2, "a": const}}),
        "broken": write("broken.json", {"left": {"kind": "standard"}}),
        "dir": tmp_path,
    }


def _run(capsys, argv):
    code = main(argv)
    out = capsys.readouterr().out
    return code, out


# -- subcommands --------------------------------------------------------------------------------

def test_norm_sqrt2(capsys, files):
    code, out = _run(capsys, ["norm", "--space", files["space"], "--profile", files["indicator"]])
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc["norm"] == pytest.approx(1.41421, rel=1e-3)
    assert 0 <= doc["tail_fraction"] < 1e-3
    _validate(doc["space"], "descriptor")


def test_norm_writes_csv(files):
    out = files["dir"] / "o"
    assert main(["norm", "--space", files["space"], "--profile", files["indicator"], "--format", "json,csv",
                 "--out", str(out)]) == EXIT_OK
    assert (out / "norm.csv").read_text().splitlines()[0] == "t,value"
    assert json.loads((out / "norm.json").read_text())["norm"] == pytest.approx(2 ** 0.5, rel=1e-3)


def test_derive_t7(capsys):
    code, out = _run(capsys, ["derive", "--rule", "T7"])
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc["eta"] == 0.5 and doc["rule"] == "T7"
    _validate(doc, "rule_output")
    _validate(doc["input"], "rule_input")


def test_derive_from_input_file(capsys, files):
    code, out = _run(capsys, ["derive", "--rule", "T25"])
    doc = json.loads(out)
    p = files["dir"] / "inp.json"
    p.write_text(json.dumps(doc["input"]))
    code, out2 = _run(capsys, ["derive", "--input", str(p)])
    assert code == EXIT_OK
    assert json.loads(out2)["eta"] == doc["eta"] == 0.5


@pytest.mark.parametrize("rule", ["C37", "P1"])
def test_derive_corollary_and_property(capsys, rule):
    code, out = _run(capsys, ["derive", "--rule", rule])
    assert code == EXIT_OK
    assert json.loads(out)


def test_verify_rule_t25(files):
    out = files["dir"] / "v"
    code = main(["verify-rule", "--rule", "T25", "--format", "json,csv,svg", "--out", str(out)])
    assert code == EXIT_OK
    doc = json.loads((out / "verify-T25.json").read_text())
    _validate(doc, "ratio_report")
    assert doc["passed"] and doc["spread"] <= 100 and doc["count"] == 20
    lines = (out / "verify-T25.csv").read_text().splitlines()
    assert lines[0] == "t,f_id,lhs,rhs,ratio" and len(lines) == 21
    assert (out / "verify-T25.svg").read_text().lstrip().startswith("<?xml")


def test_verify_rule_fails_on_tight_bound(capsys):
    code, out = _run(capsys, ["verify-rule", "--rule", "T7", "--spread-bound", "1.0"])
    assert code == EXIT_FAILED
    assert json.loads(out)["passed"] is False


def test_verify_holmstedt_small(capsys):
    code, out = _run(capsys, ["verify-holmstedt", "--theorem", "T14", "--per-shape", "1"])
    assert code == EXIT_OK
    doc = json.loads(out)
    _validate({k: v for k, v in doc.items() if k not in ("instance", "spread_bound", "seed")}, "ratio_report")


def test_selftest_covers_every_rule(files, capsys):
    out = files["dir"] / "st"
    code = main(["selftest", "--skip-holmstedt", "--out", str(out)])
    printed = capsys.readouterr().out
    assert code == EXIT_OK
    doc = json.loads((out / "selftest.json").read_text())
    keys = {c["check"] for c in doc["checks"]}
    for rule in RuleId:
        assert rule.value in keys, rule
    assert all(c["passed"] for c in doc["checks"])
    assert printed.count(": PASS") == len(doc["checks"])


# -- determinism --------------------------------------------------------------------------------

def test_byte_identical_outputs(files):
    dirs = [files["dir"] / "d1", files["dir"] / "d2"]
    for d in dirs:
        assert main(["verify-rule", "--rule", "T7", "--format", "json,csv", "--out", str(d), "--seed", "3"]) == 0
        assert main(["derive", "--rule", "T11i", "--out", str(d)]) == 0
    for name in ("verify-T7.json", "verify-T7.csv", "derive.json"):
        assert (dirs[0] / name).read_bytes() == (dirs[1] / name).read_bytes()


def test_env_output_dir(files, monkeypatch):
    d = files["dir"] / "env"
    monkeypatch.setenv("SVINTERP_OUT", str(d))
    assert main(["derive", "--rule", "T7"]) == EXIT_OK
    assert json.loads((d / "derive.json").read_text())["eta"] == 0.5


# -- errors -------------------------------------------------------------------------------------

@pytest.mark.parametrize("argv", [
    ["norm", "--space", "/nonexistent.json", "--profile", "/nonexistent.json"],
    ["derive", "--rule", "T99"],
    ["derive"],
    ["derive", "--rule", "T7", "--grid", "1,0.5,8"],
    ["derive", "--rule", "T7", "--spread-bound", "0.5"],
    ["derive", "--rule", "T7", "--format", "xml"],
])
def test_input_errors(capsys, argv):
    code, out = _run(capsys, argv + ["--error-json"])
    assert code == EXIT_INPUT
    doc = json.loads(out)
    _validate(doc, "error")
    assert doc["exit_status"] == EXIT_INPUT


def test_malformed_and_inadmissible_inputs(capsys, files):
    code, _ = _run(capsys, ["derive", "--input", files["broken"]])
    assert code == EXIT_INPUT
    code, out = _run(capsys, ["norm", "--space", files["endpoint_space"], "--profile", files["indicator"],
                              "--error-json"])
    assert code == EXIT_INPUT and json.loads(out)["error"] == "InvalidDescriptor"


def test_hypothesis_failed_exit(capsys, files):
    code, out = _run(capsys, ["derive", "--input", files["bad_t25"], "--error-json"])
    assert code == EXIT_HYPOTHESIS
    doc = json.loads(out)
    _validate(doc, "error")
    assert doc["error"] == "HypothesisFailed" and "r_0" in doc["message"]


def test_nonconvergent_exit(capsys, files):
    code, out = _run(capsys, ["norm", "--space", files["space"], "--profile", files["constant"], "--error-json"])
    assert code == EXIT_NONCONVERGENT
    assert json.loads(out)["error"] == "NonConvergent"


def test_error_to_stderr(capsys):
    assert main(["derive", "--rule", "T99"]) == EXIT_INPUT
    assert "error:" in capsys.readouterr().err


def test_parser_defaults():
    args = build_parser().parse_args(["derive", "--rule", "T7"])
    assert args.seed == 0 and args.spread_bound == 100.0 and args.format == "json" and not args.refine_check
