import csv
import importlib.resources
import io
import json
import math
import subprocess
import sys

import jsonschema
import pytest

from growthgauge.cli import build_parser, run

SCHEMA = json.loads(importlib.resources.files("growthgauge").joinpath("report.schema.json")
                    .read_text())
VALIDATOR = jsonschema.Draft202012Validator(SCHEMA)


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def call_json(*argv):
    code, out, err = call(*argv)
    report = json.loads(out)
    VALIDATOR.validate(report)
    return code, report


@pytest.fixture
def xlogx_csv(tmp_path):
    p = tmp_path / "xlogx.csv"
    rows = ["size,seconds"] + ["%d,%r" % (n, 2e-7 * n * math.log(n)) for n in
                               (16, 32, 64, 128, 256, 512, 1024, 2048, 4096, 8192)]
    p.write_text("\n".join(rows) + "\n")
    return p


@pytest.fixture
def exp_json(tmp_path):
    p = tmp_path / "exp.json"
    p.write_text(json.dumps([{"size": n, "seconds": 1e-6 * 2.0 ** n} for n in range(5, 26)]))
    return p


def test_schema_is_valid():
    jsonschema.Draft202012Validator.check_schema(SCHEMA)


# --- documented examples -------------------------------------------------------

def test_classify_two_pow_x():
    code, report = call_json("classify", "2^x")
    assert code == 1
    assert report["verdict"] == "NotPolynomialTime"
    assert report["input"] == "2^x"


def test_derive_prints_one_over_x():
    code, out, _ = call("derive", "x*log(x)", "--order", "2")
    assert code == 0
    assert out == "1/x\n"


def test_taylor_csv_exact_coefficients():
    code, out, _ = call("taylor", "exp(x)", "--x0", "0", "--order", "4", "--output", "csv")
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["k", "a_k", "x", "T_n(x)", "|R_n(x)|", "bound"]
    assert [r[1] for r in rows[1:]] == ["1", "1", "1/2", "1/6", "1/24"]


def test_taylor_csv_remainder_rows():
    code, out, _ = call("taylor", "exp(x)", "--order", "3", "--at", "0.5", "1",
                        "--output", "csv")
    rows = list(csv.reader(io.StringIO(out)))[5:]
    assert len(rows) == 2
    x, T, R, bound = (float(v) for v in rows[0][2:])
    assert x == 0.5 and T == pytest.approx(1 + 0.5 + 0.125 + 0.5 ** 3 / 6)
    assert R <= bound


# --- every subcommand, JSON validated against the schema -------------------------

def test_reports_validate(xlogx_csv, exp_json):
    cases = [
        (("derive", "2^sqrt(x)", "--output", "json"), 0),
        (("taylor", "2^x", "--order", "5", "--at", "0.25", "--output", "json"), 0),
        (("radius", "1/(1-x)", "--order", "20", "--method", "root"), 0),
        (("bound", "x*log(x)"), 0),
        (("bound", "exp(x)", "--n-max", "3"), 1),
        (("bound", "ln(x - 2)"), 2),
        (("classify", "x*log(x) + y^2"), 0),
        (("classify", "x*2^y", "--vars", "x,y"), 1),
        (("fit", "--input", str(xlogx_csv)), 0),
        (("fit", "--input", str(exp_json), "--format", "json"), 1),
    ]
    for argv, want in cases:
        code, report = call_json(*argv)
        assert code == want, argv
        assert report["command"] == argv[0]


def test_bound_report_fields():
    code, r = call_json("bound", "2^log2(log2(x))")
    assert r["bounding_order"] == 1
    assert r["verdicts"][0]["status"] == "bounded"
    assert r["config_echo"]["x_min"] == 1.0009765625
    assert r["flags"]["numerical_evidence_only"] is True


def test_radius_infinite_is_json_safe():
    code, out, _ = call("radius", "exp(x)", "--order", "30")
    assert '"value": "inf"' in out
    assert "Infinity" not in out


def test_fit_report(xlogx_csv):
    code, r = call_json("fit", "--input", str(xlogx_csv))
    assert r["fits"][0]["family"] == "x_log_x"
    assert r["classification"]["verdict"] == "PolynomialTimeCandidate"
    assert r["samples"] == 10


def test_text_outputs(xlogx_csv):
    assert call("classify", "2^x", "--output", "text")[1].startswith("verdict: NotPolynomialTime")
    assert "bounding_order: 2" in call("bound", "x*ln(x)", "--output", "text")[1]
    assert call("radius", "1/(1-x)", "--output", "text")[1].startswith("ratio: finite")
    assert "a_2 = 1/2" in call("taylor", "exp(x)", "--output", "text")[1]
    assert "x_log_x" in call("fit", "--input", str(xlogx_csv), "--report", "text")[1]


def test_config_flags_are_echoed():
    code, r = call_json("classify", "x", "--n-max", "3", "--probe-start", "8",
                        "--probe-factor", "3", "--probe-steps", "20", "--stabilize-tol", "1e-5",
                        "--precision", "96", "--fix-values", "3,7", "--full", "--x-min", "2")
    echo = r["config_echo"]
    assert (echo["n_max"], echo["probe_start"], echo["probe_factor"], echo["probe_steps"]) == \
        (3, 8.0, 3.0, 20)
    assert (echo["stabilize_tol"], echo["precision_bits"], echo["fix_values"], echo["full"]) == \
        (1e-5, 96, ["3", "7"], True)
    assert echo["x_min"] == 2.0
    assert len(r["per_variable"]["x"]["verdicts"]) == 3


def test_precision_env_default(monkeypatch):
    monkeypatch.setenv("GG_PRECISION_BITS", "200")
    assert call_json("classify", "x")[1]["config_echo"]["precision_bits"] == 200
    monkeypatch.setenv("GG_PRECISION_BITS", "20")
    assert call("classify", "x")[0] == 64


# --- determinism -----------------------------------------------------------------

def test_byte_identical_reports(xlogx_csv):
    for argv in (("classify", "x^log2(x)"), ("bound", "2^sqrt(x)", "--full"),
                 ("fit", "--input", str(xlogx_csv)), ("taylor", "2^x", "--at", "0.3")):
        assert call(*argv) == call(*argv)


# --- help and exit codes ----------------------------------------------------------

@pytest.mark.parametrize("sub", ["derive", "taylor", "radius", "bound", "classify", "fit"])
def test_help_for_every_subcommand(sub, capsys):
    assert run([sub, "--help"]) == 0
    assert "usage:" in capsys.readouterr().out


@pytest.mark.parametrize("argv", [
    ["classify", "x", "--bogus"],
    ["nope"],
    [],
    ["taylor", "x", "--order", "three"],
    ["radius", "x", "--method", "median"],
    ["fit"],
    ["classify", "x", "--probe-factor", "1"],
    ["classify", "x", "--probe-steps", "5"],
    ["classify", "x", "--n-max", "0"],
    ["bound", "x", "--precision", "4096"],
])
def test_usage_errors_exit_64(argv):
    code, out, err = call(*argv)
    assert code == 64
    assert out == "" and err.startswith("usage error")


@pytest.mark.parametrize("argv", [
    ["derive", "x +"],
    ["derive", "sin(x)"],
    ["derive", "exp(x, 2)"],
    ["classify", "x*y", "--vars", "x"],
    ["classify", "1/0"],
    ["taylor", "ln(x)", "--x0", "0"],
    ["taylor", "exp(x)", "--M", "-1", "--at", "1"],
    ["radius", "exp(x)", "--order", "3"],
    ["fit", "--input", "/does/not/exist.csv"],
])
def test_input_errors_exit_65(argv):
    code, out, err = call(*argv)
    assert code == 65, err
    assert out == ""


def test_bad_sample_files_exit_65(tmp_path):
    for name, body, fmt in [("few.csv", "size,seconds\n1,1\n2,2\n", "csv"),
                            ("neg.csv", "size,seconds\n1,-1\n", "csv"),
                            ("narrow.csv", "size,seconds\n" + "".join(
                                "%d,1.%d\n" % (n, n) for n in range(10, 15)), "csv"),
                            ("bad.json", "{", "json")]:
        p = tmp_path / name
        p.write_text(body)
        code, _, err = call("fit", "--input", str(p), "--format", fmt)
        assert code == 65, name


@pytest.mark.parametrize("argv", [
    ["derive", "x", "--order", "11"],
    ["taylor", "x", "--order", "65"],
    ["derive", "exp(" * 40 + "x" + ")" * 40, "--order", "3"],
])
def test_limits_exit_70(argv):
    code, out, err = call(*argv)
    assert code == 70
    assert err.startswith("limit exceeded")


def test_deep_nesting_is_a_syntax_error():
    code, _, err = call("derive", "(" * 500 + "x" + ")" * 500)
    assert code == 65 and "nesting" in err


def test_parser_builds():
    assert build_parser().prog == "growthgauge"


def test_console_entry_points():
    for cmd in (["growthgauge"], [sys.executable, "-m", "growthgauge"]):
        p = subprocess.run(cmd + ["derive", "x*log(x)", "--order", "2"],
                           capture_output=True, text=True)
        assert p.returncode == 0 and p.stdout == "1/x\n"
    p = subprocess.run([sys.executable, "-m", "growthgauge", "classify", "exp(x)"],
                       capture_output=True, text=True)
    assert p.returncode == 1
