import io
import json
import math

import numpy as np
import pytest

from exprecog.cli import dump_report, run_command
from exprecog.samples import write_samples


def run(argv, monkeypatch=None):
    out, err = io.StringIO(), io.StringIO()
    code = run_command(argv, out, err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture
def two_pow_json(tmp_path):
    x = np.arange(-8, 9) * 0.25
    path = tmp_path / "samples.json"
    write_samples(path, x[:, None], 3 * 2**x + 1)
    return str(path)


def test_check_passes_for_exponential():
    code, out, _ = run(["check", "--expr", "exp(x1)", "--dim", "1", "--order", "1"])
    assert code == 0 and json.loads(out)["verdict"] == "pass"


def test_check_refutes_with_worst_window():
    code, out, _ = run(["check", "--expr", "exp(x1*x2)", "--dim", "2", "--order", "3"])
    rep = json.loads(out)
    assert code == 1 and rep["verdict"] == "fail"
    w = rep["worst_window"]
    assert len(w["x"]) == 2 and len(w["h"]) == 2 and w["row_scaled_magnitude"] > 1e-8
    assert len(rep["window_magnitudes"]) == 144


def test_fit_samples(two_pow_json):
    code, out, _ = run(["fit", "--input", two_pow_json, "--n-max", "5"])
    rep = json.loads(out)
    assert code == 0 and rep["recovered"]
    exps = sorted(t["exponent_re"] for t in rep["model"]["terms"])
    assert exps == pytest.approx([0.0, math.log(2)], abs=1e-9)
    coeffs = {round(t["exponent_re"], 6): t["coefficients"][0][0] for t in rep["model"]["terms"]}
    assert coeffs[round(math.log(2), 6)] == pytest.approx(3) and coeffs[0.0] == pytest.approx(1)


def test_fit_confirm_step_on_two_lattices(tmp_path):
    h, h2 = 0.5, 0.5 * (1 + math.sqrt(5)) / 2
    x = np.unique(np.round(np.concatenate([np.arange(-12, 13) * h, np.arange(-8, 9) * h2]), 12))
    path = tmp_path / "cos.csv"
    write_samples(path, x[:, None], np.cos(3 * x))
    code, out, _ = run(["fit", "--input", str(path), "--n-max", "4", "--confirm-step", repr(h2)])
    rep = json.loads(out)
    assert code == 0 and rep["aliasing_resolved"]
    assert sorted(t["exponent_im"] for t in rep["model"]["terms"]) == pytest.approx([-3, 3])


def test_fit_rejects_gaussian():
    code, out, _ = run(["fit", "--expr", "exp(x1^2)", "--n-max", "4"])
    assert code == 1 and json.loads(out)["verdict"] == "rejected"


def test_order_and_rado():
    code, out, _ = run(["order", "--expr", "x1^2*exp(x1)", "--n-max", "5"])
    assert code == 0 and json.loads(out)["order"] == 3
    code, out, _ = run(["rado", "--expr", "exp(x1)", "--coeffs=-exp(h1);1"])
    assert code == 0
    code, out, _ = run(["rado", "--expr", "x1^2", "--coeffs", "1;-2;1"])
    assert code == 1 and json.loads(out)["worst_residual"] > 0


def test_generators_montel_lines_ronkin():
    code, out, _ = run(["generators", "--dim", "2"])
    assert code == 0 and json.loads(out)["hit_rate"] == 1.0
    code, out, _ = run(["montel", "--expr", "exp(x1+x2)", "--dim", "2", "--order", "1"])
    assert code == 0 and json.loads(out)["conclusion"] == "certified"
    code, out, _ = run(["montel", "--expr", "exp(x1*x2)", "--dim", "2", "--order", "5"])
    assert code == 1 and json.loads(out)["conclusion"] == "refuted"
    code, out, _ = run(["lines", "--expr", "x1*exp(x2)", "--dim", "2", "--n-max", "4"])
    assert code == 0
    code, out, _ = run(["ronkin", "--expr", "exp(x1*x2)", "--dim", "2"])
    rep = json.loads(out)
    assert code == 1 and rep["witness_direction"] == [1.0, 1.0]
    code, out, _ = run(["ronkin", "--expr", "x1*exp(x1+2*x2)", "--dim", "2"])
    assert code == 0 and json.loads(out)["model"]["terms"][0]["exponent_re"] == [1.0, 2.0]


@pytest.mark.parametrize("argv", [
    ["check", "--expr", "x1 +", "--order", "1"],
    ["check", "--expr", "exp(x1)", "--input", "a.csv", "--order", "1"],
    ["check", "--order", "1"],
    ["check", "--expr", "exp(x1)"],
    ["check", "--expr", "exp(x1)", "--order", "1", "--tol", "0"],
    ["check", "--expr", "exp(x1)", "--order", "1", "--grid-size", "3"],
    ["fit", "--input", "/nonexistent.json"],
    ["fit", "--expr", "exp(x1*x2)", "--dim", "2"],
    ["montel", "--expr", "x3", "--dim", "2", "--order", "1"],
    ["ronkin", "--expr", "sin(x1)"],
    ["bogus"],
])
def test_usage_errors_exit_2(argv, capsys):
    code, out, err = run(argv)
    assert code == 2 and out == ""


def test_sampled_montel_is_usage_error(two_pow_json):
    code, out, err = run(["montel", "--input", two_pow_json, "--order", "2"])
    assert code == 2 and "use --expr" in err


def test_seed_env_overrides(monkeypatch):
    monkeypatch.setenv("EXPRECOG_SEED", "7")
    _, out, _ = run(["check", "--expr", "exp(x1)", "--order", "1", "--seed", "3"])
    assert json.loads(out)["config"]["seed"] == 7
    monkeypatch.setenv("EXPRECOG_SEED", "abc")
    assert run(["check", "--expr", "exp(x1)", "--order", "1"])[0] == 2


def test_json_out_and_determinism(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    argv = ["order", "--expr", "3*2^x1+1", "--n-max", "4"]
    assert run(argv + ["--json-out", str(a)])[1] == ""
    run(argv + ["--json-out", str(b)])
    assert a.read_bytes() == b.read_bytes()


def test_non_finite_values_become_null():
    text = dump_report({"a": float("inf"), "b": [np.nan, 1.0], "c": complex(1, float("nan"))})
    assert json.loads(text) == {"a": None, "b": [None, 1.0], "c": {"re": 1.0, "im": None}}
