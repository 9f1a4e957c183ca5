import json

import pytest

from spherevirial.cli import RunConfig, main
from spherevirial.errors import ConfigError

TS = "2000-01-01T00:00:00+00:00"


def run(tmp_path, *args):
    out = tmp_path / "out"
    rc = main([*args, "--out", str(out), "--timestamp", TS])
    return rc, out


def report(out, command):
    return json.loads((out / f"{command}-report.json").read_text())


def test_series_oscillator(tmp_path, capsys):
    rc, out = run(tmp_path, "series", "--system", "oscillator-1d", "--alpha", "1", "--lambda", "0.1",
                  "--n", "0", "--l", "1", "--order", "3")
    assert rc == 0
    doc = report(out, "series")
    series = {row["j"]: row for row in doc["results"]["series"]}
    assert series[1]["exact_zero"] and series[3]["exact_zero"]
    assert series[2]["value"] == pytest.approx(-0.6123423335162355, rel=1e-12)
    statuses = {c["check"]: c["status"] for c in doc["checks"]}
    assert statuses["E^(2) vs legacy closed form"] == "expected-fail"
    assert json.loads(capsys.readouterr().out.strip().splitlines()[-1])["exit_code"] == 0
    assert all(c["tolerance"] is not None for c in doc["checks"])


def test_series_coulomb(tmp_path):
    rc, out = run(tmp_path, "series", "--system", "coulomb-2d", "--kappa", "1", "--lambda", "0.1",
                  "--n", "0", "--m", "1", "--l", "-3", "--order", "1", "--variant", "legacy")
    assert rc == 0
    doc = report(out, "series")
    e1 = next(r for r in doc["results"]["series"] if r["j"] == 1)["value"]
    assert e1 == pytest.approx(1.123457, abs=1e-6)


def test_invalid_exponent_sign_rejected(tmp_path, capsys):
    rc, _ = run(tmp_path, "series", "--system", "coulomb-2d", "--l", "2")
    assert rc == 2
    assert json.loads(capsys.readouterr().out.strip())["status"] == "rejected-config"


def test_resonant_series_is_numerical_error(tmp_path, capsys):
    rc, _ = run(tmp_path, "series", "--system", "coulomb-2d", "--m", "1", "--l", "-3", "--order", "2")
    assert rc == 3
    assert json.loads(capsys.readouterr().out.strip())["error"]["type"] == "ResonanceError"


def test_config_file_and_override(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"system": "oscillator-1d", "alpha": 2.0, "lambda": 0.05, "order": 2}))
    rc, out = run(tmp_path, "series", "--config", str(cfg), "--alpha", "1.0")
    assert rc == 0
    assert report(out, "series")["config"]["alpha"] == 1.0


def test_bad_config_file(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text("[1, 2]")
    assert run(tmp_path, "series", "--config", str(cfg))[0] == 2


def test_config_validation():
    with pytest.raises(ConfigError):
        RunConfig.from_mapping({"system": "oscillator-1d", "lam": -1.0})
    with pytest.raises(ConfigError):
        RunConfig.from_mapping({"unknown": 1})


@pytest.mark.slow
def test_verify_default_with_empty_k(tmp_path):
    rc, out = run(tmp_path, "verify", "--system", "oscillator-1d", "--order", "2", "--no-k")
    assert rc == 0
    doc = report(out, "verify")
    assert doc["results"]["hypervirial"] == []
    assert (out / "beta_scaling.csv").exists()
    assert (out / "convergence.svg").exists()


@pytest.mark.slow
def test_verify_default_passes(tmp_path):
    rc, out = run(tmp_path, "verify", "--system", "oscillator-1d")
    assert rc == 0
    assert all(c["status"] == "pass" for c in report(out, "verify")["checks"])


@pytest.mark.slow
def test_classical_default_and_determinism(tmp_path):
    rc, out = run(tmp_path, "classical")
    assert rc == 0
    doc = report(out, "classical")
    statuses = [c["status"] for c in doc["checks"]]
    assert "fail" not in statuses
    control = [c for c in doc["checks"] if "negative-control" in c["check"] and "closure" in c["check"]]
    assert control and all(c["status"] == "expected-fail" for c in control)
    first_json = (out / "classical-report.json").read_bytes()
    first_svg = (out / "orbits.svg").read_bytes()
    # identical config, including the output directory recorded in it
    rc2, out2 = run(tmp_path, "classical")
    assert rc2 == 0 and out2 == out
    assert (out2 / "classical-report.json").read_bytes() == first_json
    assert (out2 / "orbits.svg").read_bytes() == first_svg


def test_classical_flat_rows(tmp_path):
    rc, out = run(tmp_path, "classical", "--lambda", "0")
    assert rc == 0
    assert any("flat" in c["check"] for c in report(out, "classical")["checks"])
