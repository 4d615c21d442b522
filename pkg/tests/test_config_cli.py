"""Config files, deterministic output and the command line."""

import json
import math
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pmcorner.cli import main
from pmcorner.config import load_config, parse_config, serialize_config
from pmcorner.errors import ConfigError
from pmcorner.runner import dumps_json, resolve_out_dir, run_file


# -- parsing -------------------------------------------------------------------

def test_minimal_config():
    cfg = parse_config("scenario = scherk2d\nsigma = -1.1781\n")
    assert cfg.scenario == "scherk2d"
    assert cfg["sigma"] == -1.1781
    assert "sigma" in cfg.explicit and "eps" not in cfg.explicit


def test_arithmetic_values():
    cfg = parse_config("scenario = scherk2d\nsigma = -3*pi/8\n")
    assert cfg["sigma"] == pytest.approx(-3 * math.pi / 8, abs=0)


def test_sigma_zero_rejected():
    with pytest.raises(ConfigError) as exc:
        parse_config("scenario = scherk2d\n\nsigma = 0\n")
    assert exc.value.line == 3


def test_missing_scenario_names_key():
    with pytest.raises(ConfigError, match="scenario"):
        parse_config("sigma = -1\n")


@pytest.mark.parametrize("text, line", [
    ("scenario = scherk2d\nfoo = 1\n", 2),
    ("scenario = scherk2d\neps = 0.2\neps = 0.3\n", 3),
    ("scenario = scherk2d\n# comment\nrho = 2\n", 3),
    ("scenario = mango-check\nn = 1\n", 2),
    ("scenario = scherk2d\nh = -0.1\n", 2),
    ("scenario = ridge-meridian\nlambda = 1\nH = 2\n", 3),
    ("scenario = ridge-meridian\na = 0.6\na_frac = 0.5\n", 3),
    ("scenario = scherk2d\neps\n", 2),
    ("scenario = scherk2d\neps =\n", 2),
    ("scenario = ridge-meridian\ncorner_patch = 1.5\n", 2),
])
def test_errors_carry_line_numbers(text, line):
    with pytest.raises(ConfigError) as exc:
        parse_config(text)
    assert exc.value.line == line


def test_unsafe_expression_rejected():
    with pytest.raises(ConfigError):
        parse_config("scenario = scherk2d\nsigma = __import__('os').getpid()\n")


def test_frac_replaces_default():
    cfg = parse_config("scenario = ridge-meridian\ns2_frac = 0.5\n")
    assert "s2" not in cfg.seed()
    assert cfg.seed()["s2_frac"] == 0.5


def test_seed_excludes_mesh_keys(meridian_cfg):
    seed = meridian_cfg.seed()
    for k in ("h", "grading", "corner_patch", "H", "scenario"):
        assert k not in seed


@pytest.mark.parametrize("name", ["scherk2d", "ridge-meridian", "validate-catenoid",
                                  "validate-hemisphere", "ledger-only", "mango-check",
                                  "gset-check"])
def test_shipped_configs_round_trip(configs_dir, name):
    cfg = load_config(configs_dir / f"{name}.cfg")
    again = parse_config(serialize_config(cfg))
    assert again.values == cfg.values


@settings(max_examples=40, deadline=None)
@given(st.floats(-1.5, -0.8, allow_nan=False), st.floats(0.01, 0.49), st.floats(1e-4, 0.1))
def test_round_trip_exact(sigma, eps, h):
    cfg = parse_config(f"scenario = scherk2d\nsigma = {sigma!r}\neps = {eps!r}\nh = {h!r}\n")
    again = parse_config(serialize_config(cfg))
    assert again.values == cfg.values


def test_overrides_are_explicit(meridian_cfg):
    cfg = meridian_cfg.with_overrides({"h": 0.01, "p": "0.5"})
    assert cfg["h"] == 0.01 and "h" in cfg.explicit
    assert cfg["p"] == 0.5


# -- output --------------------------------------------------------------------

def test_json_floats_round_trip():
    vals = [0.1, 1 / 3, math.pi, 1e-300, 2.0, -0.0]
    text = dumps_json({"v": vals, "a": np.float64(0.2), "i": np.int64(3),
                       "bad": float("nan")})
    back = json.loads(text)
    assert back["v"] == vals
    assert back["a"] == 0.2 and back["i"] == 3 and back["bad"] is None
    assert "2.0" in text


def test_out_dir_precedence(monkeypatch, tmp_path):
    cfg = parse_config(f"scenario = mango-check\nout_dir = {tmp_path / 'cfg'}\n")
    monkeypatch.delenv("PMCORNER_OUT", raising=False)
    assert resolve_out_dir(cfg) == tmp_path / "cfg"
    monkeypatch.setenv("PMCORNER_OUT", str(tmp_path / "env"))
    assert resolve_out_dir(cfg) == tmp_path / "env"
    assert resolve_out_dir(cfg, tmp_path / "arg") == tmp_path / "arg"
    monkeypatch.delenv("PMCORNER_OUT")
    assert str(resolve_out_dir(parse_config("scenario = mango-check\n"))).endswith(
        "mango-check")


def test_certificate_is_deterministic(configs_dir, tmp_path):
    a = run_file(configs_dir / "gset-check.cfg", tmp_path / "a")
    b = run_file(configs_dir / "gset-check.cfg", tmp_path / "b")
    for name in ("certificate.json", "contour.svg"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    assert a.status == b.status == 0


def test_mesh_h_override(configs_dir, tmp_path):
    res = run_file(configs_dir / "validate-hemisphere.cfg", tmp_path, mesh_h=0.05,
                   overrides={"tol_error": "0.1"})
    cert = json.loads((tmp_path / "certificate.json").read_text())
    assert cert["config"]["h"] == 0.05
    assert cert["config"]["tol_error"] == 0.1
    assert res.status == 0
    for name in ("mesh.txt", "solution.csv", "solver_log.jsonl", "contour.svg"):
        assert (tmp_path / name).exists()


# -- command line --------------------------------------------------------------

def test_cli_mango(configs_dir, tmp_path, capsys):
    code = main(["run", str(configs_dir / "mango-check.cfg"), "--out", str(tmp_path)])
    out = capsys.readouterr().out
    assert code == 0
    assert "[pass]" in out and "[FAIL]" not in out
    cert = json.loads((tmp_path / "certificate.json").read_text())
    assert cert["scenario"] == "mango-check"


def test_cli_seed_override(configs_dir, tmp_path):
    code = main(["run", str(configs_dir / "ledger-only.cfg"), "--out", str(tmp_path),
                 "--seed-override", "p=0.4"])
    cert = json.loads((tmp_path / "certificate.json").read_text())
    assert cert["config"]["p"] == 0.4
    assert code == 0


def test_cli_config_error_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.cfg"
    bad.write_text("scenario = scherk2d\nsigma = 0\n")
    assert main(["run", str(bad)]) == 2
    assert "line 2" in capsys.readouterr().err


def test_cli_bad_override_syntax(configs_dir):
    with pytest.raises(SystemExit):
        main(["run", str(configs_dir / "mango-check.cfg"), "--seed-override", "novalue"])


def test_module_entry_point(configs_dir, tmp_path):
    env_out = tmp_path / "env"
    proc = subprocess.run([sys.executable, "-m", "pmcorner", "run",
                           str(configs_dir / "gset-check.cfg")],
                          capture_output=True, text=True,
                          env={**__import__("os").environ, "PMCORNER_OUT": str(env_out)})
    assert proc.returncode == 0, proc.stderr
    assert (env_out / "certificate.json").exists()
