import json
import os
import subprocess

import pytest

import orra


def short(name, seconds):
    cfg = orra.preset(name)
    cfg["duration_s"] = seconds
    return cfg


def test_presets_validate():
    for name in ("case1", "case2"):
        cfg = orra.preset(name)
        assert orra.validate_config(cfg) == cfg
    with pytest.raises(orra.ConfigError):
        orra.preset("case3")


def test_bad_config_raises_value_error():
    cfg = orra.preset("case1")
    cfg["optimizer"]["alpha"] = 0.9
    with pytest.raises(ValueError):
        orra.validate_config(cfg)
    cfg = orra.preset("case1")
    cfg["unexpected"] = True
    with pytest.raises(orra.ConfigError):
        orra.validate_config(cfg)


def test_simulate_step():
    out = orra.simulate(short("case1", 30.0))
    cols = out["columns"]
    assert len(cols["time_s"]) == 301
    assert max(abs(v) for v in cols["df1_hz"]) > 0.0
    assert out["meta"]["signal"] == "AIE"
    assert "nadir_hz" in out["summary"]


def test_zero_disturbance_stays_at_rest():
    cfg = short("case1", 5.0)
    cfg["scenario"]["kind"] = "none"
    cols = orra.simulate(cfg)["columns"]
    assert all(v == 0.0 for v in cols["df1_hz"])
    assert all(v == 0.0 for v in cols["pbess_mw"])


def test_run_and_verify(tmp_path):
    path = orra.run_scenario(short("case2", 60.0), str(tmp_path))
    text = open(path, encoding="utf-8").read()
    assert text.startswith("#")
    assert "schema" in text.splitlines()[0]
    report = orra.verify(str(path))
    assert report["fleet"]["ok"]
    assert report["tracking"]["ok"]
    trace = orra.read_trace(str(path))
    assert set(trace["columns"]) >= {"time_s", "soc_0", "lambda_0"}


def test_rainflow():
    events = sorted(orra.rainflow([0.2, 0.8, 0.2]))
    assert len(events) == 2
    assert all(abs(d - 0.6) < 1e-12 and n == 0.5 for d, n in events)
    assert orra.rainflow([0.5] * 10) == []


def test_weights_and_slope():
    w = orra.metropolis_weights(2, [(0, 1)])
    assert w == [[0.5, 0.5], [0.5, 0.5]]
    slope, sub = orra.regret_slope([10, 100, 1000], [1.0, 10 ** 0.5, 10.0])
    assert abs(slope - 0.5) < 1e-9
    assert sub


cli = os.environ.get("ORRA_CLI")


@pytest.mark.skipif(not cli, reason="ORRA_CLI not set")
def test_cli_exit_codes(tmp_path):
    good = tmp_path / "good.json"
    cfg = short("case2", 20.0)
    cfg["name"] = "py_cli"
    good.write_text(json.dumps(cfg))
    bad = tmp_path / "bad.json"
    cfg["fleet"][0]["initial_soc"] = 0.99
    bad.write_text(json.dumps(cfg))
    env = dict(os.environ, ORRA_OUTPUT_DIR=str(tmp_path / "out"))

    def code(*args):
        return subprocess.run([cli, *args], env=env, capture_output=True).returncode

    assert code("validate", str(good)) == 0
    assert code("validate", str(bad)) == 2
    assert code("run", str(good)) == 0
    assert (tmp_path / "out" / "py_cli.csv").exists()
    assert code("verify", str(tmp_path / "out" / "py_cli.csv")) == 0
