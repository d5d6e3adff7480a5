"""Distributed online BESS coordination for AGC.

Configs are plain dicts in the same shape as the JSON config files.
"""

import json as _json

from ._orra import (
    TRACE_SCHEMA_VERSION,
    ConfigError,
    NumericalError,
    metropolis_weights,
    rainflow,
    regret_slope,
)
from . import _orra

__all__ = [
    "TRACE_SCHEMA_VERSION",
    "ConfigError",
    "NumericalError",
    "preset",
    "load_config",
    "validate_config",
    "simulate",
    "run_scenario",
    "verify",
    "read_trace",
    "rainflow",
    "metropolis_weights",
    "regret_slope",
]


def preset(name):
    """Preset config dict: "case1" (5 MW step) or "case2" (30 min fluctuations)."""
    return _json.loads(_orra.preset(name))


def load_config(path):
    with open(path, encoding="utf-8") as f:
        return validate_config(_json.load(f))


def validate_config(config):
    """Returns the config with defaults filled in; raises ConfigError."""
    return _json.loads(_orra.normalize_config(_json.dumps(config)))


def simulate(config):
    """Runs a scenario in memory. Returns {"columns", "meta", "oracle_clamped", "summary"}."""
    out = _orra.simulate(_json.dumps(config))
    out["summary"] = _json.loads(out["summary"])
    return out


def run_scenario(config, out_dir):
    return _orra.run_scenario(_json.dumps(config), out_dir)


def verify(trace_path):
    return _json.loads(_orra.verify(trace_path))


def read_trace(path):
    return _orra.read_trace(path)
