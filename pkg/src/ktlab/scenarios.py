"""Config files and the shipped scenario library.

A config is a JSON object::

    {"space": "H2" | "Hp" | "A2" | "Ap" | "A2alpha" | "H2+" | "A2+",
     "p": 2, "alpha": 0, "h": "expr", "psi": "expr",
     "grids": {...}, "policy": {...}}

Scenarios add ``name``, ``oracle`` (the known verdict or null),
``oracle_note`` and optionally ``scope: "exploratory"``. Toeplitz scenarios
use ``kind: "toeplitz"`` with ``symbol`` (an expression evaluated on the
circle) or ``smooth_arc`` (parameters of :func:`operators.smooth_arc`).
"""

from __future__ import annotations

import json
from importlib import resources

import numpy as np

from .analytic import sample_boundary
from .diagnostics import DiagnosticsReport, agreement_of, default_seed, run_all_criteria, toeplitz_criterion
from .expr import parse_expr
from .operators import WcoSpec, smooth_arc
from .results import ThresholdPolicy
from .spaces import space_from_config

__all__ = [
    "ConfigError",
    "spec_from_config",
    "policy_from_config",
    "load_config",
    "list_scenarios",
    "load_scenario",
    "run_config",
    "run_scenario",
    "toeplitz_symbol",
]

_KEYS = {"space", "p", "alpha", "h", "psi", "grids", "policy", "name", "oracle", "oracle_note", "scope",
         "kind", "symbol", "smooth_arc", "N", "sizes", "description"}


class ConfigError(ValueError):
    pass


def load_config(path):
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from None
    if not isinstance(cfg, dict):
        raise ConfigError(f"{path}: config must be a JSON object")
    return cfg


def _check_keys(cfg):
    unknown = set(cfg) - _KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")


def spec_from_config(cfg) -> WcoSpec:
    _check_keys(cfg)
    if "space" not in cfg or "psi" not in cfg:
        raise ConfigError("config needs 'space' and 'psi'")
    space = space_from_config(cfg["space"], cfg.get("p"), cfg.get("alpha"))
    return WcoSpec(cfg.get("h", "1"), cfg["psi"], space)


def policy_from_config(cfg) -> ThresholdPolicy:
    return ThresholdPolicy.from_dict(cfg.get("policy"))


def toeplitz_symbol(cfg, N=2**14):
    """Boundary samples of a Toeplitz scenario's symbol."""
    if "smooth_arc" in cfg:
        f = smooth_arc(**cfg["smooth_arc"])
        return sample_boundary(f, N)
    if "symbol" in cfg:
        expr = parse_expr(cfg["symbol"])
        return sample_boundary(lambda z: np.real_if_close(expr(z), tol=1e6), N)
    raise ConfigError("Toeplitz config needs 'symbol' or 'smooth_arc'")


def run_config(cfg, seed=None) -> DiagnosticsReport:
    """Run every applicable criterion for a config or scenario dict."""
    _check_keys(cfg)
    policy = policy_from_config(cfg)
    oracle = cfg.get("oracle")
    seed = default_seed(seed)
    if cfg.get("kind") == "toeplitz":
        hb = toeplitz_symbol(cfg, int(cfg.get("N", 2**14)))
        sizes = tuple(cfg.get("sizes", (64, 128, 256, 512)))
        res = toeplitz_criterion(hb, sizes, policy=policy)
        agreement, dis, incon, status = agreement_of([res], oracle)
        spec = {"kind": "toeplitz", **{k: cfg[k] for k in ("symbol", "smooth_arc") if k in cfg}}
        report = DiagnosticsReport(spec, [res], agreement, dis, incon, oracle, status, policy.to_dict(), seed)
    else:
        spec = spec_from_config(cfg)
        report = run_all_criteria(spec, cfg.get("grids"), policy, seed, oracle, cfg.get("scope"))
    if "name" in cfg:
        report.extra["scenario"] = cfg["name"]
        report.extra["oracle_note"] = cfg.get("oracle_note", "")
    return report


def _scenario_dir():
    return resources.files("ktlab") / "scenarios"


def list_scenarios():
    return sorted(p.name[:-5] for p in _scenario_dir().iterdir() if p.name.endswith(".json"))


def load_scenario(name):
    path = _scenario_dir() / f"{name}.json"
    if not path.is_file():
        raise ConfigError(f"unknown scenario {name!r}; available: {', '.join(list_scenarios())}")
    return json.loads(path.read_text())


def run_scenario(name, seed=None) -> DiagnosticsReport:
    return run_config(load_scenario(name), seed)
