"""Flat key=value experiment configuration files.

One ``key = value`` pair per line; ``#`` starts a comment; unknown keys are
rejected.  Every run echoes the fully resolved configuration next to its
results, and the sha256 of that canonical echo identifies the run.
"""

from __future__ import annotations

import hashlib
from dataclasses import fields

import numpy as np

from .experiments import METHODS, SYSTEMS, ExperimentConfig, default_config
from .noise import FAMILIES


class ConfigError(ValueError):
    """Config parse/validation failure with file position."""

    def __init__(self, message: str, line: int | None = None,
                 column: int | None = None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f" (line {line}" + (f", column {column}" if column else "") + ")"
        super().__init__(message + where)


def _parse_bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _parse_float(text: str) -> float:
    t = text.strip().lower()
    if t in ("inf", "+inf", "infinity"):
        return float("inf")
    return float(text)


_SCHEMA: dict[str, type | object] = {
    "system": str, "method": str, "noise": str,
    "alpha": _parse_float, "snr_db": _parse_float,
    "n_train": int, "n_test": int, "trials": int, "seed": int,
    "a_s": _parse_float, "a_u": _parse_float,
    "sigma2_s": _parse_float, "sigma2_omega": _parse_float,
    "sigma2_y": _parse_float, "eta_k1": _parse_float, "eta_k2": _parse_float,
    "rho_min": _parse_float, "n_hidden": int, "embed_dim": int,
    "epochs": int, "batch_len": int,
    "infer_sigma2_y": _parse_float, "infer_sigma2_s": _parse_float,
    "q_process": _parse_float, "dict_budget": int, "coherence": _parse_float,
    "gram_cache": _parse_bool, "save_model": _parse_bool,
}

#: config-file key for ExperimentConfig.noise_family
_ALIASES = {"noise": "noise_family"}


def parse_config_text(text: str) -> dict:
    """Parse config text into typed values; raises ConfigError with position."""
    values: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {line.strip()!r}",
                              line=lineno, column=len(line) - len(line.lstrip()) + 1)
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in _SCHEMA:
            raise ConfigError(f"unknown key {key!r}", line=lineno, column=1)
        if key in values:
            raise ConfigError(f"duplicate key {key!r}", line=lineno, column=1)
        caster = _SCHEMA[key]
        try:
            values[key] = caster(value)
        except ValueError as exc:
            raise ConfigError(f"bad value for {key!r}: {exc}",
                              line=lineno, column=line.index("=") + 2) from None
    return values


def load_config(path, seed_override: int | None = None) -> ExperimentConfig:
    """Read a config file and resolve it against per-system defaults."""
    with open(path) as fh:
        values = parse_config_text(fh.read())
    if "system" not in values:
        raise ConfigError("missing required key 'system'")
    system = values.pop("system")
    if system not in SYSTEMS:
        raise ConfigError(f"unknown system {system!r}; choose from {SYSTEMS}")
    method = values.pop("method", "fbf")
    if method not in METHODS:
        raise ConfigError(f"unknown method {method!r}; choose from {METHODS}")
    if "noise" in values and values["noise"] not in FAMILIES:
        raise ConfigError(f"unknown noise {values['noise']!r}; choose from {FAMILIES}")
    kwargs = {_ALIASES.get(k, k): v for k, v in values.items()}
    if seed_override is not None:
        kwargs["seed"] = seed_override
    try:
        return default_config(system, method, **kwargs)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def resolved_text(cfg: ExperimentConfig) -> str:
    """Canonical echo of a resolved configuration (stable key order)."""
    back = {v: k for k, v in _ALIASES.items()}
    lines = []
    for f in fields(cfg):
        key = back.get(f.name, f.name)
        v = getattr(cfg, f.name)
        if isinstance(v, bool):
            v = "true" if v else "false"
        elif isinstance(v, float):
            v = "inf" if np.isinf(v) else f"{v:.17g}"
        lines.append(f"{key} = {v}")
    return "\n".join(lines) + "\n"


def config_hash(cfg: ExperimentConfig) -> str:
    return hashlib.sha256(resolved_text(cfg).encode()).hexdigest()[:16]
