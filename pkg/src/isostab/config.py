"""Tunable defaults, optionally overridden by a JSON file named in ISOSTAB_CONFIG."""

from __future__ import annotations

import json
import os
from functools import lru_cache
from pathlib import Path

ENV_VAR = "ISOSTAB_CONFIG"

DEFAULTS = {
    "band_limit": 32,
    "star_margin": 0.05,
    "recenter_tol": 1e-9,
    "recenter_max_iter": 20,
    "fraenkel_starts_offset": 0.1,
    "fraenkel_max_iter": 500,
    "fraenkel_ftol": 1e-10,
    "obstacle_gtol": 1e-9,
    "obstacle_max_iter": 50000,
    "cmc_tol": 1e-3,
    # interpolation-bound constants, 1.5 x the largest ratio over the seeded
    # calibration family (see harmonics.calibrate_fuglede)
    "fuglede_constants": {
        "1": 0.8462729616562499,
        "2": 0.4724349928114667,
        "3": 0.8068727943835311,
        "4": 0.9025453120071514,
    },
}


class ConfigError(ValueError):
    pass


@lru_cache(maxsize=None)
def _load(path: str | None) -> dict:
    cfg = json.loads(json.dumps(DEFAULTS))
    if path:
        try:
            user = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(user, dict):
            raise ConfigError("config file must hold a JSON object")
        unknown = set(user) - set(DEFAULTS)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        for key, value in user.items():
            if isinstance(cfg[key], dict):
                cfg[key].update(value)
            else:
                cfg[key] = value
    return cfg


def settings() -> dict:
    return _load(os.environ.get(ENV_VAR) or None)


def get(key: str):
    return settings()[key]


def fuglede_constant(n: int) -> float:
    table = settings()["fuglede_constants"]
    value = table.get(str(n))
    if value is None:
        from .harmonics import calibrate_fuglede

        return calibrate_fuglede(n)
    return float(value)
