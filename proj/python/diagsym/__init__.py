"""Python front end for the diagsym C++ core.

Configs may be given as a dict, a YAML/JSON string, or a path to a file.
Reports come back as dicts.
"""

import json
import os

from . import _core
from ._core import (
    CheckpointError,
    ConfigError,
    DivergenceError,
    Error,
    NumericalError,
    builtin_groups,
    group_elements,
)

__all__ = [
    "CheckpointError", "ConfigError", "DivergenceError", "Error", "NumericalError",
    "builtin_groups", "group_elements", "load_config", "validate", "run",
    "oracle_levels", "evaluate", "symmetry_error",
]

STAGES = ("oracle", "train", "evaluate", "scan", "gradstats", "probe-smoothing")


def _text(config):
    if isinstance(config, dict):
        return json.dumps(config)
    if isinstance(config, os.PathLike) or (isinstance(config, str) and os.path.isfile(config)):
        with open(config) as f:
            return f.read()
    return config


def load_config(config):
    """Canonical config dict with every default filled in."""
    return json.loads(_core.canonical_config(_text(config)))


def validate(config, stage):
    _core.validate_config(_text(config), stage)


def run(stage, config, out, checkpoint=None, quiet=True):
    """Run one pipeline stage; artifacts go under `out`, the report is returned."""
    if stage not in STAGES:
        raise ConfigError(f"unknown stage '{stage}'")
    ck = None if checkpoint is None else os.fspath(checkpoint)
    return json.loads(_core.run_stage(stage, _text(config), os.fspath(out), ck, quiet))


def oracle_levels(config, count=4):
    return _core.oracle_levels(_text(config), count)


def evaluate(config, positions, checkpoint=None):
    ck = None if checkpoint is None else os.fspath(checkpoint)
    return _core.evaluate(_text(config), positions, ck)


def symmetry_error(config, base, resolution=51, checkpoint=None):
    ck = None if checkpoint is None else os.fspath(checkpoint)
    return _core.symmetry_error(_text(config), base, resolution, ck)
