"""Biharmonic map heat flow numerics."""

import json

from . import _core
from ._core import (
    BihflowError,
    apply_G,
    bmo_seminorm,
    default_config,
    dpi,
    eval_kernel,
    eval_profile,
    kernel_mass,
    parse_config,
    project,
    suite_ids,
)

__version__ = _core.__version__


def certify(estimate, dim=1, order=0, tol=1e-12):
    """Bound certificate for estimate '2.2', '2.3', '2.4' or '2.5' as a dict."""
    return json.loads(_core.certify_json(estimate, dim, order, tol))


def config_dict(text):
    return json.loads(_core.config_json(text))


def evolve(config):
    """Solve from INI text. Returns (times, frames, diagnostics); frames has shape (F, l, M, ...)."""
    times, frames, diag = _core.evolve(config)
    return times, frames, json.loads(diag)


def run_suite(suite, config, out_dir):
    return json.loads(_core.run_suite(suite, config, str(out_dir)))


__all__ = [
    "BihflowError",
    "apply_G",
    "bmo_seminorm",
    "certify",
    "config_dict",
    "default_config",
    "dpi",
    "eval_kernel",
    "eval_profile",
    "evolve",
    "kernel_mass",
    "parse_config",
    "project",
    "run_suite",
    "suite_ids",
]
