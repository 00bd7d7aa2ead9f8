"""Stability tests and simulation for fractional-order switching and reset systems."""

import json

from ._fohs import (
    FohsError,
    __version__,
    beta_intervals,
    curly_a,
    find_common_p,
    frac_power,
    gl_coefficients,
    h_beta,
    mittag_leffler,
    phase_difference_sweep,
    simulate_linear,
    stability_margin,
    switching_verdict,
    verify_certificate,
)
from ._fohs import experiment_schema as _experiment_schema
from ._fohs import run_config as _run_config


def experiment_schema():
    """JSON Schema for experiment configs."""
    return json.loads(_experiment_schema())


def run_config(path, command, out_dir=None):
    """Run a CLI command on a config file; returns (exit_code, report)."""
    code, report = _run_config(str(path), command, None if out_dir is None else str(out_dir))
    return code, json.loads(report)


__all__ = [
    "FohsError",
    "__version__",
    "beta_intervals",
    "curly_a",
    "experiment_schema",
    "find_common_p",
    "frac_power",
    "gl_coefficients",
    "h_beta",
    "mittag_leffler",
    "phase_difference_sweep",
    "run_config",
    "simulate_linear",
    "stability_margin",
    "switching_verdict",
    "verify_certificate",
]
