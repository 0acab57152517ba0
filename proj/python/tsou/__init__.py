"""Exact simulation of tempered stable Ornstein-Uhlenbeck processes."""

import json

from ._core import (
    ConfigError,
    DomainError,
    Model,
    NumericError,
    Sampler,
    f_xi_pdf,
    limit_cf,
    mll_pdf,
    mll_sample,
    poisson_mean,
    preset_model,
    pt_density,
    pt_model,
    pt_v1,
    run,
    run_suite,
    simulate_paths,
    transition_cf,
)


def model(preset="pt", lam=1.0, **params):
    """Build a preset model; keyword arguments use the CLI's model keys."""
    return preset_model(json.dumps({"preset": preset, **params}), lam)


__all__ = [
    "ConfigError",
    "DomainError",
    "Model",
    "NumericError",
    "Sampler",
    "f_xi_pdf",
    "limit_cf",
    "mll_pdf",
    "mll_sample",
    "model",
    "poisson_mean",
    "preset_model",
    "pt_density",
    "pt_model",
    "pt_v1",
    "run",
    "run_suite",
    "simulate_paths",
    "transition_cf",
]
