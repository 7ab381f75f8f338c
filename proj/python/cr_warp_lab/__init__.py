"""Numerical checks of Chen-type inequalities for CR-warped products."""

import json

from . import _core
from ._core import (
    REPORT_SCHEMA,
    ConfigError,
    DegenerateInput,
    DomainError,
    Error,
    ParityError,
    ParseError,
    chen_original,
    coeff_identities,
    eval_expr,
    gallery_keys,
    gallery_parameters,
    inequality_i,
    inequality_ii,
    lemma1_check,
    tilde_tau_cr,
)

__all__ = [
    "REPORT_SCHEMA",
    "ConfigError",
    "DegenerateInput",
    "DomainError",
    "Error",
    "ParityError",
    "ParseError",
    "chen_original",
    "coeff_identities",
    "eval_expr",
    "evaluate_gallery",
    "gallery_keys",
    "gallery_parameters",
    "inequality_i",
    "inequality_ii",
    "lemma1_check",
    "lemma_suite",
    "run_scenario",
    "tilde_tau_cr",
]


def evaluate_gallery(key, params=None, seed=None):
    """Report (dict) for one gallery point."""
    return json.loads(_core.evaluate_gallery(key, dict(params or {}), seed))


def run_scenario(scenario):
    """Run a scenario given as a dict, JSON text, or path-like to a JSON file."""
    if isinstance(scenario, dict):
        text = json.dumps(scenario)
    elif hasattr(scenario, "read_text"):
        text = scenario.read_text()
    else:
        text = str(scenario)
    return json.loads(_core.run_scenario(text))


def lemma_suite(seed=1, count=1000):
    return json.loads(_core.lemma_suite(seed, count))
