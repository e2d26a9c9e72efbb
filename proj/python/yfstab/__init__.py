"""Stability of asymptotic fields: positive-metric contradiction engine and
indefinite-metric counterexample (Python front end to the C++ core)."""

import json

from . import _core
from ._core import (
    StabilityEngine,
    YfstabError,
    boundary_value_pairing,
    in_out_difference,
    off_shellness,
    omega,
    p_factor,
    principal_value,
    smear_mass_shell,
    witness_gram,
)

__version__ = _core.__version__

DEFAULT_RHO = {"density": [{"interval": [2.56, 5.76], "coeffs": [1.0]}]}


def kl_norm(engine, n, rho=None):
    return engine.kl_norm(n, json.dumps(DEFAULT_RHO if rho is None else rho))


def decay_amplitude(**kwargs):
    return json.loads(_core.decay_amplitude(**kwargs))


def preset(name):
    return json.loads(_core.preset(name))


def resolve_config(doc):
    return json.loads(_core.resolve_config(json.dumps(doc)))


def run(doc):
    summary, files = _core.run(json.dumps(doc))
    return json.loads(summary), files


__all__ = [
    "StabilityEngine",
    "YfstabError",
    "boundary_value_pairing",
    "decay_amplitude",
    "in_out_difference",
    "kl_norm",
    "off_shellness",
    "omega",
    "p_factor",
    "preset",
    "principal_value",
    "resolve_config",
    "run",
    "smear_mass_shell",
    "witness_gram",
]
