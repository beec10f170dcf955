"""Python access to the beamlab normal-form and simulation toolkit."""

import json

from . import _beamlab
from ._beamlab import (
    BeamlabError,
    ConfigError,
    anisotropy,
    bnf_summary,
    exponents,
    simulate,
    tuple_info,
    version,
)

__all__ = [
    "BeamlabError",
    "ConfigError",
    "anisotropy",
    "bnf_summary",
    "drift",
    "exponents",
    "lifespan",
    "simulate",
    "smalldiv",
    "tuple_info",
    "version",
]


def _run(kind, overrides):
    cfg = json.loads(getattr(_beamlab, f"{kind}_defaults")())
    unknown = set(overrides) - set(cfg)
    if unknown:
        raise ConfigError(f"unknown {kind} keys: {sorted(unknown)}")
    cfg.update(overrides)
    return json.loads(getattr(_beamlab, f"{kind}_json")(json.dumps(cfg)))


def lifespan(**overrides):
    """Doubling-time sweep over eps; keyword arguments override the defaults."""
    return _run("lifespan", overrides)


def drift(**overrides):
    """Raw versus modified energy drift along one trajectory."""
    return _run("drift", overrides)


def smalldiv(**overrides):
    """Small-divisor survey over zero-momentum tuples."""
    return _run("smalldiv", overrides)
