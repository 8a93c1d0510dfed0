"""2D shape calculus toolkit: flow operators, shape derivatives, adjoint checks."""

from ._shapecalc import (
    Config,
    ConfigError,
    Problem,
    config_reference,
    load_config,
    parse_config,
    radial_oracles,
    verify,
)

__all__ = [
    "Config",
    "ConfigError",
    "Problem",
    "config_reference",
    "load_config",
    "parse_config",
    "radial_oracles",
    "verify",
]
