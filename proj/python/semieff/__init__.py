"""Python access to the semieff core."""

from ._semieff import (
    ConfigError,
    DomainError,
    Error,
    PreconditionError,
    check_path,
    conditioning_demo,
    efficiency,
    godambe,
    mc,
    models,
)

__all__ = [
    "ConfigError",
    "DomainError",
    "Error",
    "PreconditionError",
    "check_path",
    "conditioning_demo",
    "efficiency",
    "godambe",
    "mc",
    "models",
]
