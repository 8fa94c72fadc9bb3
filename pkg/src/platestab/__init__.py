"""Spectrum, modal dynamics, and Floquet stability of a partially hinged plate."""

from .plate import (
    Eigenpair,
    ModeIndex,
    Parity,
    PlateConfig,
    PlateModelError,
    PreconditionError,
    ProfileRegime,
)

__version__ = "0.1.0"

__all__ = [
    "Eigenpair",
    "ModeIndex",
    "Parity",
    "PlateConfig",
    "PlateModelError",
    "PreconditionError",
    "ProfileRegime",
    "__version__",
]
