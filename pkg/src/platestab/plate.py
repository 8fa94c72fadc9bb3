"""Geometry, physics parameters, and mode bookkeeping.

The plate occupies the rectangle (0, pi) x (-l, l): hinged on the two short
edges, free on the two long ones.  Modes separate as

    w(x, y) = profile(y) * sin(m x)

with the y-profile either even (longitudinal, vertical deck motion) or odd
(torsional, twisting deck motion).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

DEFAULT_HALF_WIDTH = math.pi / 150.0
DEFAULT_SIGMA = 0.2
DEFAULT_PRESTRESS = 0.48
DEFAULT_STIFFNESS = 3.0

#: L2 normalization of a profile: integral of profile^2 over [-l, l].
#: Chosen so that the full mode w has unit L2 norm on the rectangle.
PROFILE_NORM_SQ = 2.0 / math.pi


class PlateModelError(Exception):
    """Base class for numeric failures raised by this package."""


class PreconditionError(PlateModelError):
    """The requested computation does not apply to the given inputs."""


class Parity(Enum):
    """Symmetry of the y-profile."""

    LONGITUDINAL = "longitudinal"  # even profile
    TORSIONAL = "torsional"        # odd profile


class ProfileRegime(Enum):
    """Character of the companion basis function of a profile.

    The profile equation factors through r^2 = m^2 +- m*sqrt(Lambda).  The
    minus branch is hyperbolic below lambda = m^4, trigonometric above, and
    degenerates to a polynomial exactly at the transition.
    """

    SUBCRITICAL = "subcritical"
    CRITICAL = "critical"
    SUPERCRITICAL = "supercritical"


@dataclass(frozen=True)
class PlateConfig:
    """Plate geometry and physics parameters.

    half_width_l is the dimensionless half width of the deck, poisson_sigma
    the Poisson ratio, prestress_P the compressive edge load, stiffness_S
    the stretching stiffness, damping_delta the viscous damping coefficient.
    """

    half_width_l: float = DEFAULT_HALF_WIDTH
    poisson_sigma: float = DEFAULT_SIGMA
    prestress_P: float = DEFAULT_PRESTRESS
    stiffness_S: float = DEFAULT_STIFFNESS
    damping_delta: float = 0.0

    def __post_init__(self) -> None:
        if not (0.0 < self.poisson_sigma < 0.5):
            raise ValueError(
                f"poisson_sigma must lie in (0, 1/2), got {self.poisson_sigma}"
            )
        if self.half_width_l <= 0.0:
            raise ValueError(f"half_width_l must be positive, got {self.half_width_l}")
        if self.stiffness_S <= 0.0:
            raise ValueError(f"stiffness_S must be positive, got {self.stiffness_S}")
        if self.prestress_P < 0.0:
            raise ValueError(f"prestress_P must be nonnegative, got {self.prestress_P}")
        if self.damping_delta < 0.0:
            raise ValueError(f"damping_delta must be nonnegative, got {self.damping_delta}")


@dataclass(frozen=True)
class ModeIndex:
    """Identifies one separated mode: x-frequency m, profile parity, branch i.

    m counts nodal sets in the x direction; i orders branches of the same
    parity by increasing eigenvalue.
    """

    m: int
    parity: Parity
    i: int = 1

    def __post_init__(self) -> None:
        if self.m < 1:
            raise ValueError(f"m must be a positive integer, got {self.m}")
        if self.i < 1:
            raise ValueError(f"i must be a positive integer, got {self.i}")


@dataclass(frozen=True)
class Eigenpair:
    """One buckling eigenvalue with its normalized profile.

    Lambda is the buckling eigenvalue, lam = m^2 * Lambda the clamped-energy
    eigenvalue of the same mode.  profile_coefficients = (A, B) weight the
    two y-basis functions (see spectrum module); the profile is normalized
    so that the integral of profile^2 over [-l, l] equals 2/pi, and the sign
    is fixed by profile(0) > 0 (even) or profile'(0) > 0 (odd).  residual is
    the scaled characteristic determinant left at the converged root.
    """

    mode: ModeIndex
    Lambda: float
    lam: float
    profile_regime: ProfileRegime
    profile_coefficients: tuple[float, float]
    residual: float
    config: PlateConfig = field(repr=False, default_factory=PlateConfig)

    def __post_init__(self) -> None:
        if self.Lambda <= 0.0:
            raise ValueError(f"Lambda must be positive, got {self.Lambda}")
        if self.lam != self.mode.m**2 * self.Lambda:
            raise ValueError("lam must equal m^2 * Lambda exactly")
        if self.residual < 0.0:
            raise ValueError("residual must be nonnegative")
