"""Floquet stability of simple modes against a second mode.

After the change of unknowns phi -> m phi, psi -> n psi and the time
rescaling t -> t / (m sqrt(S)), the two-mode system becomes

    w'' + (mu + w^2 + psi^2) w = 0,      mu = (Lambda_mi - P) / S,
    z'' + gamma (nu + w^2 + z^2) z = 0,  nu = (Lambda_nk - P) / S,
                                         gamma = n^2 / m^2.

A simple mode is w solving the Duffing equation w'' + mu w + w^3 = 0; its
linear stability against the second mode is the stability of z = 0 in the
Hill equation z'' + gamma (nu + w(t)^2) z = 0.  With w(0) = 0,
w'(0) = b* = sqrt(2 E0), the coefficient has period T(E0)/2 because w is
odd about its zeros.  The monodromy matrix over that period decides
stability: |trace| < 2 keeps both Floquet multipliers on the unit circle.

Two closed-form tools complement the monodromy computation: the amplitude
and period of the Duffing mode,

    amplitude = sqrt(sqrt(mu^2 + 4 E) - mu),
    T(E) = 4 sqrt(2) * int_0^1 dp / sqrt((Th- p^2 + Th+)(1 - p^2)),

with Th+- = sqrt(mu^2 + 4E) +- mu, and the interval arithmetic of gamma:
stability at large energy is governed by whether gamma falls in

    I_j = (j(2j+1), (j+1)(2j+1))   or   K_j = ((j+1)(2j+1), (j+1)(2j+3)).

A sufficient small-energy certificate sandwiches the Hill coefficient
between consecutive squared harmonics of its own frequency.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import quad, solve_ivp

from .plate import PlateModelError, PreconditionError
from .dynamics import TwoModeSystem

__all__ = [
    "NonPositiveStiffnessParameters",
    "PeriodMismatch",
    "QuadratureError",
    "RescaledSystem",
    "HillProblem",
    "MonodromyResult",
    "StabilityVerdict",
    "GammaClass",
    "IntervalKind",
    "nondimensionalize",
    "duffing_amplitude",
    "duffing_energy",
    "duffing_period",
    "hill_problem",
    "monodromy",
    "classify_gamma",
    "zhukovskii_check",
    "ZhukovskiiVerdict",
    "stability_over_energy",
    "write_stability_scan_csv",
]

#: Reported as Marginal when ||trace| - 2| falls below this band.
MARGINAL_BAND = 1e-7


class NonPositiveStiffnessParameters(PreconditionError):
    """mu or nu is not positive: the prestress reaches an eigenvalue."""


class PeriodMismatch(PlateModelError):
    """The integrated Duffing mode missed its predicted half-period zero."""


class QuadratureError(PlateModelError):
    """The period quadrature did not converge."""


@dataclass(frozen=True)
class RescaledSystem:
    """Parameters of the rescaled two-mode system at a fixed energy.

    E0 is the energy of the rescaled system (original energy divided by S),
    b_star = sqrt(2 E0) the launch velocity of the simple mode, and
    epsilon = mu / b_star the perturbation parameter that is small exactly
    when the energy is large.
    """

    mu: float
    nu: float
    gamma: float
    E0: float

    def __post_init__(self) -> None:
        if self.mu <= 0.0 or self.nu <= 0.0:
            raise NonPositiveStiffnessParameters(
                f"mu={self.mu}, nu={self.nu} must both be positive"
            )
        if self.gamma <= 0.0:
            raise ValueError("gamma must be positive")
        if self.E0 <= 0.0:
            raise ValueError("E0 must be positive")

    @property
    def b_star(self) -> float:
        return math.sqrt(2.0 * self.E0)

    @property
    def epsilon(self) -> float:
        return self.mu / self.b_star


def nondimensionalize(sys: TwoModeSystem, E0_original: float) -> RescaledSystem:
    """Rescaled parameters of a two-mode system at an original-variable energy.

    Raises NonPositiveStiffnessParameters unless P < min of both eigenvalues.
    """
    if E0_original <= 0.0:
        raise ValueError("E0_original must be positive")
    return RescaledSystem(
        mu=sys.mu, nu=sys.nu, gamma=sys.gamma, E0=E0_original / sys.S
    )


def duffing_amplitude(mu: float, E: float) -> float:
    """Turning-point amplitude of the Duffing mode with energy E."""
    if mu <= 0.0:
        raise ValueError("mu must be positive")
    if E <= 0.0:
        raise ValueError("E must be positive")
    return math.sqrt(math.sqrt(mu * mu + 4.0 * E) - mu)


def duffing_energy(mu: float, amplitude: float) -> float:
    """Energy of the Duffing mode at a given turning-point amplitude."""
    a2 = amplitude * amplitude
    return 0.5 * mu * a2 + 0.25 * a2 * a2


def duffing_period(mu: float, E: float) -> float:
    """Period T(E) of the Duffing mode, strictly decreasing in E.

    The quarter-circle substitution p = sin(theta) removes the endpoint
    singularity, leaving a smooth positive integrand.
    """
    if mu <= 0.0:
        raise ValueError("mu must be positive")
    if E <= 0.0:
        raise ValueError("E must be positive")
    root = math.sqrt(mu * mu + 4.0 * E)
    th_minus = root - mu
    th_plus = root + mu

    def integrand(theta: float) -> float:
        s = math.sin(theta)
        return 1.0 / math.sqrt(th_minus * s * s + th_plus)

    val, err = quad(integrand, 0.0, 0.5 * math.pi, epsabs=0.0, epsrel=1e-12, limit=200)
    if not math.isfinite(val) or err > 1e-8 * abs(val):
        raise QuadratureError(f"period quadrature error estimate {err:g}")
    return 4.0 * math.sqrt(2.0) * val


@dataclass(frozen=True)
class HillProblem:
    """Periodic-coefficient problem z'' + a(t) z = 0 for one simple mode.

    period is the coefficient period T(E0)/2; coefficient evaluates a(t)
    from a dense solution of the underlying Duffing mode; inf_coefficient
    = gamma * nu is the exact lower bound of a.
    """

    period: float
    coefficient: Callable[[float], float]
    inf_coefficient: float


class StabilityVerdict(Enum):
    STABLE = "stable"
    UNSTABLE = "unstable"
    MARGINAL = "marginal"


@dataclass(frozen=True)
class MonodromyResult:
    """Fundamental matrix of the Hill equation over one coefficient period."""

    matrix: np.ndarray
    trace: float
    multipliers: tuple[complex, complex]
    det_residual: float
    verdict: StabilityVerdict


def _verdict_from_trace(trace: float) -> StabilityVerdict:
    gap = abs(trace) - 2.0
    if abs(gap) < MARGINAL_BAND:
        return StabilityVerdict.MARGINAL
    return StabilityVerdict.UNSTABLE if gap > 0.0 else StabilityVerdict.STABLE


def _multipliers(trace: float) -> tuple[complex, complex]:
    disc = cmath.sqrt(complex(trace * trace - 4.0))
    return ((trace + disc) / 2.0, (trace - disc) / 2.0)


def hill_problem(resc: RescaledSystem, rel_tol: float = 1e-12) -> HillProblem:
    """Build the Hill problem of a rescaled system, with a dense coefficient."""
    T_half = 0.5 * duffing_period(resc.mu, resc.E0)
    mu = resc.mu
    b = resc.b_star

    def w_rhs(t, y):
        w, wd = y
        return (wd, -(mu + w * w) * w)

    sol = solve_ivp(
        w_rhs,
        (0.0, T_half),
        (0.0, b),
        method="RK45",
        rtol=rel_tol,
        atol=1e-12 * max(1.0, b),
        dense_output=True,
    )
    if not sol.success:
        raise PlateModelError(f"Duffing integration failed: {sol.message}")
    gamma, nu = resc.gamma, resc.nu

    def coefficient(t: float) -> float:
        tau = math.fmod(t, T_half)
        if tau < 0.0:
            tau += T_half
        w = float(sol.sol(tau)[0])
        return gamma * (nu + w * w)

    return HillProblem(period=T_half, coefficient=coefficient, inf_coefficient=gamma * nu)


def monodromy(resc: RescaledSystem, rel_tol: float = 1e-12) -> MonodromyResult:
    """Monodromy matrix of the Hill equation over one coefficient period.

    Integrates the Duffing mode from its zero together with the two basis
    solutions of the z-equation.  Raises PeriodMismatch when the mode does
    not return to zero at the quadrature half period.
    """
    T_half = 0.5 * duffing_period(resc.mu, resc.E0)
    mu, gamma, nu, b = resc.mu, resc.gamma, resc.nu, resc.b_star

    def rhs(t, y):
        w, wd, z1, z1d, z2, z2d = y
        a = gamma * (nu + w * w)
        return (wd, -(mu + w * w) * w, z1d, -a * z1, z2d, -a * z2)

    atol = np.array([1e-12 * max(1.0, b)] * 2 + [1e-13] * 4)
    sol = solve_ivp(
        rhs,
        (0.0, T_half),
        (0.0, b, 1.0, 0.0, 0.0, 1.0),
        method="RK45",
        rtol=rel_tol,
        atol=atol,
    )
    if not sol.success:
        raise PlateModelError(f"monodromy integration failed: {sol.message}")
    w_end = float(sol.y[0, -1])
    if abs(w_end) > 1e-8 * b:
        raise PeriodMismatch(
            f"|w(T/2)| = {abs(w_end):.3e} exceeds 1e-8 * b_star = {1e-8 * b:.3e}"
        )
    z1, z1d, z2, z2d = (float(sol.y[k, -1]) for k in (2, 3, 4, 5))
    matrix = np.array([[z1, z2], [z1d, z2d]])
    trace = z1 + z2d
    det_residual = abs(float(np.linalg.det(matrix)) - 1.0)
    return MonodromyResult(
        matrix=matrix,
        trace=trace,
        multipliers=_multipliers(trace),
        det_residual=det_residual,
        verdict=_verdict_from_trace(trace),
    )


class IntervalKind(Enum):
    STABILITY = "stability"      # gamma in I_j
    INSTABILITY = "instability"  # gamma in K_j
    BOUNDARY = "boundary"


@dataclass(frozen=True)
class GammaClass:
    gamma: float
    kind: IntervalKind
    j: int | None
    endpoints: tuple[float, float] | None


def classify_gamma(gamma: float, tol: float = 1e-12) -> GammaClass:
    """Locate gamma within the interval ladder I_j / K_j.

    I_j = (j(2j+1), (j+1)(2j+1)) and K_j = ((j+1)(2j+1), (j+1)(2j+3)) tile
    the positive axis; shared endpoints classify as Boundary.
    """
    if gamma <= 0.0:
        raise ValueError("gamma must be positive")
    scale = max(1.0, gamma)
    j = 0
    while True:
        lo_i = j * (2 * j + 1)
        mid = (j + 1) * (2 * j + 1)
        hi_k = (j + 1) * (2 * j + 3)
        for endpoint in (lo_i, mid, hi_k):
            if abs(gamma - endpoint) <= tol * scale:
                return GammaClass(gamma, IntervalKind.BOUNDARY, None, None)
        if lo_i < gamma < mid:
            return GammaClass(gamma, IntervalKind.STABILITY, j, (float(lo_i), float(mid)))
        if mid < gamma < hi_k:
            return GammaClass(gamma, IntervalKind.INSTABILITY, j, (float(mid), float(hi_k)))
        if gamma < hi_k:
            return GammaClass(gamma, IntervalKind.BOUNDARY, None, None)
        j += 1


class ZhukovskiiVerdict(Enum):
    STABLE_CERTIFIED = "stable_certified"
    INCONCLUSIVE = "inconclusive"


def zhukovskii_check(mu: float, nu: float, gamma: float, E: float) -> ZhukovskiiVerdict:
    """Sufficient stability certificate sandwiching the Hill coefficient.

    Certifies stability when h^2 w^2 <= gamma nu and
    gamma (nu + amplitude^2) <= (h+1)^2 w^2 for some integer h >= 0, where
    w = 2 pi / T(E).  The criterion is sufficient, never necessary.
    """
    if mu <= 0.0 or nu <= 0.0:
        raise ValueError("mu and nu must be positive")
    alpha = duffing_amplitude(mu, E)
    omega = 2.0 * math.pi / duffing_period(mu, E)
    a_min = gamma * nu
    a_max = gamma * (nu + alpha * alpha)
    h = math.floor(math.sqrt(a_min) / omega)
    if h * h * omega * omega <= a_min and a_max <= (h + 1) ** 2 * omega * omega:
        return ZhukovskiiVerdict.STABLE_CERTIFIED
    return ZhukovskiiVerdict.INCONCLUSIVE


@dataclass(frozen=True)
class StabilityPoint:
    E: float
    verdict: StabilityVerdict
    abs_trace: float


def stability_over_energy(
    sys: TwoModeSystem, E_grid: Sequence[float]
) -> list[StabilityPoint]:
    """Map the monodromy verdict over an increasing grid of original energies."""
    grid = list(E_grid)
    if not grid:
        raise ValueError("energy grid must be nonempty")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("energy grid must be strictly increasing")
    out = []
    for E in grid:
        resc = nondimensionalize(sys, E)
        res = monodromy(resc)
        out.append(StabilityPoint(E=E, verdict=res.verdict, abs_trace=abs(res.trace)))
    return out


def _fmt(x: float) -> str:
    return format(float(x), ".17e")


def write_stability_scan_csv(
    sys: TwoModeSystem,
    points: Sequence[StabilityPoint],
    path,
    header_lines: Sequence[str] = (),
) -> None:
    lines = list(header_lines)
    lines.append("E,mu,nu,gamma,trace,verdict")
    for pt in points:
        lines.append(
            ",".join(
                [
                    _fmt(pt.E),
                    _fmt(sys.mu),
                    _fmt(sys.nu),
                    _fmt(sys.gamma),
                    _fmt(pt.abs_trace),
                    pt.verdict.value,
                ]
            )
        )
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
