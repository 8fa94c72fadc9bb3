"""Amplitude sweeps and damping thresholds for mode-instability detection.

Sweeps run on the rescaled system

    phi'' + d phi' + (mu + phi^2 + psi^2) phi = 0
    psi'' + d psi' + gamma (nu + phi^2 + psi^2) psi = 0

with initial data phi(0) = u0, psi(0) = u0/1000, velocities zero: the
carrier starts with almost all of the energy and the perturbation a factor
1000 below it.  A run is flagged unstable when the growth factor

    G = max over [0, T] of |psi| / |psi(0)|

reaches the threshold (default 20 within T = 60).  Measured burst levels
saturate around 50 for the weakest detected resonances and 100-1000 for
strong ones, while bounded beating just outside a resonance stays near 10,
so 20 separates the two with margin on both sides; sweep verdicts are
tested for invariance under halving and doubling of the threshold.

Damping values in this module are coefficients of the rescaled equations
above.  One unit of rescaled damping equals m sqrt(S) units of the damping
coefficient of the original plate equation; a system's own delta is mapped
through that factor when a sweep does not override it.

Reported energies use the conserved energy of the rescaled system,

    E = phi'^2 / 2 + psi'^2 / (2 gamma) + mu phi^2 / 2 + nu psi^2 / 2
        + (phi^2 + psi^2)^2 / 4,

which equals the mechanical energy of the original system divided by S.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.integrate import solve_ivp

from .plate import PlateModelError, PreconditionError
from .dynamics import TwoModeSystem
from .floquet import IntervalKind, classify_gamma

__all__ = [
    "NotInstabilityClass",
    "NoOnsetFound",
    "PreconditionFailed",
    "ScanSpec",
    "ScanSample",
    "ScanReport",
    "OnsetResult",
    "ENERGY_CONVENTION_NOTE",
    "rescaled_energy",
    "integrate_rescaled",
    "growth_factor",
    "find_instability_intervals",
    "instability_onset",
    "damping_threshold",
    "write_scan_report",
    "write_samples_csv",
]

ENERGY_CONVENTION_NOTE = (
    "energies are conserved values of the rescaled system "
    "(original mechanical energy divided by S); initial data "
    "phi(0)=u0, psi(0)=u0/ratio, zero velocities"
)


class NotInstabilityClass(PreconditionError):
    """gamma does not lie in an instability interval K_j."""


class NoOnsetFound(PreconditionError):
    """No persistent instability tail below the search ceiling."""


class PreconditionFailed(PreconditionError):
    """A required undamped/damped bracket for bisection does not hold."""


@dataclass(frozen=True)
class ScanSpec:
    """Sweep description; the carrier is the system's primary mode."""

    system: TwoModeSystem
    u0_range: tuple[float, float]
    grid_points: int = 200
    perturbation_ratio: float = 1e-3
    horizon_T: float = 60.0
    growth_threshold: float = 20.0
    rel_tol: float = 1e-9
    abs_tol: float = 1e-11

    def __post_init__(self) -> None:
        lo, hi = self.u0_range
        if not (0.0 < lo < hi):
            raise ValueError("u0_range must be an increasing pair of positive reals")
        if self.grid_points < 2:
            raise ValueError("grid_points must be at least 2")
        if not (0.0 < self.perturbation_ratio < 0.1):
            raise ValueError("perturbation_ratio must be small and positive")
        if self.horizon_T <= 0.0 or self.growth_threshold <= 1.0:
            raise ValueError("horizon_T and growth_threshold must be positive")


@dataclass(frozen=True)
class ScanSample:
    u0: float
    E: float
    growth: float
    unstable: bool


@dataclass(frozen=True)
class ScanReport:
    spec: ScanSpec
    samples: list[ScanSample]
    intervals: list[tuple[float, float]]
    interval_energies: list[tuple[float, float]]
    convention_note: str = ENERGY_CONVENTION_NOTE


@dataclass(frozen=True)
class OnsetResult:
    u0: float
    E: float


def rescaled_energy(y, mu: float, nu: float, gamma: float) -> float:
    """Conserved energy of the rescaled system for state (phi, phi', psi, psi')."""
    phi, phid, psi, psid = (float(v) for v in y)
    r2 = phi * phi + psi * psi
    return (
        0.5 * phid * phid
        + 0.5 * psid * psid / gamma
        + 0.5 * mu * phi * phi
        + 0.5 * nu * psi * psi
        + 0.25 * r2 * r2
    )


def _rescaled_damping(system: TwoModeSystem, delta_rescaled: float | None = None) -> float:
    if delta_rescaled is not None:
        return delta_rescaled
    return system.delta / (system.m * math.sqrt(system.S))


def integrate_rescaled(
    system: TwoModeSystem,
    u0: float,
    spec_or_none=None,
    *,
    horizon: float = 60.0,
    perturbation_ratio: float = 1e-3,
    delta_rescaled: float | None = None,
    rel_tol: float = 1e-9,
    abs_tol: float = 1e-11,
    n_samples: int = 2401,
):
    """Integrate the rescaled system from the standard perturbed data.

    Returns (times, states) with states rows (phi, phi', psi, psi').
    delta_rescaled overrides the damping; otherwise the system's original
    delta is mapped through 1 / (m sqrt(S)).
    """
    mu, nu, gamma = system.mu, system.nu, system.gamma
    d = _rescaled_damping(system, delta_rescaled)
    y0 = (u0, 0.0, u0 * perturbation_ratio, 0.0)

    def rhs(t, y):
        phi, phid, psi, psid = y
        r2 = phi * phi + psi * psi
        return (
            phid,
            -d * phid - (mu + r2) * phi,
            psid,
            -d * psid - gamma * (nu + r2) * psi,
        )

    sol = solve_ivp(
        rhs,
        (0.0, horizon),
        y0,
        method="RK45",
        rtol=rel_tol,
        atol=abs_tol,
        t_eval=np.linspace(0.0, horizon, n_samples),
    )
    if not sol.success:
        raise PlateModelError(f"rescaled integration failed: {sol.message}")
    return sol.t, sol.y.T


def growth_factor(
    system: TwoModeSystem, u0: float, spec: ScanSpec
) -> tuple[float, float]:
    """Growth factor G and rescaled energy E of one perturbed run."""
    if u0 <= 0.0:
        raise ValueError("u0 must be positive")
    _, states = integrate_rescaled(
        system,
        u0,
        horizon=spec.horizon_T,
        perturbation_ratio=spec.perturbation_ratio,
        rel_tol=spec.rel_tol,
        abs_tol=spec.abs_tol,
    )
    psi0 = abs(states[0, 2])
    G = float(np.max(np.abs(states[:, 2])) / psi0)
    E = rescaled_energy(states[0], system.mu, system.nu, system.gamma)
    return G, E


def _grid_growth(
    system: TwoModeSystem,
    u0s: np.ndarray,
    spec: ScanSpec,
    delta_rescaled: float | None = None,
    chunk: int = 64,
) -> list[tuple[float, float]]:
    """Growth factors over a u0 grid, integrated as one batched system.

    Grid members are independent copies of the same equations, so they
    stack into a single vector field; one adaptive solve per chunk replaces
    hundreds of scalar solves.  The batch shares step-size control, which
    only tightens individual accuracy.
    """
    mu, nu, gamma = system.mu, system.nu, system.gamma
    d = _rescaled_damping(system, delta_rescaled)
    r = spec.perturbation_ratio
    out: list[tuple[float, float]] = []
    for start in range(0, len(u0s), chunk):
        block = np.asarray(u0s[start : start + chunk], dtype=float)
        n = block.size
        y0 = np.zeros((n, 4))
        y0[:, 0] = block
        y0[:, 2] = r * block

        def rhs(t, y):
            Y = y.reshape(n, 4)
            phi, phid, psi, psid = Y[:, 0], Y[:, 1], Y[:, 2], Y[:, 3]
            r2 = phi * phi + psi * psi
            out_arr = np.empty_like(Y)
            out_arr[:, 0] = phid
            out_arr[:, 1] = -d * phid - (mu + r2) * phi
            out_arr[:, 2] = psid
            out_arr[:, 3] = -d * psid - gamma * (nu + r2) * psi
            return out_arr.ravel()

        sol = solve_ivp(
            rhs,
            (0.0, spec.horizon_T),
            y0.ravel(),
            method="RK45",
            rtol=spec.rel_tol,
            atol=spec.abs_tol,
            t_eval=np.linspace(0.0, spec.horizon_T, 2401),
        )
        if not sol.success:
            raise PlateModelError(f"batched scan integration failed: {sol.message}")
        Y = sol.y.reshape(n, 4, -1)
        psi_max = np.max(np.abs(Y[:, 2, :]), axis=1)
        for i in range(n):
            G = float(psi_max[i] / (r * block[i]))
            E = rescaled_energy((block[i], 0.0, r * block[i], 0.0), mu, nu, gamma)
            out.append((G, E))
    return out


def _flag(system: TwoModeSystem, u0: float, spec: ScanSpec, delta_rescaled: float | None = None) -> bool:
    _, states = integrate_rescaled(
        system,
        u0,
        horizon=spec.horizon_T,
        perturbation_ratio=spec.perturbation_ratio,
        delta_rescaled=delta_rescaled,
        rel_tol=spec.rel_tol,
        abs_tol=spec.abs_tol,
    )
    psi0 = abs(states[0, 2])
    return float(np.max(np.abs(states[:, 2])) / psi0) >= spec.growth_threshold


def _bisect_flag(system, spec, lo, hi, flag_lo, width, delta_rescaled=None):
    """Refine the flag transition between lo and hi to the given width."""
    while hi - lo > width:
        mid = 0.5 * (lo + hi)
        if _flag(system, mid, spec, delta_rescaled) == flag_lo:
            lo = mid
        else:
            hi = mid
    return lo, hi


def _thread_count() -> int:
    raw = os.environ.get("PLATESTAB_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def find_instability_intervals(spec: ScanSpec) -> ScanReport:
    """Sweep u0, flag unstable runs, and refine maximal runs of instability.

    Interval endpoints are bisected to width 1e-2; endpoint energies are
    reported under the module's energy convention.
    """
    system = spec.system
    lo, hi = spec.u0_range
    grid = np.linspace(lo, hi, spec.grid_points)

    workers = _thread_count()
    if workers > 1:
        chunks = np.array_split(grid, workers)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = pool.map(lambda block: _grid_growth(system, block, spec), chunks)
        pairs = [p for block in results for p in block]
    else:
        pairs = _grid_growth(system, grid, spec)
    samples = [
        ScanSample(u0=float(u), E=E, growth=G, unstable=G >= spec.growth_threshold)
        for u, (G, E) in zip(grid, pairs)
    ]

    intervals: list[tuple[float, float]] = []
    k = 0
    n = len(samples)
    while k < n:
        if not samples[k].unstable:
            k += 1
            continue
        start = k
        while k + 1 < n and samples[k + 1].unstable:
            k += 1
        u_lo = samples[start].u0
        u_hi = samples[k].u0
        if start > 0:
            a, b = _bisect_flag(system, spec, samples[start - 1].u0, u_lo, False, 1e-2)
            u_lo = b
        if k + 1 < n:
            a, b = _bisect_flag(system, spec, u_hi, samples[k + 1].u0, True, 1e-2)
            u_hi = a
        intervals.append((u_lo, u_hi))
        k += 1

    energies = []
    for u_lo, u_hi in intervals:
        r = spec.perturbation_ratio
        e_lo = rescaled_energy((u_lo, 0.0, r * u_lo, 0.0), system.mu, system.nu, system.gamma)
        e_hi = rescaled_energy((u_hi, 0.0, r * u_hi, 0.0), system.mu, system.nu, system.gamma)
        energies.append((e_lo, e_hi))
    return ScanReport(
        spec=spec, samples=samples, intervals=intervals, interval_energies=energies
    )


def instability_onset(
    system: TwoModeSystem, spec: ScanSpec, search_ceiling: float
) -> OnsetResult:
    """Least u0 above which the unstable flag holds persistently.

    Requires a torsional carrier with gamma in an instability interval K_j,
    which guarantees the flag for large energy.  The last stable-to-unstable
    transition on the grid is refined by bisection to width 1e-2.
    """
    from .plate import Parity

    if system.primary.parity is not Parity.TORSIONAL:
        raise PreconditionFailed("onset search requires the torsional carrier")
    cls = classify_gamma(system.gamma)
    if cls.kind is not IntervalKind.INSTABILITY:
        raise NotInstabilityClass(
            f"gamma = {system.gamma:g} lies in {cls.kind.value}, not in any K_j"
        )
    lo = spec.u0_range[0]
    if search_ceiling <= lo:
        raise ValueError("search_ceiling must exceed the range start")
    grid = np.linspace(lo, search_ceiling, spec.grid_points)
    pairs = _grid_growth(system, grid, spec)
    flags = [G >= spec.growth_threshold for G, _ in pairs]
    if not flags[-1]:
        raise NoOnsetFound(
            f"flag not set at the ceiling u0 = {search_ceiling:g}; raise the ceiling"
        )
    last_stable = None
    for k in range(len(grid) - 1, -1, -1):
        if not flags[k]:
            last_stable = k
            break
    if last_stable is None:
        raise NoOnsetFound(
            "flag already set at the start of the range; lower the range"
        )
    _, u_onset = _bisect_flag(
        system, spec, float(grid[last_stable]), float(grid[last_stable + 1]), False, 1e-2
    )
    r = spec.perturbation_ratio
    E = rescaled_energy((u_onset, 0.0, r * u_onset, 0.0), system.mu, system.nu, system.gamma)
    return OnsetResult(u0=u_onset, E=E)


def damping_threshold(
    system: TwoModeSystem, u0: float, spec: ScanSpec, delta_hi: float
) -> float:
    """Minimal rescaled-system damping that clears the instability flag.

    Bisects the damping coefficient of the rescaled equations in
    [0, delta_hi] against the damped flag to relative width 1e-2.  Requires
    the undamped run unstable and the delta_hi run stable.  Multiply by
    m sqrt(S) for the equivalent original-variable coefficient.
    """
    if delta_hi <= 0.0:
        raise ValueError("delta_hi must be positive")
    if not _flag(system, u0, spec, delta_rescaled=0.0):
        raise PreconditionFailed(f"undamped run at u0 = {u0:g} is already stable")
    if _flag(system, u0, spec, delta_rescaled=delta_hi):
        raise PreconditionFailed(f"delta_hi = {delta_hi:g} does not stabilize u0 = {u0:g}")
    lo, hi = 0.0, delta_hi
    while (hi - lo) > 1e-2 * hi:
        mid = 0.5 * (lo + hi)
        if _flag(system, u0, spec, delta_rescaled=mid):
            lo = mid
        else:
            hi = mid
    return hi


# ---------------------------------------------------------------------------
# Reporting
# ---------------------------------------------------------------------------


def _fmt(x: float) -> str:
    return format(float(x), ".17e")


def write_samples_csv(report: ScanReport, path, header_lines: Sequence[str] = ()) -> None:
    lines = list(header_lines)
    lines.append("u0,E,growth,unstable")
    for s in report.samples:
        lines.append(
            ",".join([_fmt(s.u0), _fmt(s.E), _fmt(s.growth), "1" if s.unstable else "0"])
        )
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def write_scan_report(report: ScanReport, path, header_lines: Sequence[str] = ()) -> None:
    """Structured-text report: spec echo, samples, intervals, convention note."""
    spec = report.spec
    sysd = spec.system
    lines = ["[meta]"]
    lines += [s.lstrip("# ") for s in header_lines]
    lines += [
        "[spec]",
        f"carrier_m = {sysd.m}",
        f"carrier_parity = {sysd.primary.parity.value}",
        f"carrier_Lambda = {_fmt(sysd.Lambda_primary)}",
        f"perturbation_n = {sysd.n}",
        f"perturbation_parity = {sysd.secondary.parity.value}",
        f"perturbation_Lambda = {_fmt(sysd.Lambda_secondary)}",
        f"P = {_fmt(sysd.P)}",
        f"S = {_fmt(sysd.S)}",
        f"delta = {_fmt(sysd.delta)}",
        f"mu = {_fmt(sysd.mu)}",
        f"nu = {_fmt(sysd.nu)}",
        f"gamma = {_fmt(sysd.gamma)}",
        f"u0_min = {_fmt(spec.u0_range[0])}",
        f"u0_max = {_fmt(spec.u0_range[1])}",
        f"grid_points = {spec.grid_points}",
        f"perturbation_ratio = {_fmt(spec.perturbation_ratio)}",
        f"horizon_T = {_fmt(spec.horizon_T)}",
        f"growth_threshold = {_fmt(spec.growth_threshold)}",
        "[samples]",
        "u0,E,growth,unstable",
    ]
    for s in report.samples:
        lines.append(
            ",".join([_fmt(s.u0), _fmt(s.E), _fmt(s.growth), "1" if s.unstable else "0"])
        )
    lines.append("[intervals]")
    for (u_lo, u_hi), (e_lo, e_hi) in zip(report.intervals, report.interval_energies):
        lines.append(
            f"u0 = ({_fmt(u_lo)}, {_fmt(u_hi)}) energy = ({_fmt(e_lo)}, {_fmt(e_hi)})"
        )
    lines.append("[convention]")
    lines.append(f"note = {report.convention_note}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
