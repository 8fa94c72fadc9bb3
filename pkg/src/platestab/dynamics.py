"""Nonlinear modal dynamics of the plate equation.

Projecting the plate equation onto eigenmodes turns it into coupled
oscillator systems.  For two modes (m, i) and (n, k) with coordinates
phi, psi:

    phi'' + delta phi' + m^2 (Lambda_mi - P) phi
          + S m^2 (m^2 phi^2 + n^2 psi^2) phi = 0
    psi'' + delta psi' + n^2 (Lambda_nk - P) psi
          + S n^2 (m^2 phi^2 + n^2 psi^2) psi = 0

and for a K-mode truncation with coordinates u_i:

    u_i'' + delta u_i' + lam_i u_i + Phi(u) m_i^2 u_i = F_i(t),
    Phi(u) = -P + S sum_j m_j^2 u_j^2.

Without damping and forcing both systems conserve a mechanical energy; the
integrator keeps a ledger of it and refuses silently drifting runs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import solve_ivp

from .plate import (
    Eigenpair,
    ModeIndex,
    Parity,
    PlateConfig,
    PlateModelError,
)

__all__ = [
    "EnergyDriftExceeded",
    "StepSizeUnderflow",
    "WindowTooLong",
    "TwoModeSystem",
    "ModalState",
    "GalerkinState",
    "Trajectory",
    "two_mode_rhs",
    "two_mode_energy",
    "integrate",
    "galerkin_rhs",
    "galerkin_energy",
    "integrate_galerkin",
    "steady_state_lambda_plus",
    "AsymptoticOutcome",
    "Verdict",
    "asymptotic_verdict",
    "write_trajectory_csv",
    "write_plot_series",
]


class StepSizeUnderflow(PlateModelError):
    """The adaptive integrator could not complete the requested span."""


class EnergyDriftExceeded(PlateModelError):
    """Conserved energy drifted beyond the ledger ceiling.

    Raised only for undamped, unforced runs; drift there indicates
    misconfigured tolerances rather than physics.
    """


class WindowTooLong(PlateModelError):
    """The trailing classification window exceeds the trajectory span."""


@dataclass(frozen=True)
class TwoModeSystem:
    """A coupled pair of plate modes with the shared physics parameters.

    The primary mode carries index m, the secondary index n.  Derived
    parameters mu, nu, gamma are the ones entering the rescaled system and
    the stability analysis.
    """

    primary: ModeIndex
    Lambda_primary: float
    secondary: ModeIndex
    Lambda_secondary: float
    P: float
    S: float
    delta: float = 0.0

    def __post_init__(self) -> None:
        if self.primary == self.secondary:
            raise ValueError("primary and secondary modes must differ")
        if self.S <= 0.0:
            raise ValueError("S must be positive")
        if self.delta < 0.0:
            raise ValueError("delta must be nonnegative")

    @classmethod
    def from_eigenpairs(
        cls, primary: Eigenpair, secondary: Eigenpair, config: PlateConfig
    ) -> "TwoModeSystem":
        return cls(
            primary=primary.mode,
            Lambda_primary=primary.Lambda,
            secondary=secondary.mode,
            Lambda_secondary=secondary.Lambda,
            P=config.prestress_P,
            S=config.stiffness_S,
            delta=config.damping_delta,
        )

    @classmethod
    def from_values(
        cls,
        m: int,
        Lambda_m: float,
        n: int,
        Lambda_n: float,
        P: float,
        S: float,
        delta: float = 0.0,
        primary_parity: Parity = Parity.LONGITUDINAL,
        secondary_parity: Parity = Parity.TORSIONAL,
    ) -> "TwoModeSystem":
        """Build a system from raw numbers, tagging modes by parity."""
        return cls(
            primary=ModeIndex(m, primary_parity, 1),
            Lambda_primary=Lambda_m,
            secondary=ModeIndex(n, secondary_parity, 1),
            Lambda_secondary=Lambda_n,
            P=P,
            S=S,
            delta=delta,
        )

    @property
    def m(self) -> int:
        return self.primary.m

    @property
    def n(self) -> int:
        return self.secondary.m

    @property
    def mu(self) -> float:
        return (self.Lambda_primary - self.P) / self.S

    @property
    def nu(self) -> float:
        return (self.Lambda_secondary - self.P) / self.S

    @property
    def gamma(self) -> float:
        return float(self.n * self.n) / float(self.m * self.m)


@dataclass(frozen=True)
class ModalState:
    """Two-mode phase-space point at time t."""

    t: float
    phi: float
    phi_dot: float
    psi: float
    psi_dot: float

    def __post_init__(self) -> None:
        for name in ("t", "phi", "phi_dot", "psi", "psi_dot"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")

    def as_array(self) -> np.ndarray:
        return np.array([self.phi, self.phi_dot, self.psi, self.psi_dot])


@dataclass(frozen=True)
class GalerkinState:
    """K-mode phase-space point: coordinate and velocity arrays."""

    t: float
    u: np.ndarray
    u_dot: np.ndarray

    def __post_init__(self) -> None:
        u = np.asarray(self.u, dtype=float)
        ud = np.asarray(self.u_dot, dtype=float)
        if u.shape != ud.shape or u.ndim != 1 or u.size < 1:
            raise ValueError("u and u_dot must be matching 1-d arrays")
        if not (np.all(np.isfinite(u)) and np.all(np.isfinite(ud))):
            raise ValueError("state entries must be finite")
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "u_dot", ud)


@dataclass
class Trajectory:
    """Sampled solution with its energy ledger and integrator statistics.

    energy holds the mechanical energy at each sample; dissipated the
    cumulative damping loss delta * integral of the squared velocity
    (trapezoid rule on the samples).
    """

    times: np.ndarray
    states: np.ndarray  # rows are samples, columns the phase-space layout
    energy: np.ndarray
    dissipated: np.ndarray
    stats: dict
    kind: str  # "two_mode" or "galerkin"

    def state_at(self, idx: int) -> ModalState | GalerkinState:
        row = self.states[idx]
        if self.kind == "two_mode":
            return ModalState(float(self.times[idx]), *map(float, row))
        half = row.size // 2
        return GalerkinState(float(self.times[idx]), row[:half], row[half:])


def two_mode_rhs(state: ModalState, sys: TwoModeSystem) -> tuple[float, float, float, float]:
    """Time derivative (phi', phi'', psi', psi'') of the two-mode system."""
    m2 = float(sys.m * sys.m)
    n2 = float(sys.n * sys.n)
    stretch = m2 * state.phi**2 + n2 * state.psi**2
    phi_dd = (
        -sys.delta * state.phi_dot
        - m2 * (sys.Lambda_primary - sys.P) * state.phi
        - sys.S * m2 * stretch * state.phi
    )
    psi_dd = (
        -sys.delta * state.psi_dot
        - n2 * (sys.Lambda_secondary - sys.P) * state.psi
        - sys.S * n2 * stretch * state.psi
    )
    return (state.phi_dot, phi_dd, state.psi_dot, psi_dd)


def two_mode_energy(state: ModalState, sys: TwoModeSystem) -> float:
    """Mechanical energy of the two-mode system (conserved when delta = 0)."""
    m2 = float(sys.m * sys.m)
    n2 = float(sys.n * sys.n)
    stretch = m2 * state.phi**2 + n2 * state.psi**2
    return (
        0.5 * state.phi_dot**2
        + 0.5 * state.psi_dot**2
        + 0.5 * m2 * (sys.Lambda_primary - sys.P) * state.phi**2
        + 0.5 * n2 * (sys.Lambda_secondary - sys.P) * state.psi**2
        + 0.25 * sys.S * stretch**2
    )


def _run_ivp(rhs, y0, t_end, rel_tol, abs_tol, sample_times):
    if not (1e-14 <= rel_tol <= 1e-3):
        raise ValueError("rel_tol must lie in [1e-14, 1e-3]")
    if not (1e-14 <= abs_tol <= 1e-3):
        raise ValueError("abs_tol must lie in [1e-14, 1e-3]")
    if t_end <= 0.0:
        raise ValueError("t_end must be positive")
    if sample_times is None:
        sample_times = np.linspace(0.0, t_end, 1201)
    else:
        sample_times = np.asarray(sample_times, dtype=float)
        if sample_times[0] < 0.0 or sample_times[-1] > t_end:
            raise ValueError("sample times must lie in [0, t_end]")
    sol = solve_ivp(
        rhs,
        (0.0, float(t_end)),
        y0,
        method="RK45",
        rtol=rel_tol,
        atol=abs_tol,
        t_eval=sample_times,
        dense_output=False,
    )
    if not sol.success:
        raise StepSizeUnderflow(f"integration failed: {sol.message}")
    return sol


def _ledger(times, energies, velocity_sq, delta):
    dissipated = delta * np.concatenate(
        ([0.0], np.cumsum(np.diff(times) * 0.5 * (velocity_sq[1:] + velocity_sq[:-1])))
    )
    e0 = energies[0]
    drift = float(np.max(np.abs(energies - e0)) / max(abs(e0), 1.0))
    return dissipated, drift


def integrate(
    sys: TwoModeSystem,
    initial: ModalState,
    t_end: float,
    rel_tol: float = 1e-10,
    abs_tol: float = 1e-12,
    sample_times: Sequence[float] | None = None,
    drift_ceiling: float = 1e-6,
) -> Trajectory:
    """Integrate the two-mode system over [0, t_end].

    Adaptive embedded Runge-Kutta 5(4) with samples at t_eval points.  When
    delta = 0 the run is rejected (EnergyDriftExceeded) if the relative
    energy drift exceeds drift_ceiling.
    """
    m2 = float(sys.m * sys.m)
    n2 = float(sys.n * sys.n)
    cphi = m2 * (sys.Lambda_primary - sys.P)
    cpsi = n2 * (sys.Lambda_secondary - sys.P)
    S, delta = sys.S, sys.delta

    def rhs(t, y):
        phi, phi_dot, psi, psi_dot = y
        stretch = m2 * phi * phi + n2 * psi * psi
        return (
            phi_dot,
            -delta * phi_dot - (cphi + S * m2 * stretch) * phi,
            psi_dot,
            -delta * psi_dot - (cpsi + S * n2 * stretch) * psi,
        )

    sol = _run_ivp(rhs, initial.as_array(), t_end, rel_tol, abs_tol, sample_times)
    states = sol.y.T
    energies = np.array(
        [
            two_mode_energy(ModalState(t, *map(float, row)), sys)
            for t, row in zip(sol.t, states)
        ]
    )
    vel_sq = states[:, 1] ** 2 + states[:, 3] ** 2
    dissipated, drift = _ledger(sol.t, energies, vel_sq, delta)
    if delta == 0.0 and drift > drift_ceiling:
        raise EnergyDriftExceeded(
            f"relative energy drift {drift:.3e} exceeds ceiling {drift_ceiling:.1e}"
        )
    stats = {"nfev": int(sol.nfev), "n_samples": len(sol.t), "max_energy_drift": drift}
    return Trajectory(
        times=sol.t.copy(),
        states=states.copy(),
        energy=energies,
        dissipated=dissipated,
        stats=stats,
        kind="two_mode",
    )


def galerkin_rhs(
    state: GalerkinState,
    pairs: Sequence[Eigenpair],
    config: PlateConfig,
    forcing: Sequence[Callable[[float], float]] | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Derivative (u', u'') of the K-mode truncation.

    pairs supply the eigenvalues; the coupling uses lam_i / Lambda_i = m_i^2,
    so only stored mode data enter.  forcing, when given, holds one callable
    per mode returning the projected load at time t.
    """
    if len(pairs) != state.u.size:
        raise ValueError("state dimension does not match the mode list")
    m_sq = np.array([float(p.mode.m * p.mode.m) for p in pairs])
    lam = np.array([p.lam for p in pairs])
    Phi = -config.prestress_P + config.stiffness_S * float(np.dot(m_sq, state.u**2))
    u_dd = -config.damping_delta * state.u_dot - lam * state.u - Phi * m_sq * state.u
    if forcing is not None:
        if len(forcing) != state.u.size:
            raise ValueError("forcing list does not match the mode list")
        u_dd = u_dd + np.array([f(state.t) for f in forcing])
    return state.u_dot.copy(), u_dd


def galerkin_energy(
    state: GalerkinState, pairs: Sequence[Eigenpair], config: PlateConfig
) -> float:
    """Mechanical energy of the K-mode truncation."""
    m_sq = np.array([float(p.mode.m * p.mode.m) for p in pairs])
    lam = np.array([p.lam for p in pairs])
    stretch = float(np.dot(m_sq, state.u**2))
    return float(
        0.5 * np.dot(state.u_dot, state.u_dot)
        + 0.5 * np.dot(lam, state.u**2)
        - 0.5 * config.prestress_P * stretch
        + 0.25 * config.stiffness_S * stretch**2
    )


def integrate_galerkin(
    pairs: Sequence[Eigenpair],
    config: PlateConfig,
    initial: GalerkinState,
    t_end: float,
    rel_tol: float = 1e-10,
    abs_tol: float = 1e-12,
    sample_times: Sequence[float] | None = None,
    forcing: Sequence[Callable[[float], float]] | None = None,
    drift_ceiling: float = 1e-6,
) -> Trajectory:
    """Integrate the K-mode truncation over [0, t_end]."""
    K = initial.u.size
    if len(pairs) != K:
        raise ValueError("state dimension does not match the mode list")
    m_sq = np.array([float(p.mode.m * p.mode.m) for p in pairs])
    lam = np.array([p.lam for p in pairs])
    P, S, delta = config.prestress_P, config.stiffness_S, config.damping_delta
    has_forcing = forcing is not None
    if has_forcing and len(forcing) != K:
        raise ValueError("forcing list does not match the mode list")

    def rhs(t, y):
        u = y[:K]
        ud = y[K:]
        Phi = -P + S * float(np.dot(m_sq, u * u))
        udd = -delta * ud - lam * u - Phi * m_sq * u
        if has_forcing:
            udd = udd + np.array([f(t) for f in forcing])
        return np.concatenate((ud, udd))

    y0 = np.concatenate((initial.u, initial.u_dot))
    sol = _run_ivp(rhs, y0, t_end, rel_tol, abs_tol, sample_times)
    states = sol.y.T
    energies = np.array(
        [
            galerkin_energy(GalerkinState(t, row[:K], row[K:]), pairs, config)
            for t, row in zip(sol.t, states)
        ]
    )
    vel_sq = np.sum(states[:, K:] ** 2, axis=1)
    dissipated, drift = _ledger(sol.t, energies, vel_sq, delta)
    if delta == 0.0 and not has_forcing and drift > drift_ceiling:
        raise EnergyDriftExceeded(
            f"relative energy drift {drift:.3e} exceeds ceiling {drift_ceiling:.1e}"
        )
    stats = {"nfev": int(sol.nfev), "n_samples": len(sol.t), "max_energy_drift": drift}
    return Trajectory(
        times=sol.t.copy(),
        states=states.copy(),
        energy=energies,
        dissipated=dissipated,
        stats=stats,
        kind="galerkin",
    )


def steady_state_lambda_plus(P: float, Lambda1: float, S: float) -> float:
    """Amplitude of the buckled equilibria, zero when P <= Lambda1."""
    if P <= Lambda1:
        return 0.0
    return math.sqrt((P - Lambda1) / S)


class AsymptoticOutcome(Enum):
    CONVERGED = "converged"
    OSCILLATING = "oscillating"
    UNDECIDED = "undecided"


@dataclass(frozen=True)
class Verdict:
    outcome: AsymptoticOutcome
    target_index: int | None = None


def asymptotic_verdict(
    traj: Trajectory,
    targets: Sequence[np.ndarray],
    window: float,
    tol: float,
) -> Verdict:
    """Classify the trailing window of a trajectory against candidate limits.

    Converged(j): position stays within tol of target j and the velocity norm
    stays below tol throughout the window.  Oscillating: the distance to every
    target stays above tol throughout.  Anything else is Undecided.
    """
    t_end = float(traj.times[-1])
    if window > t_end - float(traj.times[0]):
        raise WindowTooLong("classification window exceeds the trajectory span")
    mask = traj.times >= t_end - window
    states = traj.states[mask]
    half = states.shape[1] // 2
    if traj.kind == "two_mode":
        pos = states[:, (0, 2)]
        vel = states[:, (1, 3)]
    else:
        pos = states[:, :half]
        vel = states[:, half:]
    vel_norm = np.linalg.norm(vel, axis=1)
    for j, target in enumerate(targets):
        tv = np.asarray(target, dtype=float)
        dist = np.linalg.norm(pos - tv[None, :], axis=1)
        if np.all(dist <= tol) and np.all(vel_norm <= tol):
            return Verdict(AsymptoticOutcome.CONVERGED, j)
    away = all(
        np.all(np.linalg.norm(pos - np.asarray(t, dtype=float)[None, :], axis=1) > tol)
        for t in targets
    )
    if away:
        return Verdict(AsymptoticOutcome.OSCILLATING)
    return Verdict(AsymptoticOutcome.UNDECIDED)


# ---------------------------------------------------------------------------
# Export
# ---------------------------------------------------------------------------


def _fmt(x: float) -> str:
    return format(float(x), ".17e")


def write_trajectory_csv(traj: Trajectory, path, header_lines: Sequence[str] = ()) -> None:
    """Write trajectory samples with the energy column.

    Columns: t,phi,phi_dot,psi,psi_dot,energy for two-mode runs and
    t,u_1,u_1_dot,...,u_K,u_K_dot,energy for truncations.
    """
    lines = list(header_lines)
    if traj.kind == "two_mode":
        lines.append("t,phi,phi_dot,psi,psi_dot,energy")
        for k, t in enumerate(traj.times):
            row = traj.states[k]
            lines.append(
                ",".join(
                    [_fmt(t), _fmt(row[0]), _fmt(row[1]), _fmt(row[2]), _fmt(row[3]), _fmt(traj.energy[k])]
                )
            )
    else:
        half = traj.states.shape[1] // 2
        cols = []
        for i in range(half):
            cols += [f"u_{i + 1}", f"u_{i + 1}_dot"]
        lines.append("t," + ",".join(cols) + ",energy")
        for k, t in enumerate(traj.times):
            row = traj.states[k]
            interleaved = [v for i in range(half) for v in (row[i], row[half + i])]
            lines.append(
                ",".join([_fmt(t)] + [_fmt(v) for v in interleaved] + [_fmt(traj.energy[k])])
            )
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def write_plot_series(traj: Trajectory, path_phi, path_psi) -> None:
    """Emit (t, phi) and (t, psi) two-column series for external plotting."""
    if traj.kind != "two_mode":
        raise ValueError("plot series are defined for two-mode trajectories")
    for path, col in ((path_phi, 0), (path_psi, 2)):
        with open(path, "w", encoding="utf-8") as fh:
            for k, t in enumerate(traj.times):
                fh.write(f"{_fmt(t)} {_fmt(traj.states[k][col])}\n")
