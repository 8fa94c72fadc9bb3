"""Closed-form spectrum of the buckling problem on the hinged-free plate.

Substituting w = profile(y) * sin(m x) into  Delta^2 w + Lambda w_xx = 0
reduces the plate problem to a fourth-order ODE in y,

    p'''' - 2 m^2 p'' + (m^4 - m^2 Lambda) p = 0  on (-l, l),

with the free-edge conditions at y = +-l

    p'' - sigma m^2 p = 0,
    p''' - (2 - sigma) m^2 p' = 0.

Writing s = m sqrt(Lambda), the solution space is spanned by cosh/sinh of
alpha y with alpha^2 = m^2 + s together with a companion that is hyperbolic
for s < m^2 (subcritical), trigonometric for s > m^2 (supercritical), and
polynomial exactly at s = m^2.  Eigenvalues are the roots of the 2x2
boundary determinant of that basis.  The determinant is scaled by its
dominant hyperbolic factors so evaluations stay O(1) for the torsional
branch, whose eigenvalues are of order 1e4 at the default geometry.

Profiles are stored as coefficient pairs (A, B) against the basis

    even:  A cosh(alpha y) + B C(y),   C = cosh(b y) | cos(b y) | 1
    odd:   A sinh(alpha y) + B C(y),   C = sinh(b y)/b | sin(b y)/b | y

(the odd companion is divided by b so that it survives the critical limit).

An independent verification oracle discretizes the weak form of the same
problem with a Legendre polynomial basis; see :func:`oracle_eigensolve`.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import legendre as npleg
from scipy import integrate as _sciint
from scipy import linalg as _scilin

from .plate import (
    PROFILE_NORM_SQ,
    Eigenpair,
    ModeIndex,
    Parity,
    PlateConfig,
    PlateModelError,
    ProfileRegime,
)

__all__ = [
    "BracketingFailure",
    "NonConvergence",
    "OracleFailure",
    "SpectrumOrdering",
    "characteristic_det",
    "profile_regime",
    "find_eigenvalues",
    "find_eigenvalues_below",
    "eigen_profile",
    "eigenfunction_eval",
    "global_ordering",
    "oracle_eigensolve",
    "oracle_profile",
    "write_eigen_report",
]

#: Relative half-width at which the companion basis is treated as degenerate.
DEGENERACY_TOL = 1e-8

#: Geometric scan ratio used to bracket determinant roots.
_SCAN_RATIO = 1.05


class BracketingFailure(PlateModelError):
    """Fewer sign changes than requested roots below the search ceiling."""


class NonConvergence(PlateModelError):
    """Root refinement failed to reach the requested tolerance."""


class OracleFailure(PlateModelError):
    """The discretized verification eigenproblem could not be solved."""


def profile_regime(m: int, Lambda: float, tol: float = DEGENERACY_TOL) -> ProfileRegime:
    """Classify the companion basis at (m, Lambda).

    Critical means |lambda - m^4| < tol * m^4 with lambda = m^2 Lambda.
    """
    lam = m * m * Lambda
    m4 = float(m) ** 4
    if abs(lam - m4) < tol * m4:
        return ProfileRegime.CRITICAL
    return ProfileRegime.SUBCRITICAL if lam < m4 else ProfileRegime.SUPERCRITICAL


def _det_pieces(m: int, Lambda: float, config: PlateConfig):
    """Common quantities entering the boundary determinant.

    Returns (s, alpha, b, p, q, regime) where b is the companion rate
    sqrt(|m^2 - s|) and p, q = s +- (1 - sigma) m^2.
    """
    sigma = config.poisson_sigma
    s = m * math.sqrt(Lambda)
    alpha = math.sqrt(m * m + s)
    d = m * m - s
    b = math.sqrt(abs(d))
    p = s + (1.0 - sigma) * m * m
    q = s - (1.0 - sigma) * m * m
    return s, alpha, b, p, q, profile_regime(m, Lambda)


def characteristic_det(
    m: int, Lambda: float, parity: Parity, config: PlateConfig
) -> float:
    """Scaled boundary determinant whose roots are the eigenvalues Lambda_{m,i}.

    Continuous in Lambda on (0, inf) for fixed (m, parity), including across
    the subcritical/supercritical transition, and O(1) in magnitude.  The odd
    determinant is divided by the companion rate b, which removes a spurious
    zero at the transition coming from the collapse of the sinh/sin basis.
    """
    if Lambda <= 0.0:
        raise ValueError(f"Lambda must be positive, got {Lambda}")
    if m < 1:
        raise ValueError(f"m must be a positive integer, got {m}")
    l = config.half_width_l
    s, alpha, b, p, q, regime = _det_pieces(m, Lambda, config)
    ta = math.tanh(alpha * l)

    if parity is Parity.LONGITUDINAL:
        if regime is ProfileRegime.SUBCRITICAL:
            det = q * q * alpha * ta - p * p * b * math.tanh(b * l)
        elif regime is ProfileRegime.SUPERCRITICAL:
            det = q * q * alpha * ta * math.cos(b * l) + p * p * b * math.sin(b * l)
        else:
            det = q * q * alpha * ta
            b = 0.0
    else:
        # odd determinant, normalized by b
        if regime is ProfileRegime.SUBCRITICAL:
            det = q * q * alpha * math.tanh(b * l) / b - p * p * ta
        elif regime is ProfileRegime.SUPERCRITICAL:
            det = q * q * alpha * math.sin(b * l) / b - p * p * ta * math.cos(b * l)
        else:
            det = q * q * alpha * l - p * p * ta
            b = 0.0

    return det / ((p * p + q * q) * (alpha + b + 1.0))


def _profile_basis(
    m: int, Lambda: float, parity: Parity, config: PlateConfig
) -> tuple[float, float, ProfileRegime]:
    """Rates (alpha, b) and regime for profile evaluation."""
    _, alpha, b, _, _, regime = _det_pieces(m, Lambda, config)
    return alpha, b, regime


def _boundary_rows(
    m: int, Lambda: float, parity: Parity, config: PlateConfig
) -> np.ndarray:
    """2x2 matrix of the free-edge conditions applied to the profile basis."""
    sigma = config.poisson_sigma
    l = config.half_width_l
    s, alpha, b, p, q, regime = _det_pieces(m, Lambda, config)
    if parity is Parity.LONGITUDINAL:
        r11 = p * math.cosh(alpha * l)
        r21 = alpha * q * math.sinh(alpha * l)
        if regime is ProfileRegime.SUBCRITICAL:
            r12 = -q * math.cosh(b * l)
            r22 = -b * p * math.sinh(b * l)
        elif regime is ProfileRegime.SUPERCRITICAL:
            r12 = -q * math.cos(b * l)
            r22 = b * p * math.sin(b * l)
        else:
            r12 = -q
            r22 = 0.0
    else:
        r11 = p * math.sinh(alpha * l)
        r21 = alpha * q * math.cosh(alpha * l)
        if regime is ProfileRegime.SUBCRITICAL:
            r12 = -q * math.sinh(b * l) / b
            r22 = -p * math.cosh(b * l)
        elif regime is ProfileRegime.SUPERCRITICAL:
            r12 = -q * math.sin(b * l) / b
            r22 = -p * math.cos(b * l)
        else:
            r12 = -q * l
            r22 = -p
    return np.array([[r11, r12], [r21, r22]], dtype=float)


def _companion_value(y, b: float, parity: Parity, regime: ProfileRegime, order: int):
    """Companion basis function C(y) or its derivative of given order."""
    y = np.asarray(y, dtype=float)
    if parity is Parity.LONGITUDINAL:
        if regime is ProfileRegime.SUBCRITICAL:
            f = [np.cosh, np.sinh, np.cosh, np.sinh][order]
            return b**order * f(b * y)
        if regime is ProfileRegime.SUPERCRITICAL:
            vals = [np.cos(b * y), -np.sin(b * y), -np.cos(b * y), np.sin(b * y)]
            return b**order * vals[order]
        return np.ones_like(y) if order == 0 else np.zeros_like(y)
    # odd companion, divided by b away from the critical regime
    if regime is ProfileRegime.SUBCRITICAL:
        f = [np.sinh, np.cosh, np.sinh, np.cosh][order]
        return b ** (order - 1) * f(b * y)
    if regime is ProfileRegime.SUPERCRITICAL:
        vals = [np.sin(b * y), np.cos(b * y), -np.sin(b * y), -np.cos(b * y)]
        return b ** (order - 1) * vals[order]
    if order == 0:
        return y.copy()
    return np.ones_like(y) if order == 1 else np.zeros_like(y)


def eigen_profile(pair: Eigenpair, y, order: int = 0):
    """Evaluate the normalized y-profile of an eigenpair, or a derivative.

    order selects the derivative (0 through 3).  Vectorized over y.
    """
    if not 0 <= order <= 3:
        raise ValueError("order must be between 0 and 3")
    m = pair.mode.m
    parity = pair.mode.parity
    alpha, b, regime = _profile_basis(m, pair.Lambda, parity, pair.config)
    A, B = pair.profile_coefficients
    y = np.asarray(y, dtype=float)
    if parity is Parity.LONGITUDINAL:
        f = [np.cosh, np.sinh, np.cosh, np.sinh][order]
    else:
        f = [np.sinh, np.cosh, np.sinh, np.cosh][order]
    lead = alpha**order * f(alpha * y)
    return A * lead + B * _companion_value(y, b, parity, regime, order)


def _normalized_coefficients(
    m: int, Lambda: float, parity: Parity, config: PlateConfig
) -> tuple[float, float]:
    """Null-space coefficients of the boundary matrix, L2-normalized.

    The better conditioned of the two boundary rows selects the null vector.
    Normalization enforces integral(profile^2, -l..l) = 2/pi with the sign
    convention profile(0) > 0 (even) or profile'(0) > 0 (odd).
    """
    rows = _boundary_rows(m, Lambda, parity, config)
    n0 = float(np.hypot(*rows[0]))
    n1 = float(np.hypot(*rows[1]))
    r = rows[0] if n0 >= n1 else rows[1]
    A, B = float(r[1]), float(-r[0])

    l = config.half_width_l
    alpha, b, regime = _profile_basis(m, Lambda, parity, config)

    def sq(y):
        yv = np.asarray(y, dtype=float)
        if parity is Parity.LONGITUDINAL:
            lead = np.cosh(alpha * yv)
        else:
            lead = np.sinh(alpha * yv)
        val = A * lead + B * _companion_value(yv, b, parity, regime, 0)
        return val * val

    norm_sq, _ = _sciint.quad(sq, -l, l, epsabs=0.0, epsrel=1e-12, limit=200)
    if norm_sq <= 0.0 or not math.isfinite(norm_sq):
        raise NonConvergence(
            f"profile normalization failed for m={m}, Lambda={Lambda}"
        )
    scale = math.sqrt(PROFILE_NORM_SQ / norm_sq)
    A *= scale
    B *= scale
    if parity is Parity.LONGITUDINAL:
        mid = A + B * float(_companion_value(0.0, b, parity, regime, 0))
    else:
        mid = A * alpha + B * float(_companion_value(0.0, b, parity, regime, 1))
    if mid < 0.0:
        A, B = -A, -B
    return A, B


def _make_eigenpair(
    m: int, parity: Parity, i: int, Lambda: float, config: PlateConfig
) -> Eigenpair:
    A, B = _normalized_coefficients(m, Lambda, parity, config)
    residual = abs(characteristic_det(m, Lambda, parity, config))
    return Eigenpair(
        mode=ModeIndex(m=m, parity=parity, i=i),
        Lambda=Lambda,
        lam=m * m * Lambda,
        profile_regime=profile_regime(m, Lambda),
        profile_coefficients=(A, B),
        residual=residual,
        config=config,
    )


def _refine_root(
    f, lo: float, hi: float, rel_tol: float = 1e-10, max_iter: int = 60
) -> float:
    """Refine a bracketed root: bisection to 1e-6 relative, then Newton.

    The Newton derivative is a central difference with step 1e-6 * Lambda.
    Falls back to continued bisection whenever Newton leaves the bracket.
    """
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo * fhi > 0.0:
        raise NonConvergence("root is not bracketed")
    while (hi - lo) > 1e-6 * hi:
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0.0:
            return mid
        if flo * fm < 0.0:
            hi, fhi = mid, fm
        else:
            lo, flo = mid, fm
    x = 0.5 * (lo + hi)
    for _ in range(max_iter):
        h = 1e-6 * x
        d = (f(x + h) - f(x - h)) / (2.0 * h)
        if d == 0.0:
            break
        step = f(x) / d
        x_new = x - step
        if not (lo < x_new < hi):
            # keep the bracket shrinking instead
            mid = 0.5 * (lo + hi)
            fm = f(mid)
            if flo * fm < 0.0:
                hi, fhi = mid, fm
            else:
                lo, flo = mid, fm
            x_new = 0.5 * (lo + hi)
        if abs(x_new - x) <= rel_tol * abs(x_new):
            return x_new
        x = x_new
    # Newton stalled; polish with full bisection
    while (hi - lo) > rel_tol * hi:
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0.0:
            return mid
        if flo * fm < 0.0:
            hi, fhi = mid, fm
        else:
            lo, flo = mid, fm
    return 0.5 * (lo + hi)


def _scan_roots(
    m: int,
    parity: Parity,
    config: PlateConfig,
    ceiling: float,
    max_roots: int | None = None,
) -> list[float]:
    """Bracket and refine determinant roots on (0, ceiling]."""
    f = lambda L: characteristic_det(m, L, parity, config)
    start = 1e-4 * m * m
    roots: list[float] = []
    lo = start
    flo = f(lo)
    while lo < ceiling:
        hi = min(lo * _SCAN_RATIO, ceiling)
        fhi = f(hi)
        if flo == 0.0:
            roots.append(lo)
        elif flo * fhi < 0.0:
            roots.append(_refine_root(f, lo, hi))
            if max_roots is not None and len(roots) >= max_roots:
                return roots
        if hi >= ceiling:
            break
        lo, flo = hi, fhi
    return roots


def find_eigenvalues_below(
    m: int, parity: Parity, ceiling: float, config: PlateConfig
) -> list[Eigenpair]:
    """All eigenpairs of the (m, parity) family with Lambda <= ceiling."""
    if ceiling <= 0.0:
        raise ValueError("ceiling must be positive")
    roots = _scan_roots(m, parity, config, ceiling)
    return [
        _make_eigenpair(m, parity, i + 1, L, config) for i, L in enumerate(roots)
    ]


def find_eigenvalues(
    m: int,
    parity: Parity,
    count: int,
    config: PlateConfig,
    search_ceiling: float,
) -> list[Eigenpair]:
    """First `count` eigenvalues of the (m, parity) family, ascending.

    Raises BracketingFailure when fewer than `count` sign changes exist
    below search_ceiling.
    """
    if count < 1:
        raise ValueError("count must be at least 1")
    if search_ceiling <= 0.0:
        raise ValueError("search_ceiling must be positive")
    roots = _scan_roots(m, parity, config, search_ceiling, max_roots=count)
    if len(roots) < count:
        raise BracketingFailure(
            f"found {len(roots)} roots below ceiling {search_ceiling:g} for "
            f"m={m} {parity.value}; raise the ceiling"
        )
    return [
        _make_eigenpair(m, parity, i + 1, L, config)
        for i, L in enumerate(roots[:count])
    ]


def eigenfunction_eval(pair: Eigenpair, x: float, y: float) -> float:
    """Value of the plate mode w(x, y) = profile(y) sin(m x).

    Raises ValueError outside the closed rectangle [0, pi] x [-l, l].
    """
    l = pair.config.half_width_l
    if not (0.0 <= x <= math.pi):
        raise ValueError(f"x={x} outside [0, pi]")
    if not (-l <= y <= l):
        raise ValueError(f"y={y} outside [-l, l]")
    return float(eigen_profile(pair, y)) * math.sin(pair.mode.m * x)


@dataclass(frozen=True)
class SpectrumOrdering:
    """Globally ordered eigenvalues with parity back-references."""

    pairs: list[Eigenpair]
    first_torsional_index: int | None  # 0-based position in `pairs`


def _thread_count() -> int:
    raw = os.environ.get("PLATESTAB_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def global_ordering(config: PlateConfig, ceiling: float) -> SpectrumOrdering:
    """Merge all (m, parity) families into one nondecreasing sequence.

    Families are scanned for increasing m until the least eigenvalue of a
    family exceeds the ceiling; the least eigenvalue is nondecreasing in m
    within each parity, so the loop terminates once both parities are
    exhausted.  Family scans are independent and run on a thread pool when
    PLATESTAB_THREADS is set above 1.
    """
    if ceiling <= 0.0:
        raise ValueError("ceiling must be positive")

    tasks: list[tuple[int, Parity]] = []
    m = 1
    while True:
        first_long = _scan_roots(m, Parity.LONGITUDINAL, config, ceiling, max_roots=1)
        if not first_long:
            break
        tasks.append((m, Parity.LONGITUDINAL))
        tasks.append((m, Parity.TORSIONAL))
        m += 1

    def family(task: tuple[int, Parity]) -> list[Eigenpair]:
        fm, parity = task
        return find_eigenvalues_below(fm, parity, ceiling, config)

    workers = _thread_count()
    if workers > 1 and tasks:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            families = list(pool.map(family, tasks))
    else:
        families = [family(t) for t in tasks]

    merged = sorted(
        (p for fam in families for p in fam), key=lambda p: (p.Lambda, p.mode.m)
    )
    first_tors = next(
        (k for k, p in enumerate(merged) if p.mode.parity is Parity.TORSIONAL), None
    )
    return SpectrumOrdering(pairs=merged, first_torsional_index=first_tors)


# ---------------------------------------------------------------------------
# Verification oracle: weak-form Ritz discretization with a Legendre basis.
#
# The weak form of the profile problem, obtained by integrating against a
# test function and absorbing the free-edge conditions as natural ones, is
#
#   B(u, v) = int(u'' v'' + 2 m^2 u' v' + m^4 u v) - sigma m^2 [(u v)']^{l}_{-l}
#           = lambda int(u v).
#
# On the stretched variable eta = y / l a parity-restricted Legendre basis
# turns this into a small dense symmetric generalized eigenproblem that is
# assembled exactly by Gauss quadrature (all integrands are polynomials).
# A plain second-order finite-difference discretization is useless here:
# with l = pi/150 the fourth difference of the smooth low profiles is below
# float64 rounding noise, so the lowest eigenvalues drown in cancellation.
# ---------------------------------------------------------------------------


def _legendre_tables(n_basis: int, parity: Parity, nodes: np.ndarray):
    """Values and derivatives of the parity-restricted Legendre basis."""
    degrees = (
        range(0, 2 * n_basis, 2)
        if parity is Parity.LONGITUDINAL
        else range(1, 2 * n_basis + 1, 2)
    )
    V = np.empty((len(nodes), n_basis))
    D1 = np.empty_like(V)
    D2 = np.empty_like(V)
    E = np.empty((2, n_basis))   # basis at eta = +-1
    E1 = np.empty((2, n_basis))  # first derivative at eta = +-1
    ends = np.array([-1.0, 1.0])
    for j, deg in enumerate(degrees):
        c = np.zeros(deg + 1)
        c[deg] = 1.0
        V[:, j] = npleg.legval(nodes, c)
        D1[:, j] = npleg.legval(nodes, npleg.legder(c, 1))
        D2[:, j] = npleg.legval(nodes, npleg.legder(c, 2))
        E[:, j] = npleg.legval(ends, c)
        E1[:, j] = npleg.legval(ends, npleg.legder(c, 1))
    return V, D1, D2, E, E1


def oracle_eigensolve(
    m: int, parity: Parity, grid_points: int, config: PlateConfig
) -> list[float]:
    """Independent discretization of the profile eigenproblem.

    Returns ascending estimates of Lambda = lambda / m^2 from a Ritz
    discretization of the weak form with grid_points // 8 (at least 16)
    parity-restricted Legendre basis functions.  Intended for verification;
    production eigenvalues come from the characteristic determinant.
    """
    lams = _oracle_lambdas(m, parity, grid_points, config)[0]
    return [float(v) / (m * m) for v in lams]


def _oracle_lambdas(m: int, parity: Parity, grid_points: int, config: PlateConfig):
    if grid_points < 64:
        raise ValueError("grid_points must be at least 64")
    n_basis = max(12, min(32, grid_points // 16))
    l = config.half_width_l
    sigma = config.poisson_sigma

    # Gauss-Legendre rule exact for products of basis second derivatives
    n_quad = 2 * n_basis + 8
    nodes, weights = npleg.leggauss(n_quad)
    V, D1, D2, E, E1 = _legendre_tables(n_basis, parity, nodes)

    W = weights[:, None]
    m2 = float(m * m)
    # all derivatives map back to y via powers of 1/l; integrals carry l
    A = (
        (D2 * W).T @ D2 / l**3
        + 2.0 * m2 * (D1 * W).T @ D1 / l
        + m2 * m2 * (V * W).T @ V * l
    )
    # boundary term -sigma m^2 [(u v)'] with d/dy = (1/l) d/deta
    for k, sgn in ((1, 1.0), (0, -1.0)):
        uv = np.outer(E1[k], E[k]) + np.outer(E[k], E1[k])
        A -= sgn * sigma * m2 * uv / l
    A = 0.5 * (A + A.T)
    M = (V * W).T @ V * l
    M = 0.5 * (M + M.T)

    try:
        # the 'gv' driver tracks the small eigenvalues of this strongly
        # graded pencil; the divide-and-conquer default loses them
        lams, vecs = _scilin.eigh(A, M, driver="gv")
    except _scilin.LinAlgError as exc:
        raise OracleFailure(f"discrete eigenproblem failed: {exc}") from exc
    if not np.all(np.isfinite(lams)):
        raise OracleFailure("discrete eigenproblem returned non-finite values")
    keep = lams > 0.0
    return lams[keep], vecs[:, keep], nodes, weights, V


def oracle_profile(
    m: int, parity: Parity, grid_points: int, config: PlateConfig, index: int = 0
):
    """Oracle eigenvalue and normalized profile samples for one branch.

    Returns (Lambda, y_nodes, profile_values) with the profile normalized to
    integral(profile^2) = 2/pi and the same sign convention as production
    eigenpairs.  Used by tests to cross-check profile values.
    """
    lams, vecs, nodes, weights, V = _oracle_lambdas(m, parity, grid_points, config)
    if index >= len(lams):
        raise OracleFailure(f"oracle produced only {len(lams)} eigenvalues")
    l = config.half_width_l
    v = vecs[:, index]
    prof = V @ v
    norm_sq = float(np.sum(weights * prof * prof) * l)
    prof = prof * math.sqrt(PROFILE_NORM_SQ / norm_sq)
    # sign: even profiles positive at the midline, odd increasing through it
    probe = prof[np.argmin(np.abs(nodes))] if parity is Parity.LONGITUDINAL else prof[-1]
    if probe < 0.0:
        prof = -prof
    return float(lams[index]) / (m * m), nodes * l, prof


# ---------------------------------------------------------------------------
# Reporting
# ---------------------------------------------------------------------------

EIGEN_REPORT_HEADER = "index,m,parity,i,Lambda,lambda,regime,A,B,residual"


def _fmt(x: float) -> str:
    return format(float(x), ".17e")


def _provenance_lines(config: PlateConfig, version: str) -> list[str]:
    return [
        f"# platestab {version}",
        f"# l={_fmt(config.half_width_l)}",
        f"# sigma={_fmt(config.poisson_sigma)}",
        f"# P={_fmt(config.prestress_P)}",
        f"# S={_fmt(config.stiffness_S)}",
        f"# delta={_fmt(config.damping_delta)}",
    ]


def write_eigen_report(
    pairs: list[Eigenpair],
    path,
    config: PlateConfig,
    fmt: str = "csv",
    version: str = "0.1.0",
) -> None:
    """Write the eigenvalue report as CSV or structured text."""
    if fmt == "csv":
        lines = _provenance_lines(config, version)
        lines.append(EIGEN_REPORT_HEADER)
        for k, p in enumerate(pairs):
            A, B = p.profile_coefficients
            lines.append(
                ",".join(
                    [
                        str(k + 1),
                        str(p.mode.m),
                        p.mode.parity.value,
                        str(p.mode.i),
                        _fmt(p.Lambda),
                        _fmt(p.lam),
                        p.profile_regime.value,
                        _fmt(A),
                        _fmt(B),
                        _fmt(p.residual),
                    ]
                )
            )
    elif fmt == "text":
        lines = ["[meta]"]
        lines += [s.lstrip("# ") for s in _provenance_lines(config, version)]
        for k, p in enumerate(pairs):
            A, B = p.profile_coefficients
            lines.append(f"[eigenvalue {k + 1}]")
            lines.append(f"index = {k + 1}")
            lines.append(f"m = {p.mode.m}")
            lines.append(f"parity = {p.mode.parity.value}")
            lines.append(f"i = {p.mode.i}")
            lines.append(f"Lambda = {_fmt(p.Lambda)}")
            lines.append(f"lambda = {_fmt(p.lam)}")
            lines.append(f"regime = {p.profile_regime.value}")
            lines.append(f"A = {_fmt(A)}")
            lines.append(f"B = {_fmt(B)}")
            lines.append(f"residual = {_fmt(p.residual)}")
    else:
        raise ValueError(f"unknown report format {fmt!r}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
