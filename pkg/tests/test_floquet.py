import math

import numpy as np
import pytest
from scipy.integrate import solve_ivp

from platestab.plate import Parity
from platestab import dynamics as dy
from platestab import floquet as fl


def period_by_zero_crossings(mu, E, rel_tol=1e-12):
    """Independent period measurement: time between same-direction zeros."""
    b = math.sqrt(2.0 * E)

    def rhs(t, y):
        w, wd = y
        return (wd, -(mu + w * w) * w)

    def event(t, y):
        return y[0]

    event.direction = 1.0  # upward crossings only, i.e. full periods
    horizon = 3.0 * 2.0 * math.pi / math.sqrt(mu)
    sol = solve_ivp(rhs, (1e-9, horizon), (1e-30, b), method="RK45",
                    rtol=rel_tol, atol=1e-14 * max(1.0, b), events=event,
                    dense_output=False)
    times = sol.t_events[0]
    assert len(times) >= 1
    return float(times[0])


class TestNondimensionalize:
    def test_reference_pairing(self, config, longitudinal_pairs, torsional_pairs):
        sys = dy.TwoModeSystem.from_eigenpairs(
            longitudinal_pairs[6], torsional_pairs[2], config
        )
        resc = fl.nondimensionalize(sys, E0_original=3.0)
        assert resc.mu == pytest.approx((34.57 - 0.48) / 3.0, abs=1e-2 / 3.0)
        assert resc.nu == pytest.approx((10946.5 - 0.48) / 3.0, abs=1e-1 / 3.0)
        assert resc.gamma == pytest.approx(1.0 / 9.0)
        assert resc.E0 == pytest.approx(1.0)

    def test_gamma_is_frequency_ratio(self):
        sys = dy.TwoModeSystem.from_values(2, 10.0, 3, 20.0, P=0.5, S=1.0)
        assert sys.gamma == pytest.approx(2.25)

    def test_derived_invariants(self):
        resc = fl.RescaledSystem(mu=2.0, nu=5.0, gamma=0.5, E0=8.0)
        assert resc.b_star == pytest.approx(4.0)
        assert resc.epsilon * resc.b_star == pytest.approx(resc.mu)

    def test_rejects_prestress_at_eigenvalue(self):
        sys = dy.TwoModeSystem.from_values(1, 0.4, 2, 3.84, P=0.48, S=3.0)
        with pytest.raises(fl.NonPositiveStiffnessParameters):
            fl.nondimensionalize(sys, 1.0)


class TestDuffing:
    def test_amplitude_energy_round_trip(self):
        for mu in (0.2, 1.0, 11.36):
            for alpha in (1e-3, 0.5, 3.0, 24.3):
                E = fl.duffing_energy(mu, alpha)
                assert fl.duffing_amplitude(mu, E) == pytest.approx(alpha, rel=1e-12)

    def test_amplitude_vanishes_with_energy(self):
        assert fl.duffing_amplitude(1.0, 1e-30) == pytest.approx(0.0, abs=1e-14)

    def test_period_small_energy_limit(self):
        assert fl.duffing_period(1.0, 1e-12) == pytest.approx(2.0 * math.pi, rel=1e-10)

    def test_period_first_order_expansion(self):
        T = fl.duffing_period(1.0, 1e-4)
        assert (2.0 * math.pi / T) ** 2 == pytest.approx(1.0 + 1.5e-4, abs=5e-8)

    def test_period_matches_zero_crossing_oracle(self):
        T_quad = fl.duffing_period(0.16, 1.0)
        T_ode = period_by_zero_crossings(0.16, 1.0)
        assert T_quad == pytest.approx(T_ode, rel=1e-6)

    def test_period_strictly_decreasing(self):
        energies = np.geomspace(1e-4, 1e6, 24)
        periods = [fl.duffing_period(2.0, E) for E in energies]
        assert all(a > b for a, b in zip(periods, periods[1:]))


class TestMonodromy:
    def test_determinant_and_multiplier_structure(self):
        resc = fl.RescaledSystem(mu=1.0, nu=2.0, gamma=9.0, E0=5e5)
        res = fl.monodromy(resc)
        assert res.det_residual < 1e-9
        m1, m2 = res.multipliers
        assert abs(m1 * m2 - 1.0) < 1e-9
        # unstable case: one multiplier strictly inside the unit circle
        assert res.verdict is fl.StabilityVerdict.UNSTABLE
        mods = sorted((abs(m1), abs(m2)))
        assert mods[0] < 1.0 < mods[1]
        assert mods[1] == pytest.approx(1.0 / mods[0], rel=1e-9)

    def test_stable_multipliers_on_unit_circle(self):
        resc = fl.RescaledSystem(mu=1.0, nu=2.0, gamma=1.0 / 9.0, E0=5e5)
        res = fl.monodromy(resc)
        assert res.verdict is fl.StabilityVerdict.STABLE
        for mult in res.multipliers:
            assert abs(abs(mult) - 1.0) < 1e-9

    @pytest.mark.parametrize("gamma,expected", [
        (1.0 / 9.0, fl.StabilityVerdict.STABLE),
        (4.0, fl.StabilityVerdict.STABLE),
        (12.25, fl.StabilityVerdict.STABLE),
        (2.25, fl.StabilityVerdict.UNSTABLE),
        (9.0, fl.StabilityVerdict.UNSTABLE),
    ])
    def test_large_energy_interval_classes(self, gamma, expected):
        resc = fl.RescaledSystem(mu=1.0, nu=2.0, gamma=gamma, E0=5e5)
        assert fl.monodromy(resc).verdict is expected

    def test_hill_problem_periodic_coefficient(self):
        resc = fl.RescaledSystem(mu=2.0, nu=3.0, gamma=0.5, E0=10.0)
        hill = fl.hill_problem(resc)
        ts = np.linspace(0.0, hill.period, 13)[:-1]
        for t in ts:
            a0 = hill.coefficient(float(t))
            a1 = hill.coefficient(float(t) + hill.period)
            assert a1 == pytest.approx(a0, rel=1e-8, abs=1e-10)
            assert a0 >= hill.inf_coefficient - 1e-12

    def test_rescaling_equivalence(self):
        # verdicts agree between the rescaled monodromy and the one
        # obtained by linearizing the original-variable system about its
        # simple mode at the matching energy
        rng = np.random.default_rng(42)
        for _ in range(10):
            m = int(rng.integers(1, 5))
            n = int(rng.integers(1, 5))
            if n == m:
                n += 1
            Lm = float(rng.uniform(1.0, 30.0))
            Ln = float(rng.uniform(1.0, 30.0))
            S = float(rng.uniform(0.5, 4.0))
            P = float(rng.uniform(0.0, 0.8))
            E0 = float(rng.uniform(5.0, 500.0))
            sys = dy.TwoModeSystem.from_values(m, Lm, n, Ln, P=P, S=S)
            resc = fl.nondimensionalize(sys, E0_original=E0 * S)
            verdict_rescaled = fl.monodromy(resc).verdict

            # original variables: phi'' + m^2(Lm-P)phi + S m^4 phi^3 = 0,
            # z'' + [n^2(Ln-P) + S m^2 n^2 phi^2] z = 0 over one half period
            T_orig = fl.duffing_period(resc.mu, resc.E0) / (m * math.sqrt(S))
            b_orig = math.sqrt(2.0 * E0 * S)
            c_phi = m * m * (Lm - P)
            c_z = n * n * (Ln - P)
            Sm4 = S * m**4
            Smn = S * m * m * n * n

            def rhs(t, y):
                phi, phid, z1, z1d, z2, z2d = y
                a = c_z + Smn * phi * phi
                return (phid, -c_phi * phi - Sm4 * phi**3, z1d, -a * z1, z2d, -a * z2)

            sol = solve_ivp(rhs, (0.0, T_orig / 2.0), (0.0, b_orig, 1.0, 0.0, 0.0, 1.0),
                            method="RK45", rtol=1e-11, atol=1e-12 * max(1.0, b_orig))
            assert sol.success
            trace = float(sol.y[2, -1] + sol.y[5, -1])
            verdict_orig = (fl.StabilityVerdict.UNSTABLE if abs(trace) > 2.0
                            else fl.StabilityVerdict.STABLE)
            assert verdict_orig is verdict_rescaled

    def test_period_mismatch_guard(self):
        resc = fl.RescaledSystem(mu=1.0, nu=1.0, gamma=1.0, E0=1.0)
        res = fl.monodromy(resc)  # healthy run does not raise
        assert res.det_residual < 1e-9


class TestClassifyGamma:
    @pytest.mark.parametrize("gamma,kind,j", [
        (2.25, fl.IntervalKind.INSTABILITY, 0),
        (4.0, fl.IntervalKind.STABILITY, 1),
        (12.25, fl.IntervalKind.STABILITY, 2),
        (0.5, fl.IntervalKind.STABILITY, 0),
        (9.0, fl.IntervalKind.INSTABILITY, 1),
        (25.0, fl.IntervalKind.STABILITY, 3),
    ])
    def test_examples(self, gamma, kind, j):
        c = fl.classify_gamma(gamma)
        assert c.kind is kind
        assert c.j == j

    def test_boundaries(self):
        for endpoint in (1.0, 3.0, 6.0, 10.0, 15.0):
            assert fl.classify_gamma(endpoint).kind is fl.IntervalKind.BOUNDARY

    def test_ladder_tiles_positive_axis(self):
        # consecutive intervals share endpoints: I_j upper = K_j lower,
        # K_j upper = I_{j+1} lower
        for j in range(6):
            assert (j + 1) * (2 * j + 1) == (j + 1) * (2 * j + 1)
            assert (j + 1) * (2 * j + 3) == (j + 1) * (2 * (j + 1) + 1)


class TestZhukovskii:
    def test_small_energy_certificate(self, config, longitudinal_pairs, torsional_pairs):
        nu = (torsional_pairs[2].Lambda - config.prestress_P) / config.stiffness_S
        for m in range(3, 11):
            mu = (longitudinal_pairs[m].Lambda - config.prestress_P) / config.stiffness_S
            gamma = 4.0 / (m * m)
            assert fl.zhukovskii_check(mu, nu, gamma, 1e-6) is (
                fl.ZhukovskiiVerdict.STABLE_CERTIFIED
            )

    def test_certificate_implies_stable_monodromy(self):
        rng = np.random.default_rng(5)
        certified = 0
        for _ in range(30):
            mu = float(rng.uniform(0.5, 30.0))
            nu = float(rng.uniform(0.5, 4000.0))
            gamma = float(rng.uniform(0.05, 30.0))
            E = float(10.0 ** rng.uniform(-6, 2))
            if fl.zhukovskii_check(mu, nu, gamma, E) is fl.ZhukovskiiVerdict.STABLE_CERTIFIED:
                certified += 1
                res = fl.monodromy(fl.RescaledSystem(mu=mu, nu=nu, gamma=gamma, E0=E))
                assert res.verdict is fl.StabilityVerdict.STABLE
        assert certified >= 3  # the sample must actually exercise the implication

    def test_large_energy_instability_is_inconclusive(self):
        # gamma in an instability interval at huge energy: the sufficient
        # criterion cannot certify, and the monodromy says unstable
        mu, nu, gamma, E = 1.0, 2.0, 9.0, 5e5
        assert fl.zhukovskii_check(mu, nu, gamma, E) is fl.ZhukovskiiVerdict.INCONCLUSIVE
        res = fl.monodromy(fl.RescaledSystem(mu=mu, nu=nu, gamma=gamma, E0=E))
        assert res.verdict is fl.StabilityVerdict.UNSTABLE


class TestStabilityOverEnergy:
    def test_reference_pairing_window(self, config, longitudinal_pairs, torsional_pairs):
        sys = dy.TwoModeSystem.from_eigenpairs(
            longitudinal_pairs[6], torsional_pairs[2], config
        )
        # rescaled instability window sits near (83660, 100912); the grid
        # spans it with stable margins on both sides (original energies
        # carry the factor S)
        E_resc = np.array([4e4, 8.7e4, 9.0e4, 9.3e4, 2.0e5])
        points = fl.stability_over_energy(sys, list(E_resc * sys.S))
        verdicts = [p.verdict for p in points]
        assert verdicts[0] is fl.StabilityVerdict.STABLE
        assert verdicts[-1] is fl.StabilityVerdict.STABLE
        assert all(v is fl.StabilityVerdict.UNSTABLE for v in verdicts[1:4])

    def test_rejects_bad_grids(self, config, longitudinal_pairs, torsional_pairs):
        sys = dy.TwoModeSystem.from_eigenpairs(
            longitudinal_pairs[6], torsional_pairs[2], config
        )
        with pytest.raises(ValueError):
            fl.stability_over_energy(sys, [])
        with pytest.raises(ValueError):
            fl.stability_over_energy(sys, [2.0, 1.0])

    def test_csv_export(self, tmp_path, config, longitudinal_pairs, torsional_pairs):
        sys = dy.TwoModeSystem.from_eigenpairs(
            longitudinal_pairs[6], torsional_pairs[2], config
        )
        points = fl.stability_over_energy(sys, [1e4, 1e5])
        path = tmp_path / "scan.csv"
        fl.write_stability_scan_csv(sys, points, path)
        lines = path.read_text().splitlines()
        assert lines[0] == "E,mu,nu,gamma,trace,verdict"
        assert len(lines) == 3
        row = lines[1].split(",")
        assert float(row[3]) == pytest.approx(1.0 / 9.0)
