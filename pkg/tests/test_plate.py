import math

import pytest

from platestab.plate import Eigenpair, ModeIndex, Parity, PlateConfig, ProfileRegime


def test_defaults_match_reference_setup():
    cfg = PlateConfig()
    assert cfg.half_width_l == pytest.approx(math.pi / 150.0)
    assert cfg.poisson_sigma == 0.2
    assert cfg.prestress_P == 0.48
    assert cfg.stiffness_S == 3.0


@pytest.mark.parametrize("sigma", [0.0, 0.5, 0.7, -0.1])
def test_sigma_outside_open_interval_rejected(sigma):
    with pytest.raises(ValueError):
        PlateConfig(poisson_sigma=sigma)


@pytest.mark.parametrize(
    "kwargs",
    [
        {"half_width_l": 0.0},
        {"half_width_l": -1.0},
        {"stiffness_S": 0.0},
        {"prestress_P": -0.5},
        {"damping_delta": -0.1},
    ],
)
def test_invalid_parameters_rejected(kwargs):
    with pytest.raises(ValueError):
        PlateConfig(**kwargs)


def test_mode_index_validation():
    ModeIndex(1, Parity.LONGITUDINAL, 1)
    with pytest.raises(ValueError):
        ModeIndex(0, Parity.LONGITUDINAL, 1)
    with pytest.raises(ValueError):
        ModeIndex(2, Parity.TORSIONAL, 0)


def test_eigenpair_requires_consistent_lambda():
    mode = ModeIndex(2, Parity.LONGITUDINAL, 1)
    Eigenpair(
        mode=mode,
        Lambda=3.84,
        lam=4 * 3.84,
        profile_regime=ProfileRegime.SUBCRITICAL,
        profile_coefficients=(1.0, 0.0),
        residual=0.0,
    )
    with pytest.raises(ValueError):
        Eigenpair(
            mode=mode,
            Lambda=3.84,
            lam=3.84,
            profile_regime=ProfileRegime.SUBCRITICAL,
            profile_coefficients=(1.0, 0.0),
            residual=0.0,
        )
