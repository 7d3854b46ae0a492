import math

import pytest

from rydhet import (
    TWO_PI,
    AtomSystem,
    DetectionMode,
    DriveConfig,
    ReadoutConfig,
    optimal_local_rabi,
    transit_rate,
)
from rydhet.model import CS_MASS

from conftest import MHZ


def test_cesium_rates_match_published_lifetimes():
    atom = AtomSystem.cesium()
    assert atom.gamma2 == pytest.approx(TWO_PI * 5.2e6, rel=1e-15)
    assert atom.gamma3 == pytest.approx(TWO_PI * 3.9e3, rel=1e-15)
    assert atom.gamma4 == pytest.approx(TWO_PI * 1.7e3, rel=1e-15)
    assert atom.gamma_c == 0.0 and atom.gamma_t == 0.0
    assert atom.n_eff == pytest.approx(1e14)


def test_cesium_drive_defaults():
    drive = DriveConfig.cesium(omega_L=4 * MHZ)
    assert drive.omega_p == pytest.approx(5.7 * MHZ)
    assert drive.omega_c == pytest.approx(0.97 * MHZ)


def test_idealized_zeroes_secondary_rates():
    atom = AtomSystem.cesium(gamma_c=1.0, gamma_t=2.0).idealized()
    assert (atom.gamma3, atom.gamma4, atom.gamma_c, atom.gamma_t) == (0, 0, 0, 0)
    assert atom.gamma2 == AtomSystem.cesium().gamma2


@pytest.mark.parametrize("field", ["gamma2", "gamma3", "gamma_t"])
def test_negative_rate_rejected_naming_field(field):
    kwargs = {"gamma2": 1.0, field: -1.0}
    with pytest.raises(ValueError, match=field):
        AtomSystem(**kwargs)


@pytest.mark.parametrize("field", ["omega_p", "omega_c", "omega_L"])
def test_nonpositive_rabi_rejected(field):
    kwargs = dict(omega_p=1.0, omega_c=1.0, omega_L=1.0)
    kwargs[field] = 0.0
    with pytest.raises(ValueError, match=field):
        DriveConfig(**kwargs)


def test_nonfinite_rejected():
    with pytest.raises(ValueError):
        DriveConfig(omega_p=1.0, omega_c=1.0, omega_L=math.inf)
    with pytest.raises(ValueError):
        AtomSystem(gamma2=math.nan)


def test_perturbative_threshold():
    base = DriveConfig(omega_p=1.0, omega_c=1.0, omega_L=10.0)
    assert base.replace(omega_s=0.99).is_perturbative
    assert not base.replace(omega_s=1.0).is_perturbative


def test_microwave_coupling_and_effective_rabi():
    d = DriveConfig(omega_p=1.0, omega_c=1.0, omega_L=3.0, omega_s=1.0)
    assert d.microwave_coupling(0.0) == pytest.approx(4.0)
    assert d.microwave_coupling(math.pi / 2) == pytest.approx(3.0 - 1.0j)
    assert d.effective_rabi(math.pi) == pytest.approx(2.0)


def test_signal_phase():
    d = DriveConfig(omega_p=1.0, omega_c=1.0, omega_L=1.0, delta_beat=1e3, phi_s=0.5)
    assert d.signal_phase(1e-3) == pytest.approx(TWO_PI + 0.5)


def test_transit_rate_frozen():
    # mean thermal speed of Cs at 300 K over a 1 mm waist
    assert transit_rate(1e-3, CS_MASS, 300.0) == pytest.approx(185672.95535549105, rel=1e-12)


def test_transit_rate_scales_inverse_waist():
    assert transit_rate(0.5e-3, CS_MASS, 300.0) == pytest.approx(2 * transit_rate(1e-3, CS_MASS, 300.0))


@pytest.mark.parametrize("name", ["beam_waist", "mass", "temperature"])
def test_transit_rate_rejects_nonpositive(name):
    kwargs = dict(beam_waist=1e-3, mass=CS_MASS, temperature=300.0)
    kwargs[name] = 0.0
    with pytest.raises(ValueError, match=name):
        transit_rate(**kwargs)


def test_optimal_local_rabi_frozen():
    value = optimal_local_rabi(5.7 * MHZ, 0.97 * MHZ, 5.2 * MHZ)
    assert value / MHZ == pytest.approx(2.80518912072659, rel=1e-12)


def test_cesium_drive_defaults_to_optimal_local_rabi():
    assert DriveConfig.cesium().omega_L == pytest.approx(
        optimal_local_rabi(5.7 * MHZ, 0.97 * MHZ, 5.2 * MHZ))


def test_readout_config_validation():
    assert ReadoutConfig(detection_mode="high_transmittance").detection_mode is \
        DetectionMode.HIGH_TRANSMITTANCE
    with pytest.raises(ValueError, match="input_power"):
        ReadoutConfig(input_power=0.0)
    with pytest.raises(ValueError, match="chi0_sign"):
        ReadoutConfig(chi0_sign=0.5)
    with pytest.raises(ValueError):
        ReadoutConfig(detection_mode="bogus")
