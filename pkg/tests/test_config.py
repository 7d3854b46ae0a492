import json

import pytest

from rydhet import ConfigError, RunConfig, TWO_PI


def test_defaults_build_cesium_system():
    cfg = RunConfig()
    atom, drive = cfg.atom_system(), cfg.drive_config()
    assert atom.gamma2 == pytest.approx(TWO_PI * 5.2e6, rel=1e-15)
    assert atom.n_eff == pytest.approx(1e14)
    assert atom.cell_length == pytest.approx(0.01)
    assert drive.omega_p == pytest.approx(TWO_PI * 5.7e6, rel=1e-15)
    assert drive.omega_L / (TWO_PI * 1e6) == pytest.approx(2.80518912072659)


def test_mhz_converted_exactly_once():
    cfg = RunConfig.from_dict({"drive": {"omega_L_mhz": 4.0, "delta_p_mhz": -1.5, "delta_beat_hz": 10.0}})
    d = cfg.drive_config()
    assert d.omega_L == TWO_PI * 1e6 * 4.0
    assert d.delta_p == TWO_PI * 1e6 * -1.5
    assert d.delta_beat == 10.0  # Hz, not angular


def test_round_trip_identity():
    data = {"description": "x", "atom": {"gamma2_mhz": 6.0, "beam_waist_mm": 1.0},
            "drive": {"omega_L_mhz": 3.0}, "sweep": {"axis": "delta_c", "n": 5,
                                                      "omega_L_series_mhz": [2, 4]},
            "optimize": {"gamma_t_mhz": [0, 0.01]}, "outputs": {"format": "json"}}
    cfg = RunConfig.from_dict(data)
    again = RunConfig.from_dict(json.loads(json.dumps(cfg.to_dict())))
    assert again == cfg
    assert again.canonical_json() == cfg.canonical_json()
    assert again.digest() == cfg.digest()


def test_beam_waist_sets_transit_rate():
    cfg = RunConfig.from_dict({"atom": {"beam_waist_mm": 1.0}})
    assert cfg.atom_system().gamma_t == pytest.approx(185672.95535549105, rel=1e-12)


@pytest.mark.parametrize("data,field", [
    ({"atom": {"gamma2_mhz": "fast"}}, "atom.gamma2_mhz"),
    ({"atom": {"bogus": 1}}, "atom.bogus"),
    ({"nonsense": {}}, "nonsense"),
    ({"drive": {"omega_p_mhz": -1.0}}, "omega_p"),
    ({"atom": {"gamma3_mhz": -1.0}}, "gamma3"),
    ({"readout": {"detection_mode": "thick"}}, "readout.detection_mode"),
    ({"readout": {"chi0_convention": "weird"}}, "readout.chi0_convention"),
    ({"sweep": {"axis": "delta_x"}}, "sweep.axis"),
    ({"sweep": {"method": "magic"}}, "sweep.method"),
    ({"sweep": {"axis": "gamma_t"}}, "sweep.method"),
    ({"sweep": {"n": 0}}, "sweep.n"),
    ({"sweep": {"n": 2.5}}, "sweep.n"),
    ({"sweep": {"lo_mhz": 5, "hi_mhz": 1}}, "sweep.hi_mhz"),
    ({"sweep": {"omega_L_series_mhz": [1, -2]}}, "sweep.omega_L_series_mhz"),
    ({"optimize": {"window_mhz": [1, 1]}}, "optimize.window_mhz"),
    ({"optimize": {"coarse_n": 1}}, "optimize.coarse_n"),
    ({"outputs": {"format": "xml"}}, "outputs.format"),
    ({"atom": {"gamma2_mhz": True}}, "atom.gamma2_mhz"),
    ({"description": 5}, "description"),
])
def test_invalid_fields_are_named(data, field):
    with pytest.raises(ConfigError, match=field.replace(".", r"\.")):
        RunConfig.from_dict(data)


def test_load_rejects_bad_json(tmp_path):
    p = tmp_path / "c.json"
    p.write_text("{not json")
    with pytest.raises(ConfigError):
        RunConfig.load(p)
