"""Scenario file parsing, validation and round trips."""

import json

import numpy as np
import pytest

import isacbeam as ib
from isacbeam.errors import ParseError, ValidationError
from isacbeam.scenario import load_scenario, save_scenario, scenario_to_dict

from conftest import SCENARIO_DIR


def test_shipped_scenario_fields():
    config = load_scenario(SCENARIO_DIR / "fig2_sigma2p5.json")
    assert config.n_tx == 20 and config.n_rx == 20
    assert config.n_users == 2
    np.testing.assert_allclose(config.sinr_targets_db, [10.0, 12.0])
    np.testing.assert_allclose(config.channel.angles_deg, [-30.0, 50.0])
    assert config.sensing.prior_mean_deg == 0.0
    assert config.sensing.prior_std_deg == 2.5
    assert config.sensing.path_gain == 1.0 + 0.0j


def test_shipped_scenario_comm_margin():
    """The local power/noise choices keep the comm-only problem feasible by 3 dB."""
    config = load_scenario(SCENARIO_DIR / "fig2_sigma2p5.json")
    feas = ib.check_feasibility(config.build())
    assert feas.feasible
    margin_db = 10 * np.log10(config.power_budget / feas.min_power)
    assert margin_db >= 3.0


def test_missing_field_names_it(tmp_path):
    data = json.loads((SCENARIO_DIR / "fig2_sigma2p5.json").read_text())
    del data["sinrTargetsDb"]
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(data))
    with pytest.raises(ValidationError) as err:
        load_scenario(path)
    assert err.value.field == "sinrTargetsDb"


def test_bad_values_rejected(tmp_path):
    base = json.loads((SCENARIO_DIR / "fig2_sigma2p5.json").read_text())
    cases = [
        ("noisePower", -1.0, "noisePower"),
        ("schemaVersion", 99, "schemaVersion"),
        ("nTx", 0, "nTx"),
    ]
    for key, value, field in cases:
        data = dict(base)
        data[key] = value
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(data))
        with pytest.raises(ValidationError) as err:
            load_scenario(path)
        assert err.value.field == field


def test_parse_error_on_garbage(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    with pytest.raises(ParseError):
        load_scenario(path)
    with pytest.raises(ParseError):
        load_scenario(tmp_path / "missing.json")


def test_los_channel_materialization():
    config = load_scenario(SCENARIO_DIR / "fig2_sigma2p5.json")
    h = config.channel_matrix()
    assert h.shape == (20, 2)
    np.testing.assert_allclose(
        h[:, 0], ib.steering_vector(20, np.deg2rad(-30.0)), atol=1e-15
    )


def test_explicit_channel_round_trip(tmp_path, rng):
    h = rng.standard_normal((4, 2)) + 1j * rng.standard_normal((4, 2))
    data = json.loads((SCENARIO_DIR / "fig2_sigma2p5.json").read_text())
    data["nTx"] = 4
    data["nRx"] = 4
    data["channel"] = {
        "type": "explicit",
        "re": np.real(h).tolist(),
        "im": np.imag(h).tolist(),
    }
    path = tmp_path / "explicit.json"
    path.write_text(json.dumps(data))
    config = load_scenario(path)
    assert np.array_equal(config.channel_matrix(), h)

    out = tmp_path / "saved.json"
    save_scenario(config, out)
    reloaded = load_scenario(out)
    assert np.array_equal(reloaded.channel_matrix(), h)
    assert scenario_to_dict(reloaded) == scenario_to_dict(config)


def test_los_round_trip(tmp_path):
    config = load_scenario(SCENARIO_DIR / "fig2_sigma10.json")
    out = tmp_path / "saved.json"
    save_scenario(config, out)
    reloaded = load_scenario(out)
    assert scenario_to_dict(reloaded) == scenario_to_dict(config)


def test_channel_shape_validation(tmp_path):
    data = json.loads((SCENARIO_DIR / "fig2_sigma2p5.json").read_text())
    data["channel"]["anglesDeg"] = [-30.0]
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(data))
    with pytest.raises(ValidationError) as err:
        load_scenario(path)
    assert "anglesDeg" in err.value.field
