"""Flat key=value config: parsing, defaults, overrides, builders."""

import pytest

from koopesc.config import AUTO, Config, ConfigError, load as load_config, parse


def test_defaults_build_dataclasses():
    cfg = Config()
    p = cfg.plant_params()
    assert p.dt == 0.005
    assert p.theta_star == -3.0
    ip = cfg.interference_params()
    assert ip.enabled
    tc = cfg.training_config()
    assert tc.n_trajectories == 100
    assert tc.seed == 0
    det = cfg.detector_config()
    assert det.dt == p.dt
    relay = cfg.relay_config()
    assert relay.step_k == pytest.approx(p.dt / 15.0)


def test_parse_overrides_and_comments():
    cfg = parse(
        "# a comment\n"
        "\n"
        "plant.dt = 0.01\n"
        "seed=7\n"
        "interference.enabled = off\n"
        "relay.step_k = 0.002\n"
    )
    assert cfg["plant.dt"] == 0.01
    assert cfg["seed"] == 7
    assert not cfg["interference.enabled"]
    assert cfg.relay_config().step_k == 0.002


def test_parse_auto_step_follows_dt():
    cfg = parse("plant.dt = 0.03\nrelay.step_k = auto\n")
    assert cfg["relay.step_k"] == AUTO
    assert cfg.relay_config().step_k == pytest.approx(0.03 / 15.0)


def test_parse_unknown_key_rejected():
    with pytest.raises(ConfigError) as info:
        parse("plant.dt = 0.01\nno.such.key = 3\n")
    assert "no.such.key" in str(info.value)


def test_parse_bad_values_rejected():
    with pytest.raises(ConfigError):
        parse("plant.dt = fast\n")
    with pytest.raises(ConfigError):
        parse("seed = 1.5\n")
    with pytest.raises(ConfigError):
        parse("interference.enabled = maybe\n")
    with pytest.raises(ConfigError):
        parse("relay.step_k = slow\n")
    with pytest.raises(ConfigError):
        parse("just a line without equals\n")


def test_set_checks_keys():
    cfg = Config()
    cfg.set("seed", 12)
    assert cfg["seed"] == 12
    with pytest.raises(ConfigError):
        cfg.set("bogus", 1)


def test_load_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "absent.cfg")


def test_load_round_trips_through_dump(tmp_path):
    cfg = Config()
    cfg.set("plant.dt", 0.01)
    cfg.set("run.duration", 123.0)
    path = tmp_path / "c.cfg"
    path.write_text(cfg.dump())
    back = load_config(path)
    assert back.values == cfg.values
