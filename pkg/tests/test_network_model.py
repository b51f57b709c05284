import json
import math

import pytest

from app.core.errors import ConfigError, DomainError
from app.services.network_model import (
    config_hash,
    db_to_linear,
    dbw_to_watts,
    derive_geometry,
    linear_to_db,
    load_config,
    polar_angle_for_distance,
    resolve_config,
    to_interface_units,
    visibility_distance,
    watts_to_dbw,
    with_overrides,
)


def test_defaults_follow_table_one():
    cfg = load_config()
    assert cfg.sat_count == 300
    assert cfg.sat_altitude == pytest.approx(500e3)
    assert cfg.hap_altitude == pytest.approx(20e3)
    assert cfg.hap_tx_power == pytest.approx(100.0)
    assert cfg.rf_link_constant == pytest.approx(28.45, rel=1e-3)
    assert cfg.user_density == pytest.approx(1e-5)


def test_unit_suffixed_keys():
    cfg = load_config(
        {
            "hap_tx_power_dbw": 30,
            "sat_altitude_km": 1000,
            "hap_tx_gain_dbi": 50,
            "deviation_std_mrad": 10,
            "rf_frequency_ghz": 2.4,
        }
    )
    assert cfg.hap_tx_power == pytest.approx(1000.0)
    assert cfg.sat_shell_radius == pytest.approx(6371e3 + 1000e3)
    assert cfg.hap_tx_gain == pytest.approx(1e5)
    assert cfg.deviation_std == pytest.approx(0.01)
    assert cfg.rf_frequency == pytest.approx(2.4e9)


def test_unknown_key_is_named():
    with pytest.raises(ConfigError) as info:
        load_config({"hap_power": 10})
    assert info.value.key == "hap_power"


def test_conflicting_alternatives_rejected():
    with pytest.raises(ConfigError) as info:
        load_config({"hap_tx_power_dbw": 20, "hap_tx_power_w": 100})
    assert info.value.key == "hap_tx_power_w"
    with pytest.raises(ConfigError):
        load_config({"sat_altitude_km": 500, "sat_shell_radius": 6871e3})


def test_invalid_values_carry_key():
    with pytest.raises(ConfigError) as info:
        load_config({"sat_count": 0})
    assert info.value.key == "sat_count"
    with pytest.raises(ConfigError):
        load_config({"sat_count": 1.5})
    with pytest.raises(ConfigError):
        load_config({"hap_tx_gain_dbi": "loud"})
    # R_s > R_H 위반은 고도 키 이름으로 보고
    with pytest.raises(ConfigError) as info:
        load_config({"sat_altitude_km": 10})
    assert info.value.key == "sat_altitude_km"


def test_config_error_is_value_error():
    with pytest.raises(ValueError):
        load_config({"nonsense": 1})


def test_key_value_file(tmp_path):
    path = tmp_path / "network.env"
    path.write_text(
        "# 500 km 궤도, 100 기\nsat_count=100\nsat_altitude_km=500\nhap_tx_power_dbw=25\n",
        encoding="utf-8",
    )
    cfg = load_config(path)
    assert cfg.sat_count == 100
    assert cfg.hap_tx_power == pytest.approx(dbw_to_watts(25))


def test_json_file(tmp_path):
    path = tmp_path / "network.json"
    path.write_text(json.dumps({"sat_count": 500, "user_density_per_km2": 10}))
    cfg = load_config(str(path))
    assert cfg.sat_count == 500
    assert cfg.user_density == pytest.approx(1e-5)


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError) as info:
        load_config(tmp_path / "absent.env")
    assert info.value.key == "config"


def test_interface_units_reload():
    cfg = load_config({"sat_count": 123, "hap_tx_power_dbw": 17.5})
    reloaded = load_config(to_interface_units(cfg))
    for name, value in cfg.model_dump().items():
        assert getattr(reloaded, name) == pytest.approx(value, rel=1e-12)


def test_db_conversions():
    for value in (1e-6, 0.37, 1.0, 100.0, 3.2e7):
        assert dbw_to_watts(watts_to_dbw(value)) == pytest.approx(value, rel=1e-12)
    assert db_to_linear(30.0) == pytest.approx(1000.0)
    assert linear_to_db(0.0) == -math.inf
    with pytest.raises(DomainError):
        linear_to_db(-1.0)


def test_derived_geometry():
    cfg = load_config()
    geom = derive_geometry(cfg)
    assert geom.theta_max == pytest.approx(80.0 / 6371.0, rel=1e-12)
    assert geom.d_min == pytest.approx(20e3)
    expected = math.sqrt(
        20e3**2 + 2 * 6371e3 * 6391e3 * (1 - math.cos(geom.theta_max))
    )
    assert geom.d_max == pytest.approx(expected, rel=1e-8)
    assert 82.0e3 < geom.d_max < 83.0e3
    assert geom.fso_d_min == pytest.approx(480e3)
    assert geom.fso_d_max == pytest.approx(3078.3e3, rel=1e-4)
    assert geom.mean_user_count == pytest.approx(cfg.user_density * geom.cap_area)
    assert polar_angle_for_distance(geom.d_max, cfg) == pytest.approx(
        geom.theta_max, rel=1e-9
    )


def test_visibility_distance_tangent():
    cfg = load_config()
    hap_leg = math.sqrt(6391e3**2 - 6371e3**2)
    sat_leg = math.sqrt(6871e3**2 - 6371e3**2)
    assert visibility_distance(cfg) == pytest.approx(hap_leg + sat_leg, rel=1e-12)


def test_with_overrides():
    cfg = load_config()
    moved = with_overrides(cfg, sat_altitude=1500e3, sat_count=50)
    assert moved.sat_shell_radius == pytest.approx(6371e3 + 1500e3)
    assert moved.sat_count == 50
    assert cfg.sat_count == 300
    with pytest.raises(ConfigError):
        with_overrides(cfg, warp_drive=1)


def test_config_hash():
    cfg = load_config()
    assert config_hash(cfg) == config_hash(load_config())
    assert config_hash(cfg) != config_hash(with_overrides(cfg, hap_tx_power=10.0))
    assert len(config_hash(cfg)) == 64


def test_resolve_config_density_defaults():
    assert resolve_config().user_density == pytest.approx(1e-8)
    assert resolve_config(full_scale=True).user_density == pytest.approx(1e-5)
    explicit = resolve_config(overrides={"user_density_per_km2": 3})
    assert explicit.user_density == pytest.approx(3e-6)


def test_resolve_config_overrides_replace_file_keys(tmp_path):
    path = tmp_path / "network.env"
    path.write_text("hap_tx_power_dbw=10\nsat_altitude_km=500\n", encoding="utf-8")
    cfg = resolve_config(
        path, {"hap_tx_power_w": 50, "sat_shell_radius_km": 7371}
    )
    assert cfg.hap_tx_power == pytest.approx(50.0)
    assert cfg.sat_shell_radius == pytest.approx(7371e3)
