"""
네트워크 설정 로딩 및 구면 기하 유도 서비스

설정 문서의 키는 단위를 접미사로 가집니다 (earth_radius_km, hap_tx_power_dbw,
hap_tx_gain_dbi, user_density_per_m2 ...). 내부에서는 SI 단위와 선형 이득만 사용합니다.
"""

import hashlib
import json
import logging
import math
from functools import lru_cache
from pathlib import Path
from typing import Any, Callable, Dict, Mapping, Optional, Tuple, Union

from dotenv import dotenv_values
from pydantic import ValidationError

from app.core.config import get_settings
from app.core.errors import ConfigError, DomainError
from app.models.network import DerivedGeometry, NetworkConfig

logger = logging.getLogger(__name__)

ConfigSource = Union[None, Mapping[str, Any], str, Path]


def db_to_linear(value_db: float) -> float:
    return 10.0 ** (value_db / 10.0)


def linear_to_db(value: float) -> float:
    if value < 0:
        raise DomainError(f"음수는 dB 로 변환할 수 없습니다: {value}")
    if value == 0:
        return float("-inf")
    return 10.0 * math.log10(value)


def dbw_to_watts(value_dbw: float) -> float:
    return db_to_linear(value_dbw)


def watts_to_dbw(value_w: float) -> float:
    return linear_to_db(value_w)


def _identity(value: float) -> float:
    return value


def _scale(factor: float) -> Callable[[float], float]:
    return lambda value: value * factor


def _build_aliases() -> Dict[str, Tuple[str, Callable[[float], float]]]:
    """입력 키 → (필드 이름, 변환 함수)"""
    aliases: Dict[str, Tuple[str, Callable[[float], float]]] = {
        name: (name, _identity) for name in NetworkConfig.model_fields
    }
    for name in ("earth_radius", "sat_shell_radius", "hap_altitude", "hap_coverage_radius"):
        aliases[f"{name}_km"] = (name, _scale(1e3))
        aliases[f"{name}_m"] = (name, _identity)
    for name in ("user_gain", "hap_rx_gain", "hap_tx_gain", "sat_gain"):
        aliases[f"{name}_dbi"] = (name, db_to_linear)
    for name in ("user_tx_power", "hap_tx_power", "hap_noise", "sat_noise"):
        aliases[f"{name}_dbw"] = (name, dbw_to_watts)
        aliases[f"{name}_w"] = (name, _identity)
    for name in ("rf_frequency", "rf_bandwidth", "fso_bandwidth"):
        aliases[f"{name}_hz"] = (name, _identity)
        aliases[f"{name}_ghz"] = (name, _scale(1e9))
    aliases["fso_wavelength_m"] = ("fso_wavelength", _identity)
    aliases["fso_wavelength_nm"] = ("fso_wavelength", _scale(1e-9))
    aliases["deviation_std_rad"] = ("deviation_std", _identity)
    aliases["deviation_std_mrad"] = ("deviation_std", _scale(1e-3))
    aliases["user_density_per_m2"] = ("user_density", _identity)
    aliases["user_density_per_km2"] = ("user_density", _scale(1e-6))
    # 위성 고도는 earth_radius 확정 후 sat_shell_radius 로 변환
    aliases["sat_altitude"] = ("sat_altitude", _identity)
    aliases["sat_altitude_m"] = ("sat_altitude", _identity)
    aliases["sat_altitude_km"] = ("sat_altitude", _scale(1e3))
    return aliases


CONFIG_KEY_ALIASES = _build_aliases()
_INTEGER_FIELDS = {"sat_count", "rician_shape"}


def _read_document(source: Union[str, Path]) -> Dict[str, Any]:
    path = Path(source)
    if not path.is_file():
        raise ConfigError("config", f"설정 파일을 찾을 수 없습니다: {path}")
    if path.suffix.lower() == ".json":
        try:
            document = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as e:
            raise ConfigError("config", f"JSON 파싱 실패: {e}") from e
        if not isinstance(document, dict):
            raise ConfigError("config", "JSON 설정은 객체여야 합니다")
        return document
    # key=value 평면 문서 (주석/빈 줄 허용)
    return {k: v for k, v in dotenv_values(path).items() if v is not None}


def _to_number(key: str, field: str, raw: Any) -> Union[int, float]:
    if isinstance(raw, bool):
        raise ConfigError(key, "숫자 값이 필요합니다")
    try:
        value = float(raw)
    except (TypeError, ValueError) as e:
        raise ConfigError(key, f"숫자로 변환할 수 없습니다: {raw!r}") from e
    if field in _INTEGER_FIELDS:
        if not value.is_integer():
            raise ConfigError(key, f"정수 값이 필요합니다: {raw!r}")
        return int(value)
    return value


def _build_config(values: Dict[str, Any], origin: Dict[str, str]) -> NetworkConfig:
    try:
        return NetworkConfig(**values)
    except ValidationError as e:
        error = e.errors()[0]
        field = str(error["loc"][0]) if error["loc"] else "sat_shell_radius"
        raise ConfigError(origin.get(field, field), error["msg"]) from e


def load_config(source: ConfigSource = None) -> NetworkConfig:
    """
    설정 문서 로드

    - source: None (기준 기본값), dict, key=value 파일 경로, JSON 파일 경로
    - 알 수 없는 키, 같은 필드를 가리키는 두 키, 검증 실패는 ConfigError (키 이름 포함)
    """
    if source is None:
        document: Mapping[str, Any] = {}
    elif isinstance(source, Mapping):
        document = source
    else:
        document = _read_document(source)

    values: Dict[str, Any] = {}
    origin: Dict[str, str] = {}
    for raw_key, raw in document.items():
        key = str(raw_key).strip().lower()
        if key not in CONFIG_KEY_ALIASES:
            raise ConfigError(key, "알 수 없는 설정 키입니다")
        field, convert = CONFIG_KEY_ALIASES[key]
        if field in origin:
            raise ConfigError(key, f"'{origin[field]}' 와 같은 값을 중복 지정했습니다")
        values[field] = convert(_to_number(key, field, raw))
        origin[field] = key

    altitude = values.pop("sat_altitude", None)
    if altitude is not None:
        if "sat_shell_radius" in values:
            raise ConfigError(
                origin["sat_altitude"], "sat_shell_radius 와 함께 지정할 수 없습니다"
            )
        earth = values.get("earth_radius", NetworkConfig.model_fields["earth_radius"].default)
        values["sat_shell_radius"] = earth + altitude
        origin["sat_shell_radius"] = origin["sat_altitude"]

    cfg = _build_config(values, origin)
    logger.debug("설정 로드 완료: %d개 키 지정", len(origin))
    return cfg


def with_overrides(cfg: NetworkConfig, **overrides: Any) -> NetworkConfig:
    """필드 값을 바꾼 새 설정 (sat_altitude 는 미터 단위 고도)"""
    values = cfg.model_dump()
    altitude = overrides.pop("sat_altitude", None)
    for key in overrides:
        if key not in values:
            raise ConfigError(key, "알 수 없는 설정 필드입니다")
    values.update(overrides)
    if altitude is not None:
        values["sat_shell_radius"] = values["earth_radius"] + float(altitude)
    origin = {key: key for key in overrides}
    if altitude is not None:
        origin["sat_shell_radius"] = "sat_altitude"
    return _build_config(values, origin)


def config_hash(cfg: NetworkConfig) -> str:
    """정규화된 JSON 의 sha256 (해석/시뮬레이션 결과 짝 맞추기용)"""
    canonical = json.dumps(cfg.model_dump(), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def to_interface_units(cfg: NetworkConfig) -> Dict[str, float]:
    """표시/문서용 단위 (km, dBi, dBW, GHz, nm, mrad) 로 변환. load_config 로 다시 읽을 수 있음"""
    return {
        "earth_radius_km": cfg.earth_radius / 1e3,
        "sat_altitude_km": cfg.sat_altitude / 1e3,
        "hap_altitude_km": cfg.hap_altitude / 1e3,
        "hap_coverage_radius_km": cfg.hap_coverage_radius / 1e3,
        "user_density_per_m2": cfg.user_density,
        "sat_count": cfg.sat_count,
        "user_tx_power_dbw": watts_to_dbw(cfg.user_tx_power),
        "user_gain_dbi": linear_to_db(cfg.user_gain),
        "hap_rx_gain_dbi": linear_to_db(cfg.hap_rx_gain),
        "rf_frequency_ghz": cfg.rf_frequency / 1e9,
        "path_loss_exponent": cfg.path_loss_exponent,
        "rician_shape": cfg.rician_shape,
        "rician_scale": cfg.rician_scale,
        "hap_noise_w": cfg.hap_noise,
        "rf_bandwidth_ghz": cfg.rf_bandwidth / 1e9,
        "hap_tx_power_dbw": watts_to_dbw(cfg.hap_tx_power),
        "hap_tx_gain_dbi": linear_to_db(cfg.hap_tx_gain),
        "sat_gain_dbi": linear_to_db(cfg.sat_gain),
        "fso_wavelength_nm": cfg.fso_wavelength / 1e-9,
        "pointing_shape": cfg.pointing_shape,
        "pointing_cap": cfg.pointing_cap,
        "deviation_std_mrad": cfg.deviation_std / 1e-3,
        "oe_coeff": cfg.oe_coeff,
        "sat_noise_w": cfg.sat_noise,
        "fso_bandwidth_ghz": cfg.fso_bandwidth / 1e9,
    }


def visibility_distance(cfg: NetworkConfig) -> float:
    """HAP-위성 가시 거리 한계 (지구에 접하는 시선)"""
    earth_sq = cfg.earth_radius**2
    return math.sqrt(cfg.hap_sphere_radius**2 - earth_sq) + math.sqrt(
        cfg.sat_shell_radius**2 - earth_sq
    )


def polar_angle_for_distance(d: float, cfg: NetworkConfig) -> float:
    """코사인 법칙의 역: 사용자-HAP 거리 d 에서 극각 θ"""
    one_minus_cos = (d * d - cfg.hap_altitude**2) / (
        2.0 * cfg.earth_radius * cfg.hap_sphere_radius
    )
    return 2.0 * math.asin(math.sqrt(max(one_minus_cos, 0.0) / 2.0))


@lru_cache(maxsize=256)
def derive_geometry(cfg: NetworkConfig) -> DerivedGeometry:
    """
    θ_max = r_H / R⊕ (지표면 측지 반경 해석), d_max 는 코사인 법칙

    1 - cos θ 는 2 sin²(θ/2) 로 계산해 작은 각에서의 상쇄 오차를 피합니다.
    """
    earth = cfg.earth_radius
    hap_radius = cfg.hap_sphere_radius
    theta_max = cfg.hap_coverage_radius / earth
    one_minus_cos = 2.0 * math.sin(0.5 * theta_max) ** 2
    d_max = math.sqrt(cfg.hap_altitude**2 + 2.0 * earth * hap_radius * one_minus_cos)
    cap_area = 2.0 * math.pi * earth**2 * one_minus_cos
    return DerivedGeometry(
        hap_sphere_radius=hap_radius,
        theta_max=theta_max,
        d_min=cfg.hap_altitude,
        one_minus_cos_theta_max=one_minus_cos,
        d_max=d_max,
        fso_d_min=cfg.sat_shell_radius - hap_radius,
        fso_d_max=visibility_distance(cfg),
        cap_area=cap_area,
        mean_user_count=cfg.user_density * cap_area,
    )


def resolve_config(
    source: ConfigSource = None,
    overrides: Optional[Mapping[str, Any]] = None,
    full_scale: bool = False,
) -> NetworkConfig:
    """
    파일/문서 설정 위에 인터페이스 단위 오버라이드를 덮어쓴 설정

    full_scale=False 이고 사용자 밀도가 어디에도 지정되지 않았으면
    데스크 스케일 밀도 (Settings.desk_user_density_per_m2) 를 씁니다.
    """
    base = {} if source is None else (
        dict(source) if isinstance(source, Mapping) else _read_document(source)
    )
    shell_fields = {"sat_altitude", "sat_shell_radius"}
    merged = dict(base)
    for key, value in (overrides or {}).items():
        field = _field_of(key)
        replaced = shell_fields if field in shell_fields else {field}
        # 같은 필드를 가리키는 기존 키 제거
        for existing in list(merged):
            if field is not None and _field_of(existing) in replaced:
                del merged[existing]
        merged[key] = value
    if not full_scale and not any(_field_of(k) == "user_density" for k in merged):
        merged["user_density_per_m2"] = get_settings().desk_user_density_per_m2
    return load_config(merged)


def _field_of(key: Any) -> Optional[str]:
    alias = CONFIG_KEY_ALIASES.get(str(key).strip().lower())
    return alias[0] if alias else None
