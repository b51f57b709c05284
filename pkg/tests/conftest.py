import numpy as np
import pytest

from app.models.network import NetworkConfig
from app.services.network_model import derive_geometry, resolve_config


@pytest.fixture(scope="session")
def cfg() -> NetworkConfig:
    """기준 기본값 + 데스크 스케일 사용자 밀도 (1e-8 /m²)"""
    return resolve_config()


@pytest.fixture(scope="session")
def geom(cfg):
    return derive_geometry(cfg)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20250101)


def ks_critical(n: int) -> float:
    """일표본 KS 임계값 (α ≈ 0.01)"""
    return 1.63 / np.sqrt(n)
