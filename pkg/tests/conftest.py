"""공용 fixture — 설계 프리셋, 펌프, 해석 모델."""

from __future__ import annotations

import pytest

from src.lti.analysis import to_controllable_canonical
from src.plant.design import DEFAULT_PUMP, DESIGN_PRESETS, ActuatorDesign, PumpConfig
from src.plant.models import full_system_tf


@pytest.fixture
def design1() -> ActuatorDesign:
    return DESIGN_PRESETS["design1"]


@pytest.fixture
def design4() -> ActuatorDesign:
    return DESIGN_PRESETS["design4"]


@pytest.fixture
def pump() -> PumpConfig:
    return DEFAULT_PUMP


@pytest.fixture
def plant1(design1, pump):
    """Design 1 전체 시스템 가제어 정준형."""
    return to_controllable_canonical(full_system_tf(design1, pump))


@pytest.fixture
def plant4(design4, pump):
    return to_controllable_canonical(full_system_tf(design4, pump))
