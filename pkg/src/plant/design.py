"""액추에이터 / 시린지 펌프 물리 파라미터 + 설계 프리셋.

단위: SI. 질량은 kg로 저장 (무게 N 단위 입력은 mass_from_weight로 변환).
I(단면 2차 모멘트)는 공개되지 않았으므로 필수 입력이며,
프리셋은 추정 ωn 에서 역산한 I 를 사용한다.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, replace
from typing import Any

from src.config import GRAVITY
from src.errors import ValidationError


def mass_from_weight(weight_n: float, gravity: float = GRAVITY) -> float:
    """무게(N) → 질량(kg)."""
    if weight_n <= 0:
        raise ValidationError(f"무게는 양수여야 합니다: {weight_n}")
    return weight_n / gravity


def moment_of_inertia_from_frequency(
    youngs_modulus: float,
    mass: float,
    length: float,
    omega_n: float,
) -> float:
    """ωn = sqrt(2EI/(ML²)) 역산 → I = ωn²·M·L²/(2E)."""
    return omega_n ** 2 * mass * length ** 2 / (2.0 * youngs_modulus)


@dataclass(frozen=True, slots=True)
class ActuatorDesign:
    """소프트 공압 액추에이터 1개의 물리 파라미터."""

    youngs_modulus: float  # E [Pa]
    moment_of_inertia: float  # I [m⁴]
    mass: float  # M [kg]
    length: float  # L [m]
    damping_ratio: float = 0.6  # ζ
    damping_perturbation: float = 0.1  # Δζ
    pressure_to_force_gain: float = 1.0  # c [N/Pa]
    name: str = "custom"

    def __post_init__(self) -> None:
        for field_name in ("youngs_modulus", "moment_of_inertia", "mass", "length"):
            value = getattr(self, field_name)
            if not (math.isfinite(value) and value > 0):
                raise ValidationError(f"{field_name} 은(는) 양수여야 합니다: {value}")
        if not 0 < self.damping_ratio < 1:
            raise ValidationError(
                f"damping_ratio 는 (0, 1) 범위여야 합니다 (과소감쇠 가정): {self.damping_ratio}"
            )
        if self.damping_perturbation < 0:
            raise ValidationError(f"damping_perturbation 은 0 이상: {self.damping_perturbation}")
        if self.damping_ratio - self.damping_perturbation <= 0:
            raise ValidationError("ζ − Δζ 는 양수여야 합니다")
        if not self.pressure_to_force_gain > 0:
            raise ValidationError(
                f"pressure_to_force_gain 은 양수여야 합니다: {self.pressure_to_force_gain}"
            )

    def with_damping(self, damping_ratio: float) -> ActuatorDesign:
        """ζ 만 바꾼 사본. Δζ 는 새 ζ 범위에 맞게 잘라낸다."""
        delta = min(self.damping_perturbation, max(damping_ratio - 1e-9, 0.0))
        return replace(self, damping_ratio=damping_ratio, damping_perturbation=delta)

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


@dataclass(frozen=True, slots=True)
class PumpConfig:
    """시린지 펌프: 리드스크류 + 시린지 + 액추에이터 용량."""

    screw_lead: float  # l [m/rev]
    syringe_area: float  # A_s [m²]
    actuator_capacity: float  # C_s [부피/압력, 단위 pass-through]
    motor_speed_max: float  # ω_m_max [rad/s]

    def __post_init__(self) -> None:
        for field_name in ("screw_lead", "syringe_area", "actuator_capacity", "motor_speed_max"):
            value = getattr(self, field_name)
            if not (math.isfinite(value) and value > 0):
                raise ValidationError(f"{field_name} 은(는) 양수여야 합니다: {value}")

    @property
    def gain(self) -> float:
        """Ṗ/ω_m = l·A_s/(2π·C_s)."""
        return self.screw_lead * self.syringe_area / (2.0 * math.pi * self.actuator_capacity)

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


# ------------------------------------------------------------------
# 프리셋: 추정 ωn 과 E, 무게, L 은 측정 보고값
# ------------------------------------------------------------------
# (name, E [Pa], weight [N], L [m], 추정 ωn [rad/s], Δζ)
_TABLE_DESIGNS: tuple[tuple[str, float, float, float, float, float], ...] = (
    ("design1", 0.34e6, 0.17, 0.94, 1.812, 0.1),
    ("design2", 0.26e6, 0.24, 0.94, 1.372, 0.1),
    ("design3", 0.34e6, 0.20, 0.106, 1.422, 0.1),
    ("design4", 10e6, 0.04, 0.060, 8.709, 0.05),
)

ESTIMATED_OMEGA_N: dict[str, float] = {row[0]: row[4] for row in _TABLE_DESIGNS}

DEFAULT_PUMP = PumpConfig(
    screw_lead=0.002,
    syringe_area=4.9e-4,
    actuator_capacity=1e-8,
    motor_speed_max=100.0,
)


def _build_presets() -> dict[str, ActuatorDesign]:
    presets: dict[str, ActuatorDesign] = {}
    for name, E, weight, L, omega_n, delta in _TABLE_DESIGNS:
        M = mass_from_weight(weight)
        presets[name] = ActuatorDesign(
            youngs_modulus=E,
            moment_of_inertia=moment_of_inertia_from_frequency(E, M, L, omega_n),
            mass=M,
            length=L,
            damping_ratio=0.6,
            damping_perturbation=delta,
            name=name,
        )
    return presets


DESIGN_PRESETS: dict[str, ActuatorDesign] = _build_presets()
