"""물리 파라미터 → 해석적 플랜트 모델.

빔 근사 스프링 상수 → 고유진동수 → 액추에이터 2차 모델,
시린지 펌프 적분기, 둘의 직렬 연결(3차 전체 시스템).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Any

import numpy as np

from src.errors import ActuationLimitError, ValidationError
from src.lti.analysis import poles
from src.lti.models import RationalTransferFunction
from src.plant.design import ActuatorDesign, PumpConfig

logger = logging.getLogger(__name__)

# 극점 판정 허용오차
_AXIS_TOL = 1e-9


# ------------------------------------------------------------------
# 액추에이터
# ------------------------------------------------------------------


def spring_constant(d: ActuatorDesign) -> float:
    """K = 2EI/L²."""
    return 2.0 * d.youngs_modulus * d.moment_of_inertia / d.length ** 2


def natural_frequency(d: ActuatorDesign) -> float:
    """ωn = sqrt(2EI/(ML²)) [rad/s]."""
    return math.sqrt(spring_constant(d) / d.mass)


def actuator_tf(d: ActuatorDesign, pressure_gain: float = 1.0) -> RationalTransferFunction:
    """T_SPA = (c·pressure_gain/M) / (s² + 2ζωn s + ωn²)."""
    wn = natural_frequency(d)
    gain = d.pressure_to_force_gain * pressure_gain / d.mass
    return RationalTransferFunction((gain,), (1.0, 2.0 * d.damping_ratio * wn, wn ** 2))


@dataclass(frozen=True, slots=True)
class DampedPoles:
    """공칭 복소 극점 + ζ ± Δζ 에 따른 이동 폭."""

    nominal: complex
    real_spread: float
    imag_spread: float

    def to_dict(self) -> dict[str, Any]:
        return {
            "real": self.nominal.real,
            "imag": self.nominal.imag,
            "real_spread": self.real_spread,
            "imag_spread": self.imag_spread,
        }


def damped_poles(d: ActuatorDesign) -> DampedPoles:
    """−ζωn ± jωn√(1−ζ²) 와 Δζ 섭동 시 실수부/허수부 변화 폭(반폭)."""
    wn = natural_frequency(d)

    def pole(z: float) -> complex:
        return complex(-z * wn, wn * math.sqrt(max(1.0 - z * z, 0.0)))

    lo = pole(d.damping_ratio - d.damping_perturbation)
    hi = pole(min(d.damping_ratio + d.damping_perturbation, 1.0))
    return DampedPoles(
        nominal=pole(d.damping_ratio),
        real_spread=abs(hi.real - lo.real) / 2.0,
        imag_spread=abs(hi.imag - lo.imag) / 2.0,
    )


def calibrate_pressure_gain(
    pressures: np.ndarray,
    angles: np.ndarray,
    d: ActuatorDesign,
) -> float:
    """정적 trace(굽힘각 vs 압력)에서 c 최소제곱 추정.

    정상상태에서 θ = c·P/(M·ωn²) 이므로 θ·M·ωn² 을 P 에 원점 통과 회귀.
    """
    P = np.asarray(pressures, dtype=float)
    theta = np.asarray(angles, dtype=float)
    if P.shape != theta.shape or P.size < 2:
        raise ValidationError("압력/각도 배열 길이가 다르거나 2개 미만입니다")
    denom = float(P @ P)
    if denom == 0.0:
        raise ValidationError("압력이 모두 0 — c 추정 불가")
    stiffness = d.mass * natural_frequency(d) ** 2
    c = stiffness * float(P @ theta) / denom
    if c <= 0:
        raise ValidationError(f"추정된 c 가 양수가 아닙니다: {c:.4g}")
    logger.info("압력-힘 게인 캘리브레이션: c=%.6g N/Pa (%d점)", c, P.size)
    return c


# ------------------------------------------------------------------
# 시린지 펌프
# ------------------------------------------------------------------


def pump_pressure_rate(p: PumpConfig, motor_speed: float) -> float:
    """Ṗ = l·A_s·ω_m/(2π·C_s) [Pa/s]."""
    if abs(motor_speed) > p.motor_speed_max:
        raise ActuationLimitError(
            f"모터 속도 {motor_speed:.4g} rad/s 가 한계 ±{p.motor_speed_max:.4g} 를 초과"
        )
    return p.gain * motor_speed


def pump_tf(p: PumpConfig) -> RationalTransferFunction:
    """T_PCS = (l·A_s/(2π·C_s))·(1/s). 입력은 모터 속도."""
    return RationalTransferFunction((p.gain,), (1.0, 0.0))


# ------------------------------------------------------------------
# 전체 시스템
# ------------------------------------------------------------------


def full_system_tf(d: ActuatorDesign, p: PumpConfig) -> RationalTransferFunction:
    """T_SYS = g/(s³ + 2ζωn s² + ωn² s), g = l·A_s·c/(2π·C_s·M)."""
    return pump_tf(p) * actuator_tf(d)


def system_gain(d: ActuatorDesign, p: PumpConfig) -> float:
    return p.gain * d.pressure_to_force_gain / d.mass


def open_loop_analysis(tf: RationalTransferFunction) -> dict[str, Any]:
    """극점 나열 + 안정성 판정 (stable / marginally stable / unstable).

    허수축 위 단순 극점만 있으면 marginally stable, 중복이면 unstable.
    """
    pole_list = poles(tf)
    on_axis = [p for p in pole_list if abs(p.real) <= _AXIS_TOL]
    if any(p.real > _AXIS_TOL for p in pole_list):
        verdict = "unstable"
    elif not on_axis:
        verdict = "stable"
    else:
        repeated = any(
            abs(a - b) <= 1e-6 for i, a in enumerate(on_axis) for b in on_axis[i + 1:]
        )
        verdict = "unstable" if repeated else "marginally stable"
    return {
        "poles": [{"real": p.real, "imag": p.imag} for p in pole_list],
        "verdict": verdict,
    }
