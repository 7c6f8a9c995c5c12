"""프로젝트 설정 JSON 스키마 (pydantic v2).

단위: 길이 m, 탄성계수 Pa, 질량 kg (또는 무게 N → 자동 변환), 시간 s,
각도 rad (문자열 "90deg" 처럼 접미사가 있으면 변환).
알 수 없는 키는 거부한다.
"""

from __future__ import annotations

import hashlib
import json
import logging
import math
from pathlib import Path
from typing import Any, Literal

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from pydantic import ValidationError as PydanticValidationError

from src.config import (
    LQR_DEFAULT_VELOCITY_WEIGHT,
    SETTLING_BAND,
    SETTLING_BAND_MAX,
    SIM_DT,
    SIM_HORIZON,
    SPA_OUT_DIR,
)
from src.control.lqr import LqrWeights
from src.errors import ValidationError
from src.plant.design import ActuatorDesign, PumpConfig, mass_from_weight

logger = logging.getLogger(__name__)


def parse_angle(value: float | int | str) -> float:
    """숫자 → rad 그대로. "90deg" / "1.57rad" 문자열은 접미사에 따라 변환."""
    if isinstance(value, bool):
        raise ValueError("각도는 숫자 또는 '<값>deg' / '<값>rad' 문자열")
    if isinstance(value, (int, float)):
        angle = float(value)
    else:
        text = value.strip().lower()
        if text.endswith("deg"):
            angle = math.radians(float(text[:-3]))
        elif text.endswith("rad"):
            angle = float(text[:-3])
        else:
            raise ValueError(f"각도 문자열에는 deg 또는 rad 접미사가 필요합니다: {value!r}")
    if not math.isfinite(angle):
        raise ValueError(f"각도가 유한하지 않습니다: {value!r}")
    return angle


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class ActuatorSpec(_Strict):
    """질량은 mass_kg 또는 weight_n 중 하나만."""

    youngs_modulus: float = Field(gt=0, description="E [Pa]")
    moment_of_inertia: float = Field(gt=0, description="I [m⁴]")
    length: float = Field(gt=0, description="L [m]")
    mass_kg: float | None = Field(default=None, gt=0, description="M [kg]")
    weight_n: float | None = Field(default=None, gt=0, description="무게 [N], M = W/g 로 변환")
    damping_ratio: float = Field(default=0.6, gt=0, lt=1)
    damping_perturbation: float = Field(default=0.1, ge=0)
    pressure_to_force_gain: float = Field(default=1.0, gt=0, description="c [N/Pa]")
    name: str = "custom"

    @model_validator(mode="after")
    def _check(self) -> ActuatorSpec:
        if (self.mass_kg is None) == (self.weight_n is None):
            raise ValueError("mass_kg 와 weight_n 중 정확히 하나만 지정하세요")
        if self.damping_ratio - self.damping_perturbation <= 0:
            raise ValueError("damping_ratio − damping_perturbation 은 양수여야 합니다")
        return self

    @property
    def mass(self) -> float:
        return self.mass_kg if self.mass_kg is not None else mass_from_weight(self.weight_n)

    def to_design(self) -> ActuatorDesign:
        return ActuatorDesign(
            youngs_modulus=self.youngs_modulus,
            moment_of_inertia=self.moment_of_inertia,
            mass=self.mass,
            length=self.length,
            damping_ratio=self.damping_ratio,
            damping_perturbation=self.damping_perturbation,
            pressure_to_force_gain=self.pressure_to_force_gain,
            name=self.name,
        )


class PumpSpec(_Strict):
    screw_lead: float = Field(gt=0, description="l [m/rev]")
    syringe_area: float = Field(gt=0, description="A_s [m²]")
    actuator_capacity: float = Field(gt=0, description="C_s")
    motor_speed_max: float = Field(gt=0, description="ω_m 한계 [rad/s]")

    def to_pump(self) -> PumpConfig:
        return PumpConfig(**self.model_dump())


class LqrSpec(_Strict):
    """Q = p·diag(1, velocity_weight, 0). tune=true 면 정착 시간 목표로 p 이분 탐색."""

    p: float = Field(default=1e4, gt=0)
    R: float = Field(default=1.0, gt=0)
    velocity_weight: float = Field(default=LQR_DEFAULT_VELOCITY_WEIGHT, ge=0)
    settling_band: float = Field(default=SETTLING_BAND, gt=0, le=SETTLING_BAND_MAX)
    tune: bool = False
    target_settling_s: float | None = Field(default=None, gt=0)
    settling_window_s: tuple[float, float] | None = None

    @model_validator(mode="after")
    def _check(self) -> LqrSpec:
        if self.tune and (self.target_settling_s is None or self.settling_window_s is None):
            raise ValueError("tune=true 이면 target_settling_s 와 settling_window_s 가 필요합니다")
        if self.settling_window_s is not None:
            lo, hi = self.settling_window_s
            if not 0 < lo < hi:
                raise ValueError(f"settling_window_s 는 0 < lo < hi: {self.settling_window_s}")
        return self

    def to_weights(self, p: float | None = None) -> LqrWeights:
        return LqrWeights(p=p or self.p, R=self.R, velocity_weight=self.velocity_weight)


class SimSpec(_Strict):
    dt: float = Field(default=SIM_DT, gt=0, description="[s]")
    horizon: float = Field(default=SIM_HORIZON, gt=0, description="[s]")
    square_period: float = Field(default=4.0, gt=0, description="[s]")
    amplitude: float = Field(default=math.pi / 2, description="[rad] 또는 '90deg'")
    saturate: bool = False  # true 면 명령을 ±motor_speed_max 로 clamp

    @field_validator("amplitude", mode="before")
    @classmethod
    def _angle(cls, value: Any) -> float:
        return parse_angle(value)

    @model_validator(mode="after")
    def _check(self) -> SimSpec:
        if self.dt >= self.horizon:
            raise ValueError(f"dt({self.dt}) 는 horizon({self.horizon}) 보다 작아야 합니다")
        return self


class SysidSpec(_Strict):
    hankel_rows: int = Field(default=20, ge=2)
    order: int | Literal["auto"] = "auto"
    weight_order: Literal[0, 1, 2] = 1
    step_amplitude: float = Field(default=1.0, description="fit-zeta step 입력 크기")


class RobustSpec(_Strict):
    samples: int = Field(default=200, ge=1)


class GripperSpec(_Strict):
    zeta_spread: float = Field(default=0.1, ge=0)
    amplitude: float = Field(default=math.pi / 2)

    @field_validator("amplitude", mode="before")
    @classmethod
    def _angle(cls, value: Any) -> float:
        return parse_angle(value)


class PathsSpec(_Strict):
    """상대 경로는 설정 파일 위치 기준 (resolve_path)."""

    traces_dir: str | None = None
    out_dir: str = SPA_OUT_DIR
    step_pattern: str = Field(default="step_*.csv", min_length=1, description="fit-zeta 입력")
    ident_pattern: str = Field(default="prbs_*.csv", min_length=1, description="sysid 입력")


class SynthSpec(_Strict):
    """synth-traces: ζ ± Δζ 를 고르게 나눈 합성 step / PRBS 실험 묶음."""

    traces: int = Field(default=7, ge=1)
    step_horizon: float = Field(default=10.0, gt=0, description="[s]")
    prbs_samples: int = Field(default=1200, ge=16)
    prbs_sample_time: float = Field(default=0.05, gt=0, description="[s]")
    prbs_hold: int = Field(default=10, ge=1)
    noise_fraction: float = Field(default=0.0, ge=0, description="잡음 표준편차 / 출력 표준편차")


class ProjectConfig(_Strict):
    actuator: ActuatorSpec
    pump: PumpSpec
    lqr: LqrSpec = LqrSpec()
    sim: SimSpec = SimSpec()
    sysid: SysidSpec = SysidSpec()
    robust: RobustSpec = RobustSpec()
    gripper: GripperSpec = GripperSpec()
    synth: SynthSpec = SynthSpec()
    paths: PathsSpec = PathsSpec()

    @model_validator(mode="after")
    def _check(self) -> ProjectConfig:
        if self.gripper.zeta_spread > self.actuator.damping_perturbation + 1e-12:
            raise ValueError("gripper.zeta_spread 는 actuator.damping_perturbation 이하여야 합니다")
        return self

    def config_hash(self) -> str:
        """정규화 JSON 의 sha256 — manifest / 실행 이력 키."""
        canonical = json.dumps(self.model_dump(mode="json"), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


# ------------------------------------------------------------------
# 로드
# ------------------------------------------------------------------


def resolve_path(raw: str | Path, config_path: str | Path | None) -> Path:
    """설정 안의 상대 경로 → 설정 파일 디렉터리 기준 경로."""
    path = Path(raw)
    if path.is_absolute() or config_path is None:
        return path
    return Path(config_path).parent / path


def _format_errors(exc: PydanticValidationError) -> str:
    lines = []
    for err in exc.errors():
        loc = ".".join(str(p) for p in err["loc"]) or "<root>"
        lines.append(f"{loc}: {err['msg']}")
    return "; ".join(lines)


def parse_config(data: dict[str, Any]) -> ProjectConfig:
    try:
        return ProjectConfig.model_validate(data)
    except PydanticValidationError as e:
        raise ValidationError(f"설정 검증 실패 — {_format_errors(e)}") from None


def load_config(path: str | Path) -> ProjectConfig:
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ValidationError(f"설정 파일이 없습니다: {path}") from None
    except json.JSONDecodeError as e:
        raise ValidationError(f"{path}:{e.lineno}: JSON 파싱 실패 — {e.msg}") from None
    if not isinstance(data, dict):
        raise ValidationError(f"{path}: 최상위는 객체여야 합니다")
    config = parse_config(data)
    logger.info("설정 로드: %s (hash=%s)", path, config.config_hash()[:12])
    return config
