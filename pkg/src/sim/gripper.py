"""두 손가락 그리퍼 동기화 — 개루프 명령 재생 vs 폐루프 LQR 의 각도 불일치 비교.

두 손가락은 감쇠비가 ζ ± spread 이고, seed 로 뽑은 공통 ωn 오차
ε ~ U(−0.1, 0.1) 이 실제 플랜트에 곱해진다 (모델링 오차).
개루프: 공칭 폐루프가 만든 명령열을 두 손가락에 그대로 재생.
폐루프: 공칭 설계 게인을 손가락마다 독립 적용.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any

import numpy as np

from src.config import SIM_DT
from src.control.lqr import LqrWeights, lqr_gain
from src.errors import ValidationError
from src.lti.analysis import to_controllable_canonical
from src.plant.design import ActuatorDesign, PumpConfig
from src.plant.models import full_system_tf
from src.sim.engine import ReferenceSignal, simulate, simulate_command

logger = logging.getLogger(__name__)

# 공통 ωn 오차 범위 (±)
OMEGA_ERROR_SPAN = 0.1


@dataclass(frozen=True, slots=True)
class GripperStudy:
    open_loop_mismatch: float  # max |θ1 − θ2| [rad]
    closed_loop_mismatch: float
    omega_error: float
    finger_zetas: tuple[float, float]

    def to_dict(self) -> dict[str, Any]:
        return {
            "open_loop_mismatch_rad": self.open_loop_mismatch,
            "closed_loop_mismatch_rad": self.closed_loop_mismatch,
            "omega_error": self.omega_error,
            "finger_zetas": list(self.finger_zetas),
        }


def _finger(design: ActuatorDesign, zeta: float, omega_scale: float) -> ActuatorDesign:
    # ωn ∝ √I
    scaled = design.with_damping(zeta)
    return ActuatorDesign(
        youngs_modulus=scaled.youngs_modulus,
        moment_of_inertia=scaled.moment_of_inertia * omega_scale ** 2,
        mass=scaled.mass,
        length=scaled.length,
        damping_ratio=scaled.damping_ratio,
        damping_perturbation=scaled.damping_perturbation,
        pressure_to_force_gain=scaled.pressure_to_force_gain,
        name=f"{design.name}_finger",
    )


def gripper_sync_study(
    design: ActuatorDesign,
    pump: PumpConfig,
    zeta_spread: float,
    ref: ReferenceSignal,
    seed: int = 0,
    weights: LqrWeights | None = None,
    dt: float = SIM_DT,
) -> GripperStudy:
    """|zeta_spread| ≤ Δζ. spread 0 이면 두 손가락이 같아 불일치도 0."""
    if abs(zeta_spread) > design.damping_perturbation + 1e-12:
        raise ValidationError(
            f"|zeta_spread|={abs(zeta_spread):.4g} 가 Δζ={design.damping_perturbation:.4g} 를 초과"
        )
    rng = np.random.default_rng(seed)
    eps = float(rng.uniform(-OMEGA_ERROR_SPAN, OMEGA_ERROR_SPAN))

    nominal = to_controllable_canonical(full_system_tf(design, pump))
    sol = lqr_gain(nominal, weights or LqrWeights(p=1e4))
    reference_run = simulate(nominal, ref, dt, feedback=sol.feedback, warn_resolution=False)

    zetas = (design.damping_ratio + zeta_spread, design.damping_ratio - zeta_spread)
    fingers = [
        to_controllable_canonical(full_system_tf(_finger(design, z, 1.0 + eps), pump)) for z in zetas
    ]

    open_out = [
        simulate_command(f, reference_run.timestamps, reference_run.input_command) for f in fingers
    ]
    closed_out = [
        simulate(f, ref, dt, feedback=sol.feedback, warn_resolution=False).output for f in fingers
    ]
    study = GripperStudy(
        open_loop_mismatch=float(np.max(np.abs(open_out[0] - open_out[1]))),
        closed_loop_mismatch=float(np.max(np.abs(closed_out[0] - closed_out[1]))),
        omega_error=eps,
        finger_zetas=zetas,
    )
    logger.info(
        "그리퍼 동기화: spread=%.3g, ε=%.4f → 개루프 %.4g rad, 폐루프 %.4g rad",
        zeta_spread, eps, study.open_loop_mismatch, study.closed_loop_mismatch,
    )
    return study
