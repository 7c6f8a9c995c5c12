"""곱셈 불확실성 강건 안정성 — small-gain 판정과 랜덤 Δ 표본 검증.

‖W_T · TK/(1+TK)‖∞ < 1 이면 ‖Δ‖∞ ≤ 1 인 모든 안정 Δ 에 대해
T(1 + Δ·W_T) 폐루프가 안정하다.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any

import numpy as np

from src.config import HINF_OMEGA_MAX, HINF_OMEGA_MIN, ROBUST_SAMPLES
from src.errors import NominalInstabilityError, RobustnessPreconditionError, ValidationError
from src.lti.analysis import hinf_norm
from src.lti.models import RationalTransferFunction

logger = logging.getLogger(__name__)


@dataclass(frozen=True, slots=True)
class RobustnessResult:
    margin: float
    passed: bool

    def to_dict(self) -> dict[str, Any]:
        return {"margin": self.margin, "pass": self.passed}


def closed_loop_poles(
    plant: RationalTransferFunction,
    controller: RationalTransferFunction,
) -> np.ndarray:
    """1 + PK = 0 의 근 (특성 다항식 den_L + num_L)."""
    loop = plant * controller
    char = np.polyadd(loop.den, loop.num)
    char = np.trim_zeros(char, "f")
    if char.size < 2:
        return np.array([], dtype=complex)
    return np.roots(char)


def _is_hurwitz_poly(roots: np.ndarray) -> bool:
    return bool(np.all(roots.real < 0))


def robust_stability_check(
    nominal: RationalTransferFunction,
    weight: RationalTransferFunction,
    controller: RationalTransferFunction,
) -> RobustnessResult:
    """margin = ‖W_T · TK/(1+TK)‖∞, pass ⇔ margin < 1.

    공칭 폐루프가 불안정하면 NominalInstabilityError.
    """
    cl_poles = closed_loop_poles(nominal, controller)
    if not _is_hurwitz_poly(cl_poles):
        worst = max(cl_poles, key=lambda p: p.real)
        raise NominalInstabilityError(
            f"공칭 폐루프 불안정 — 최대 실수부 극점 {worst:.4g}"
        )
    comp_sensitivity = (nominal * controller).feedback()
    margin = hinf_norm(weight * comp_sensitivity)
    result = RobustnessResult(margin=float(margin), passed=bool(margin < 1.0))
    logger.info("강건 안정성: margin=%.4f → %s", result.margin, "PASS" if result.passed else "FAIL")
    return result


# ------------------------------------------------------------------
# 표본 검증
# ------------------------------------------------------------------


def random_delta(rng: np.random.Generator) -> RationalTransferFunction:
    """‖Δ‖∞ ≤ 1 인 안정 1차 Δ — all-pass δ(b−s)/(b+s) 또는 low-pass δ·b/(s+b)."""
    delta = float(rng.uniform(-1.0, 1.0))
    b = float(10.0 ** rng.uniform(np.log10(HINF_OMEGA_MIN), np.log10(HINF_OMEGA_MAX)))
    if rng.integers(2) == 0:
        return RationalTransferFunction((delta * b,), (1.0, b))
    return RationalTransferFunction((-delta, delta * b), (1.0, b))


def sample_family_verify(
    nominal: RationalTransferFunction,
    weight: RationalTransferFunction,
    controller: RationalTransferFunction,
    n_samples: int = ROBUST_SAMPLES,
    seed: int = 0,
) -> bool:
    """robust_stability_check 통과 설계에 대해 랜덤 Δ 모델군 폐루프 안정성 확인."""
    if n_samples < 1:
        raise ValidationError(f"n_samples 는 1 이상이어야 합니다: {n_samples}")
    check = robust_stability_check(nominal, weight, controller)
    if not check.passed:
        raise RobustnessPreconditionError(
            f"small-gain 판정 실패 (margin={check.margin:.4g}) — 표본 검증 전제 불충족"
        )

    rng = np.random.default_rng(seed)
    one = RationalTransferFunction.constant(1.0)
    for k in range(n_samples):
        delta = random_delta(rng)
        perturbed = nominal * (one + delta * weight)
        cl_poles = closed_loop_poles(perturbed, controller)
        if not _is_hurwitz_poly(cl_poles):
            logger.warning(
                "표본 %d 불안정: Δ=%s, 최대 실수부 %.4g",
                k, delta.to_dict(), float(cl_poles.real.max()),
            )
            return False
    logger.info("표본 검증 %d개 모두 안정 (seed=%d)", n_samples, seed)
    return True
