"""반복 실험 모델군 → 상대오차 envelope → 곱셈 불확실성 가중치 W_T.

|T_k(jω)/T(jω) − 1| ≤ |W_T(jω)| 를 격자 전체에서 만족하는 저차(0~2) 가중치를
로그 크기 최소제곱으로 맞춘 뒤 게인을 올려 overbound 를 보장한다.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass
from typing import Any

import numpy as np
from scipy import optimize

from src.config import ENVELOPE_DECADES, ENVELOPE_GRID_POINTS
from src.errors import DegenerateDivisionError, ValidationError
from src.lti.analysis import LtiSystem, evaluate_response, is_stable
from src.lti.models import RationalTransferFunction

logger = logging.getLogger(__name__)

# 공칭 크기가 이보다 작으면 상대오차 분모 퇴화
_NOMINAL_FLOOR = 1e-12
# order 1/2 게인 shift 여유 (반올림으로 등호가 깨지지 않게)
_SHIFT_MARGIN = 1.0 + 1e-9
# 2차 가중치 감쇠 계수 범위
_ZETA_BOUNDS = (0.05, 5.0)


@dataclass(frozen=True, slots=True, eq=False)
class UncertainPlant:
    """공칭 모델 + 가중치 + 격자별 실험 상대오차."""

    nominal: RationalTransferFunction
    weight: RationalTransferFunction
    sample_omegas: np.ndarray
    relative_errors: np.ndarray  # (실험 수, 격자 수)

    def __post_init__(self) -> None:
        w = np.asarray(self.sample_omegas, dtype=float)
        errs = np.atleast_2d(np.asarray(self.relative_errors, dtype=float))
        if errs.shape[1] != w.size:
            raise ValidationError(f"상대오차 열 수 {errs.shape[1]} ≠ 격자 {w.size}")
        if not self.weight.is_proper or not is_stable(self.weight):
            raise ValidationError("W_T 는 안정하고 proper 여야 합니다")
        weight_mag = np.abs(evaluate_response(self.weight, w))
        envelope = errs.max(axis=0)
        if np.any(weight_mag < envelope * (1.0 - 1e-9)):
            worst = int(np.argmax(envelope - weight_mag))
            raise ValidationError(
                f"W_T 가 ω={w[worst]:.4g} 에서 envelope 를 덮지 못합니다 "
                f"({weight_mag[worst]:.4g} < {envelope[worst]:.4g})"
            )
        object.__setattr__(self, "sample_omegas", w)
        object.__setattr__(self, "relative_errors", errs)

    @property
    def envelope(self) -> np.ndarray:
        return self.relative_errors.max(axis=0)

    def weight_magnitude(self) -> np.ndarray:
        return np.abs(evaluate_response(self.weight, self.sample_omegas))

    def to_dict(self) -> dict[str, Any]:
        return {
            "nominal": self.nominal.to_dict(),
            "weight": self.weight.to_dict(),
            "omegas": self.sample_omegas.tolist(),
            "envelope": self.envelope.tolist(),
            "relative_errors": self.relative_errors.tolist(),
        }


def default_envelope_grid(omega_n: float, points: int = ENVELOPE_GRID_POINTS) -> np.ndarray:
    """[ωn/100, 100·ωn] 로그 격자."""
    span = 10.0 ** ENVELOPE_DECADES
    return np.logspace(np.log10(omega_n / span), np.log10(omega_n * span), points)


# ------------------------------------------------------------------
# envelope
# ------------------------------------------------------------------


def relative_errors(
    nominal: RationalTransferFunction,
    family: Sequence[LtiSystem],
    omegas: Sequence[float] | np.ndarray,
) -> np.ndarray:
    """(실험 k, 격자 i) 별 |T_k(jω_i)/T(jω_i) − 1|."""
    if not family:
        raise ValidationError("모델군이 비어 있습니다")
    w = np.asarray(omegas, dtype=float)
    h_nom = evaluate_response(nominal, w)
    small = np.abs(h_nom) < _NOMINAL_FLOOR
    if np.any(small):
        idx = int(np.argmax(small))
        raise DegenerateDivisionError(float(w[idx]), float(abs(h_nom[idx])))
    return np.vstack([np.abs(evaluate_response(m, w) / h_nom - 1.0) for m in family])


def relative_error_envelope(
    nominal: RationalTransferFunction,
    family: Sequence[LtiSystem],
    omegas: Sequence[float] | np.ndarray,
) -> np.ndarray:
    """격자별 max_k |T_k/T − 1|."""
    return relative_errors(nominal, family, omegas).max(axis=0)


# ------------------------------------------------------------------
# 가중치 피팅
# ------------------------------------------------------------------


def _log_mag_first(params: np.ndarray, w: np.ndarray) -> np.ndarray:
    log_k, log_a, log_b = params
    a, b = np.exp(log_a), np.exp(log_b)
    return log_k + 0.5 * np.log(w ** 2 + a ** 2) - 0.5 * np.log(w ** 2 + b ** 2)


def _log_mag_second(params: np.ndarray, w: np.ndarray) -> np.ndarray:
    log_k, log_a, log_b, log_za, log_zb = params
    a, b, za, zb = np.exp(log_a), np.exp(log_b), np.exp(log_za), np.exp(log_zb)
    num = (a ** 2 - w ** 2) ** 2 + (2.0 * za * a * w) ** 2
    den = (b ** 2 - w ** 2) ** 2 + (2.0 * zb * b * w) ** 2
    return log_k + 0.5 * np.log(num) - 0.5 * np.log(den)


def _build_weight(order: int, params: np.ndarray) -> RationalTransferFunction:
    k = float(np.exp(params[0]))
    if order == 1:
        a, b = np.exp(params[1:3])
        return RationalTransferFunction((k, k * a), (1.0, b))
    a, b, za, zb = np.exp(params[1:5])
    return RationalTransferFunction((k, 2.0 * za * a * k, a * a * k), (1.0, 2.0 * zb * b, b * b))


def fit_weight(
    envelope: Sequence[float] | np.ndarray,
    omegas: Sequence[float] | np.ndarray,
    order: int = 1,
) -> RationalTransferFunction:
    """envelope 를 덮는 안정·최소위상 W_T (order 0|1|2).

    order 0 은 max(envelope) 상수. 1·2 차는 로그 크기 최소제곱 후
    max(envelope/|W|) 만큼 게인을 올린다.
    """
    env = np.asarray(envelope, dtype=float).ravel()
    w = np.asarray(omegas, dtype=float).ravel()
    if env.shape != w.shape:
        raise ValidationError(f"envelope {env.size}개 ≠ 격자 {w.size}개")
    if np.any(env < 0) or not np.all(np.isfinite(env)):
        raise ValidationError("envelope 는 유한한 0 이상 값이어야 합니다")
    if order not in (0, 1, 2):
        raise ValidationError(f"가중치 차수는 0, 1, 2 중 하나: {order}")

    peak = float(env.max()) if env.size else 0.0
    if peak == 0.0:
        return RationalTransferFunction.constant(0.0)
    if order == 0:
        return RationalTransferFunction.constant(peak)

    target = np.log(np.maximum(env, peak * 1e-6))
    lw_min, lw_max = np.log(w[0]) - np.log(100.0), np.log(w[-1]) + np.log(100.0)
    w_lo, w_mid, w_hi = np.log(w[0]), np.log(np.sqrt(w[0] * w[-1])), np.log(w[-1])
    k0 = float(np.log(peak))
    if order == 1:
        model = _log_mag_first
        starts = [
            (k0, w_lo, w_hi), (k0, w_hi, w_lo), (k0, w_mid, w_mid + 0.1),
            (k0, w_lo, w_mid), (k0, w_mid, w_hi),
        ]
        lower = [-np.inf, lw_min, lw_min]
        upper = [np.inf, lw_max, lw_max]
    else:
        model = _log_mag_second
        zl, zu = np.log(_ZETA_BOUNDS[0]), np.log(_ZETA_BOUNDS[1])
        starts = [
            (k0, w_lo, w_hi, 0.0, 0.0), (k0, w_hi, w_lo, 0.0, 0.0),
            (k0, w_mid, w_mid + 0.1, 0.0, 0.0), (k0, w_mid, w_hi, np.log(0.7), np.log(0.7)),
        ]
        lower = [-np.inf, lw_min, lw_min, zl, zl]
        upper = [np.inf, lw_max, lw_max, zu, zu]

    best: np.ndarray | None = None
    best_cost = np.inf
    for x0 in starts:
        res = optimize.least_squares(
            lambda p: model(p, w) - target, np.array(x0), bounds=(lower, upper),
        )
        if res.cost < best_cost:
            best, best_cost = res.x, res.cost
    assert best is not None

    fitted = np.exp(model(best, w))
    shift = float(np.max(env / fitted)) * _SHIFT_MARGIN
    best = best.copy()
    best[0] += np.log(shift)
    weight = _build_weight(order, best)
    logger.info(
        "W_T 피팅: order=%d, LS cost=%.4g, gain shift ×%.4f", order, best_cost, shift,
    )
    return weight


def build_uncertain_plant(
    nominal: RationalTransferFunction,
    family: Sequence[LtiSystem],
    order: int = 1,
    omegas: Sequence[float] | np.ndarray | None = None,
    omega_n: float | None = None,
) -> UncertainPlant:
    """envelope 계산 + 가중치 피팅 → UncertainPlant."""
    if omegas is None:
        if omega_n is None:
            raise ValidationError("omegas 또는 omega_n 중 하나는 필요합니다")
        omegas = default_envelope_grid(omega_n)
    w = np.asarray(omegas, dtype=float)
    errs = relative_errors(nominal, family, w)
    weight = fit_weight(errs.max(axis=0), w, order)
    return UncertainPlant(nominal=nominal, weight=weight, sample_omegas=w, relative_errors=errs)


def envelope_table(plant: UncertainPlant) -> list[tuple[float, float, float]]:
    """CSV 용 (ω, envelope, |W_T|) 행."""
    return [
        (float(w), float(e), float(m))
        for w, e, m in zip(plant.sample_omegas, plant.envelope, plant.weight_magnitude())
    ]
