"""LTI 수치 해석 — 극점, 가제어 정준형, 주파수 응답, H∞ 노름, Hurwitz 판정."""

from __future__ import annotations

import logging
from collections.abc import Sequence

import numpy as np
from scipy import linalg, optimize, signal

from src.config import HINF_GRID_POINTS, HINF_OMEGA_MAX, HINF_OMEGA_MIN, HINF_REL_TOL
from src.errors import (
    InfiniteNormError,
    InvalidModelError,
    PoleOnGridError,
    UnsupportedModelError,
    ValidationError,
)
from src.lti.models import FrequencyResponsePoint, RationalTransferFunction, StateSpaceModel

logger = logging.getLogger(__name__)

LtiSystem = RationalTransferFunction | StateSpaceModel

# 극점-격자 충돌 판정 (상대)
_POLE_HIT_TOL = 1e-12


# ------------------------------------------------------------------
# 극점 / 안정성
# ------------------------------------------------------------------


def poles(tf: RationalTransferFunction) -> list[complex]:
    """분모 근 전체 (중복 포함, 순서 무관). companion 행렬 고유값 기반."""
    if tf.order < 1:
        raise InvalidModelError("분모 차수가 1 이상이어야 극점이 정의됩니다")
    return [complex(r) for r in np.roots(tf.den)]


def is_hurwitz(A: np.ndarray) -> bool:
    """모든 고유값의 실수부가 음수이면 True."""
    mat = np.atleast_2d(np.asarray(A, dtype=float))
    if mat.shape[0] != mat.shape[1]:
        raise ValidationError(f"정방행렬이 아닙니다: shape={mat.shape}")
    if mat.size == 0:
        return True
    return bool(np.all(linalg.eigvals(mat).real < 0))


def is_stable(tf: RationalTransferFunction) -> bool:
    """모든 극점이 개방 좌반평면."""
    if tf.order < 1:
        return True
    return all(p.real < 0 for p in poles(tf))


# ------------------------------------------------------------------
# 실현 / 변환
# ------------------------------------------------------------------


def to_controllable_canonical(tf: RationalTransferFunction) -> StateSpaceModel:
    """엄밀 proper 전달함수 → 가제어 정준형 (companion A, B=e_n).

    den = s^n + a1 s^(n-1) + ... + an 이면 A 마지막 행은 [-an, ..., -a1],
    C 는 분자 계수를 오름차순으로 채운다.
    """
    if not tf.is_strictly_proper:
        raise UnsupportedModelError(
            f"엄밀 proper 전달함수만 지원합니다 (분자 {tf.numerator_degree}차, 분모 {tf.order}차)"
        )
    n = tf.order
    den = tf.den
    A = np.zeros((n, n))
    A[:-1, 1:] = np.eye(n - 1)
    A[-1, :] = -den[1:][::-1]
    B = np.zeros((n, 1))
    B[-1, 0] = 1.0
    num = np.zeros(n)
    num[n - len(tf.numerator):] = tf.num
    C = num[::-1].reshape(1, n)
    return StateSpaceModel(A, B, C, np.zeros((1, 1)))


def ss_to_tf(sys: StateSpaceModel) -> RationalTransferFunction:
    """SISO 상태공간 → 전달함수."""
    if not sys.is_siso:
        raise UnsupportedModelError("SISO 상태공간만 전달함수로 변환합니다")
    if sys.n_states == 0:
        return RationalTransferFunction.constant(float(sys.D[0, 0]))
    num, den = signal.ss2tf(sys.A, sys.B, sys.C, sys.D)
    num = np.atleast_2d(num)[0].copy()
    # 특성다항식 차분에서 생기는 반올림 잔여 계수 제거
    scale = float(np.max(np.abs(num))) if num.size else 0.0
    num[np.abs(num) <= 1e-12 * scale] = 0.0
    return RationalTransferFunction(num, den)


# ------------------------------------------------------------------
# 주파수 응답
# ------------------------------------------------------------------


def _check_grid(omegas: Sequence[float] | np.ndarray) -> np.ndarray:
    w = np.asarray(omegas, dtype=float).ravel()
    if w.size == 0:
        raise ValidationError("주파수 격자가 비어 있습니다")
    if np.any(w <= 0):
        raise ValidationError("주파수는 모두 양수여야 합니다")
    if np.any(np.diff(w) <= 0):
        raise ValidationError("주파수 격자는 엄밀 오름차순이어야 합니다")
    return w


def evaluate_response(sys: LtiSystem, omegas: Sequence[float] | np.ndarray) -> np.ndarray:
    """s = jω 에서의 복소 응답 배열. 허수축 극점과 겹치면 PoleOnGridError."""
    w = _check_grid(omegas)
    s = 1j * w
    if isinstance(sys, RationalTransferFunction):
        den = np.polyval(sys.den, s)
        # 분모 크기 스케일 대비 상대 판정
        scale = np.polyval(np.abs(sys.den), w)
        hit = np.abs(den) <= _POLE_HIT_TOL * scale
        if np.any(hit):
            raise PoleOnGridError(float(w[np.argmax(hit)]))
        return np.polyval(sys.num, s) / den

    if not sys.is_siso:
        raise UnsupportedModelError("주파수 응답은 SISO 상태공간만 지원합니다")
    n = sys.n_states
    d = complex(sys.D[0, 0])
    if n == 0:
        return np.full(w.shape, d)
    eig = linalg.eigvals(sys.A)
    out = np.empty(w.shape, dtype=complex)
    b = sys.B[:, 0]
    c = sys.C[0, :]
    eye = np.eye(n)
    for i, si in enumerate(s):
        if np.min(np.abs(eig - si)) <= _POLE_HIT_TOL * max(1.0, abs(si)):
            raise PoleOnGridError(float(w[i]))
        out[i] = c @ np.linalg.solve(si * eye - sys.A, b) + d
    return out


def frequency_response(
    sys: LtiSystem,
    omegas: Sequence[float] | np.ndarray,
) -> list[FrequencyResponsePoint]:
    """격자 위 (ω, |H|, ∠H). 위상은 격자 내에서 연속 unwrap."""
    h = evaluate_response(sys, omegas)
    phase = np.unwrap(np.angle(h))
    w = np.asarray(omegas, dtype=float).ravel()
    return [
        FrequencyResponsePoint(float(wi), float(abs(hi)), float(ph))
        for wi, hi, ph in zip(w, h, phase)
    ]


def log_grid(
    omega_min: float = HINF_OMEGA_MIN,
    omega_max: float = HINF_OMEGA_MAX,
    points: int = HINF_GRID_POINTS,
) -> np.ndarray:
    return np.logspace(np.log10(omega_min), np.log10(omega_max), points)


# ------------------------------------------------------------------
# H∞ 노름
# ------------------------------------------------------------------


def hinf_norm(
    sys: RationalTransferFunction,
    omegas: np.ndarray | None = None,
    rel_tol: float = HINF_REL_TOL,
) -> float:
    """sup_ω |T(jω)|. 로그 격자 최대점 주변을 golden-section으로 정밀화.

    DC 값과 고주파 극한도 후보에 포함한다.
    """
    if not sys.is_proper:
        raise InfiniteNormError("improper 전달함수는 H∞ 노름이 무한대입니다")
    if sys.is_zero:
        return 0.0
    if sys.order == 0:
        return abs(sys.numerator[-1])
    if not is_stable(sys):
        raise InfiniteNormError("불안정 시스템 — H∞ 노름 정의 불가")

    grid = log_grid() if omegas is None else _check_grid(omegas)
    x = np.log10(grid)
    mags = np.abs(evaluate_response(sys, grid))
    idx = int(np.argmax(mags))
    best = float(mags[idx])

    if 0 < idx < len(x) - 1:
        def neg_mag(logw: float) -> float:
            return -float(abs(sys.evaluate(1j * 10.0 ** logw)))

        try:
            xmin = optimize.golden(
                neg_mag, brack=(x[idx - 1], x[idx], x[idx + 1]), tol=rel_tol * 1e-3,
            )
            best = max(best, -neg_mag(float(xmin)))
        except (ValueError, RuntimeError):
            logger.warning("H∞ golden-section 정밀화 실패 — 격자 최대값 사용", exc_info=True)

    candidates = [best, abs(sys.dc_gain())]
    if not sys.is_strictly_proper:
        candidates.append(abs(sys.numerator[0]))  # 분모 monic → 고주파 극한
    return float(max(candidates))


# ------------------------------------------------------------------
# 해석적 step 응답
# ------------------------------------------------------------------


def step_response_exact(
    sys: StateSpaceModel,
    times: Sequence[float] | np.ndarray,
    amplitude: float = 1.0,
) -> np.ndarray:
    """영초기상태 step 응답 y(t) = C·x(t) + D·u, x(t) 는 증강 행렬 지수로 계산.

    exp([[A, B], [0, 0]]·t) 의 우상단 블록이 ∫₀ᵗ e^{Aτ}dτ·B.
    """
    if not sys.is_siso:
        raise UnsupportedModelError("SISO 상태공간만 지원합니다")
    t = np.asarray(times, dtype=float).ravel()
    if np.any(t < 0):
        raise ValidationError("시각은 0 이상이어야 합니다")
    n = sys.n_states
    d = float(sys.D[0, 0])
    if n == 0:
        return np.full(t.shape, d * amplitude)
    aug = np.zeros((n + 1, n + 1))
    aug[:n, :n] = sys.A
    aug[:n, n:] = sys.B
    c = sys.C[0]
    out = np.empty(t.shape)
    for i, ti in enumerate(t):
        x = linalg.expm(aug * ti)[:n, n] * amplitude
        out[i] = c @ x + d * amplitude
    return out
