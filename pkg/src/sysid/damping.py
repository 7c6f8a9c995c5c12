"""반복 step 실험 → 감쇠비 ζ 와 섭동 Δζ 추정.

ωn 은 해석식 값으로 고정하고 ζ 와 출력 스케일만 맞춘다.
출력 스케일은 닫힌 형태 최소제곱으로 소거 → SSE(ζ) 1변수 golden-section.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from scipy import optimize

from src.config import DAMPING_COARSE_POINTS, DAMPING_SEARCH_LOWER, DAMPING_SEARCH_UPPER, DAMPING_TOL
from src.errors import InvalidExperimentError, ValidationError
from src.sysid.trace import ExperimentTrace, step_response_second_order

logger = logging.getLogger(__name__)


@dataclass(frozen=True, slots=True)
class DampingEstimate:
    """ζ 공칭값, Δζ = max_k |ζ_k − ζ|, trace별 ζ, 잔차 RMS [rad]."""

    zeta_nominal: float
    zeta_delta: float
    per_trace_zetas: tuple[float, ...]
    residual_rms: float
    static_gains: tuple[float, ...] = ()
    warnings: tuple[str, ...] = field(default_factory=tuple)

    @property
    def boundary_hit(self) -> bool:
        return bool(self.warnings)

    def to_dict(self) -> dict[str, Any]:
        return {
            "zeta_nominal": self.zeta_nominal,
            "zeta_delta": self.zeta_delta,
            "per_trace_zetas": list(self.per_trace_zetas),
            "residual_rms": self.residual_rms,
            "static_gains": list(self.static_gains),
            "warnings": list(self.warnings),
        }


@dataclass(frozen=True, slots=True)
class _StepSegment:
    """step 시작 이후 구간 (상대 시간, 기준선 제거 출력, step 크기)."""

    t: np.ndarray
    y: np.ndarray
    step: float


def _step_segment(trace: ExperimentTrace) -> _StepSegment:
    """입력이 step(1단 또는 2단 레벨)인지 확인하고 시작 시점 이후 구간 추출."""
    u = trace.input
    scale = max(float(np.max(np.abs(u))), 1.0)
    tol = 1e-9 * scale
    final = float(u[-1])
    settled = np.abs(u - final) <= tol
    # 마지막 이탈 이후가 step 구간
    off = np.flatnonzero(~settled)
    onset = 0 if off.size == 0 else int(off[-1]) + 1
    pre = u[:onset]
    if pre.size and np.any(np.abs(pre - pre[0]) > tol):
        raise InvalidExperimentError(f"{trace.label or 'trace'}: step 입력이 아닙니다 (레벨 3개 이상)")
    initial = float(pre[0]) if pre.size else 0.0
    step = final - initial
    if abs(step) <= tol:
        raise InvalidExperimentError(f"{trace.label or 'trace'}: 입력 변화가 없습니다")
    if trace.timestamps.size - onset < 4:
        raise InvalidExperimentError(f"{trace.label or 'trace'}: step 이후 샘플이 너무 적습니다")
    baseline = float(trace.output[:onset].mean()) if onset else 0.0
    t0 = trace.timestamps[onset]
    return _StepSegment(
        t=trace.timestamps[onset:] - t0,
        y=trace.output[onset:] - baseline,
        step=step,
    )


def _sse(zeta: float, seg: _StepSegment, omega_n: float) -> tuple[float, float]:
    """(SSE, 최적 출력 스케일)."""
    r = step_response_second_order(seg.t, zeta, omega_n)
    rr = float(r @ r)
    if rr == 0.0:
        return float(seg.y @ seg.y), 0.0
    scale = float(seg.y @ r) / rr
    resid = seg.y - scale * r
    return float(resid @ resid), scale


def _fit_single(seg: _StepSegment, omega_n: float) -> tuple[float, float, bool]:
    """(ζ, 출력 스케일, 경계 도달 여부)."""
    grid = np.linspace(DAMPING_SEARCH_LOWER, DAMPING_SEARCH_UPPER, DAMPING_COARSE_POINTS)
    costs = np.array([_sse(z, seg, omega_n)[0] for z in grid])
    idx = int(np.argmin(costs))
    if idx == 0 or idx == grid.size - 1:
        zeta = float(grid[idx])
        return zeta, _sse(zeta, seg, omega_n)[1], True
    zeta = float(
        optimize.golden(
            lambda z: _sse(z, seg, omega_n)[0],
            brack=(grid[idx - 1], grid[idx], grid[idx + 1]),
            tol=DAMPING_TOL,
        )
    )
    return zeta, _sse(zeta, seg, omega_n)[1], False


def fit_damping_ratio(
    traces: list[ExperimentTrace],
    omega_n: float,
    step_amplitude: float,
) -> DampingEstimate:
    """trace별 ζ_k = argmin SSE, 공칭 ζ = 평균, Δζ = max |ζ_k − ζ|.

    탐색 경계에 닿은 trace는 경고로 결과에 실어 보낸다.
    """
    if not traces:
        raise ValidationError("trace가 1개 이상 필요합니다")
    if not omega_n > 0:
        raise ValidationError(f"ωn 은 양수여야 합니다: {omega_n}")
    if step_amplitude == 0:
        raise ValidationError("step_amplitude 는 0이 될 수 없습니다")

    zetas: list[float] = []
    gains: list[float] = []
    warnings: list[str] = []
    sq_resid = 0.0
    count = 0
    for k, trace in enumerate(traces):
        seg = _step_segment(trace)
        zeta, scale, at_bound = _fit_single(seg, omega_n)
        name = trace.label or f"trace_{k + 1}"
        if at_bound:
            msg = f"{name}: ζ={zeta:.3f} 가 탐색 경계에 도달"
            warnings.append(msg)
            logger.warning("감쇠비 경계 피팅: %s", msg)
        sse, _ = _sse(zeta, seg, omega_n)
        sq_resid += sse
        count += seg.y.size
        zetas.append(zeta)
        # scale 은 seg.step 단위 응답 기준 → 입력 1단위당 정적 게인
        gains.append(scale / step_amplitude)
        logger.debug("trace %s: ζ=%.5f, scale=%.5g", name, zeta, scale)

    nominal = float(np.mean(zetas))
    delta = float(max(abs(z - nominal) for z in zetas))
    estimate = DampingEstimate(
        zeta_nominal=nominal,
        zeta_delta=delta,
        per_trace_zetas=tuple(zetas),
        residual_rms=float(np.sqrt(sq_resid / count)),
        static_gains=tuple(gains),
        warnings=tuple(warnings),
    )
    logger.info(
        "감쇠비 추정: ζ=%.4f ± %.4f (%d traces, RMS=%.3g rad)",
        nominal, delta, len(traces), estimate.residual_rms,
    )
    return estimate
