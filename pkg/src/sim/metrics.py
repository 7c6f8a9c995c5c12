"""응답 지표 — 정착 시간, 오버슈트, 정상상태 오차, 구형파 edge 지연."""

from __future__ import annotations

import math

import numpy as np

from src.config import PLATEAU_FRACTION, SETTLING_BAND, SETTLING_BAND_MAX
from src.errors import ValidationError

# 끝내 band 안에 들어오지 못한 경우
NOT_SETTLED = math.inf


def _series(t: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    tt = np.asarray(t, dtype=float).ravel()
    yy = np.asarray(y, dtype=float).ravel()
    if tt.shape != yy.shape or tt.size < 2:
        raise ValidationError(f"시간/출력 길이가 같고 2 이상이어야 합니다: {tt.size} vs {yy.size}")
    return tt, yy


def settling_time(
    t: np.ndarray,
    y: np.ndarray,
    final_value: float,
    band: float = SETTLING_BAND,
) -> float:
    """출력이 ±band·|final| 관을 마지막으로 벗어나는 시각 (t[0] 기준).

    관 경계 교차는 선형 보간. 마지막 샘플이 관 밖이면 NOT_SETTLED.
    final_value 가 0 이면 절대 폭 band 를 쓴다.
    """
    if not 0 < band <= SETTLING_BAND_MAX:
        raise ValidationError(f"band 는 (0, {SETTLING_BAND_MAX}] 범위여야 합니다: {band}")
    tt, yy = _series(t, y)
    tube = band * abs(final_value) if final_value != 0 else band
    dev = np.abs(yy - final_value)
    outside = np.flatnonzero(dev > tube)
    if outside.size == 0:
        return 0.0
    last = int(outside[-1])
    if last == tt.size - 1:
        return NOT_SETTLED
    d0, d1 = dev[last], dev[last + 1]
    frac = (d0 - tube) / (d0 - d1) if d0 != d1 else 1.0
    return float(tt[last] + frac * (tt[last + 1] - tt[last]) - tt[0])


def plateau_mean(y: np.ndarray, fraction: float = PLATEAU_FRACTION) -> float:
    yy = np.asarray(y, dtype=float).ravel()
    count = max(1, int(math.ceil(fraction * yy.size)))
    return float(yy[-count:].mean())


def steady_state_error(y: np.ndarray, final_value: float, fraction: float = PLATEAU_FRACTION) -> float:
    """|마지막 fraction 구간 평균 − 목표|."""
    return abs(plateau_mean(y, fraction) - final_value)


def overshoot_percent(y: np.ndarray, final_value: float, initial_value: float = 0.0) -> float:
    """목표 방향으로 넘어선 최대량 / step 크기 × 100. 넘지 않으면 0."""
    step = final_value - initial_value
    if step == 0:
        return 0.0
    yy = np.asarray(y, dtype=float).ravel()
    excess = (yy - final_value) * math.copysign(1.0, step)
    return float(max(0.0, excess.max()) / abs(step) * 100.0)


def edge_delays(
    t: np.ndarray,
    y: np.ndarray,
    edges: list[tuple[float, float, float]],
) -> list[float]:
    """edge (시각, 이전 레벨, 새 레벨) 마다 출력이 두 레벨의 중간을 처음 넘는 데 걸린 시간.

    다음 edge 전까지 넘지 못하면 NOT_SETTLED.
    """
    tt, yy = _series(t, y)
    delays: list[float] = []
    for k, (t_edge, before, after) in enumerate(edges):
        end = edges[k + 1][0] if k + 1 < len(edges) else tt[-1] + 1.0
        mid = 0.5 * (before + after)
        sign = 1.0 if after >= before else -1.0
        window = (tt >= t_edge) & (tt < end)
        crossed = np.flatnonzero(window & (sign * (yy - mid) >= 0))
        delays.append(float(tt[crossed[0]] - t_edge) if crossed.size else NOT_SETTLED)
    return delays


def plateau_errors(
    t: np.ndarray,
    y: np.ndarray,
    edges: list[tuple[float, float, float]],
    fraction: float = PLATEAU_FRACTION,
) -> list[float]:
    """edge 사이 구간마다 마지막 fraction 평균과 새 레벨의 차이."""
    tt, yy = _series(t, y)
    errors: list[float] = []
    for k, (t_edge, _, level) in enumerate(edges):
        end = edges[k + 1][0] if k + 1 < len(edges) else tt[-1] + 1.0
        segment = yy[(tt >= t_edge) & (tt < end)]
        if segment.size:
            errors.append(steady_state_error(segment, level, fraction))
    return errors
