"""고정 스텝 RK4 시뮬레이션 — 개루프/상태되먹임, 포화, step·구형파 기준.

명령 u 는 각 스텝 시작 시점의 상태/기준으로 계산해 스텝 동안 고정(ZOH).
선형 f = Ax + Bu 이므로 RK4 한 스텝은 x⁺ = Φx + Γu 로 정리되고,
Φ·Γ 는 rk4_step 을 단위행렬에 적용해 미리 구한다.
"""

from __future__ import annotations

import csv
import logging
from collections.abc import Callable
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Literal

import numpy as np
from scipy import linalg

from src.config import (
    PLATEAU_FRACTION,
    RESOLUTION_FRACTION,
    RK4_STABILITY_LIMIT,
    SETTLING_BAND,
    SIM_DT,
    SIM_HORIZON,
)
from src.errors import StepSizeError, ValidationError
from src.lti.models import StateSpaceModel
from src.sim.metrics import (
    NOT_SETTLED,
    edge_delays,
    overshoot_percent,
    plateau_errors,
    settling_time,
    steady_state_error,
)

logger = logging.getLogger(__name__)

SIM_CSV_HEADER = ("t_s", "reference_rad", "theta_rad", "command")


# ------------------------------------------------------------------
# 기준 신호
# ------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class ReferenceSignal:
    """step: start 이후 amplitude. square: 0 ↔ amplitude, 한 주기 중 duty 비율만 high."""

    kind: Literal["step", "square"]
    amplitude: float
    horizon: float = SIM_HORIZON
    period: float = 4.0
    duty: float = 0.5
    start: float = 0.0

    def __post_init__(self) -> None:
        if self.kind not in ("step", "square"):
            raise ValidationError(f"기준 신호 종류는 step 또는 square: {self.kind}")
        if not np.isfinite(self.amplitude):
            raise ValidationError("amplitude 가 유한하지 않습니다")
        if not self.horizon > 0:
            raise ValidationError(f"horizon 은 양수여야 합니다: {self.horizon}")
        if self.kind == "square" and not (self.period > 0 and 0 < self.duty < 1):
            raise ValidationError(f"구형파 period>0, 0<duty<1 이어야 합니다: {self.period}, {self.duty}")
        if self.start < 0:
            raise ValidationError(f"start 는 0 이상: {self.start}")

    def sample(self, t: np.ndarray) -> np.ndarray:
        tt = np.asarray(t, dtype=float)
        active = tt >= self.start
        if self.kind == "step":
            return np.where(active, self.amplitude, 0.0)
        phase = np.mod(tt - self.start, self.period)
        return np.where(active & (phase < self.duty * self.period), self.amplitude, 0.0)

    @property
    def final_value(self) -> float:
        """horizon 직전에 유지되는 레벨. horizon 에 걸린 edge 는 무시."""
        if self.kind == "step":
            return float(self.sample(np.array([self.horizon]))[0])
        return float(self.sample(np.array([np.nextafter(self.horizon, -np.inf)]))[0])

    def edges(self) -> list[tuple[float, float, float]]:
        """(시각, 이전 레벨, 새 레벨). step 은 edge 1개."""
        if self.kind == "step":
            return [(self.start, 0.0, self.amplitude)]
        out: list[tuple[float, float, float]] = []
        t0 = self.start
        while t0 < self.horizon:
            out.append((t0, 0.0, self.amplitude))
            t_fall = t0 + self.duty * self.period
            if t_fall < self.horizon:
                out.append((t_fall, self.amplitude, 0.0))
            t0 += self.period
        return out


def reference_samples(ref: ReferenceSignal, dt: float) -> tuple[np.ndarray, np.ndarray]:
    n_steps = int(round(ref.horizon / dt))
    t = np.arange(n_steps + 1) * dt
    return t, ref.sample(t)


# ------------------------------------------------------------------
# 결과
# ------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class StateFeedback:
    """u = N̄·r − K·x."""

    gain: np.ndarray
    reference_gain: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "gain", np.asarray(self.gain, dtype=float).ravel())


@dataclass(frozen=True, slots=True, eq=False)
class SimResult:
    """시계열 + 지표. input_command 는 command_scale 로 정규화된 값."""

    timestamps: np.ndarray
    output: np.ndarray
    input_command: np.ndarray
    reference: np.ndarray
    metrics: dict[str, Any] = field(default_factory=dict)
    states: np.ndarray | None = None

    def to_dict(self) -> dict[str, Any]:
        return {"samples": int(self.timestamps.size), "metrics": self.metrics}


# ------------------------------------------------------------------
# 적분기
# ------------------------------------------------------------------


def rk4_step(
    f: Callable[[np.ndarray, np.ndarray], np.ndarray],
    x: np.ndarray,
    u: np.ndarray,
    h: float,
) -> np.ndarray:
    """고전 RK4 한 스텝 (u 는 스텝 동안 고정)."""
    k1 = f(x, u)
    k2 = f(x + 0.5 * h * k1, u)
    k3 = f(x + 0.5 * h * k2, u)
    k4 = f(x + h * k3, u)
    return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def rk4_propagator(A: np.ndarray, B: np.ndarray, h: float) -> tuple[np.ndarray, np.ndarray]:
    """선형계 RK4 한 스텝의 (Φ, Γ): x⁺ = Φx + Γu."""
    n, m = B.shape

    def f(x: np.ndarray, u: np.ndarray) -> np.ndarray:
        return A @ x + B @ u

    phi = rk4_step(f, np.eye(n), np.zeros((m, n)), h)
    gamma = rk4_step(f, np.zeros((n, m)), np.eye(m), h)
    return phi, gamma


def check_step_size(A: np.ndarray, dt: float, *, warn_resolution: bool = True) -> None:
    """dt·ρ(A) 가 RK4 안정 영역을 넘으면 StepSizeError, 시정수 해상도 부족이면 경고."""
    if not dt > 0:
        raise ValidationError(f"dt 는 양수여야 합니다: {dt}")
    if A.size == 0:
        return
    rho = float(np.max(np.abs(linalg.eigvals(A))))
    if dt * rho > RK4_STABILITY_LIMIT:
        raise StepSizeError(
            f"dt={dt:.3g} s × 스펙트럼 반경 {rho:.4g} = {dt * rho:.3g} > {RK4_STABILITY_LIMIT}"
        )
    if warn_resolution and rho > 0 and dt > RESOLUTION_FRACTION / rho:
        logger.warning(
            "dt=%.3g s 가 가장 빠른 시정수 %.3g s 의 %.0f%% 초과 — 정확도 저하 가능",
            dt, 1.0 / rho, RESOLUTION_FRACTION * 100,
        )


def _propagate(
    model: StateSpaceModel,
    r: np.ndarray,
    dt: float,
    feedback: StateFeedback | None,
    saturation: float | None,
    x0: np.ndarray | None,
    command: np.ndarray | None = None,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(출력, 적용 명령, 상태) — 명령은 feedback/command/r 순으로 결정."""
    n = model.n_states
    phi, gamma = rk4_propagator(model.A, model.B, dt)
    g = gamma[:, 0]
    c = model.C[0]
    d = float(model.D[0, 0])
    x = np.zeros(n) if x0 is None else np.asarray(x0, dtype=float).ravel().copy()
    if x.size != n:
        raise ValidationError(f"x0 차원 {x.size} ≠ 상태 {n}")

    steps = r.size
    y = np.empty(steps)
    u = np.empty(steps)
    xs = np.empty((steps, n))
    for k in range(steps):
        if feedback is not None:
            uk = feedback.reference_gain * r[k] - float(feedback.gain @ x)
        elif command is not None:
            uk = float(command[k])
        else:
            uk = float(r[k])
        if saturation is not None:
            uk = min(max(uk, -saturation), saturation)
        xs[k] = x
        u[k] = uk
        y[k] = c @ x + d * uk
        x = phi @ x + g * uk
    return y, u, xs


def _effective_a(model: StateSpaceModel, feedback: StateFeedback | None) -> np.ndarray:
    if feedback is None:
        return model.A
    if feedback.gain.size != model.n_states:
        raise ValidationError(f"게인 길이 {feedback.gain.size} ≠ 상태 {model.n_states}")
    return model.A - model.B @ feedback.gain[None, :]


# ------------------------------------------------------------------
# 시뮬레이션
# ------------------------------------------------------------------


def simulate(
    model: StateSpaceModel,
    ref: ReferenceSignal,
    dt: float = SIM_DT,
    saturation: float | None = None,
    *,
    feedback: StateFeedback | None = None,
    x0: np.ndarray | None = None,
    command_scale: float = 1.0,
    band: float = SETTLING_BAND,
    warn_resolution: bool = True,
) -> SimResult:
    """model 을 기준 신호로 구동.

    feedback 이 있으면 model 은 개루프 플랜트, u = sat(N̄r − Kx).
    없으면 model 에 u = sat(r) 을 직접 넣는다 (폐루프 모델이면 r 이 곧 기준).
    """
    if not model.is_siso:
        raise ValidationError("SISO 모델만 시뮬레이션합니다")
    if saturation is not None and not saturation > 0:
        raise ValidationError(f"saturation 은 양수여야 합니다: {saturation}")
    if not command_scale > 0:
        raise ValidationError(f"command_scale 은 양수여야 합니다: {command_scale}")
    check_step_size(_effective_a(model, feedback), dt, warn_resolution=warn_resolution)

    t, r = reference_samples(ref, dt)
    y, u, xs = _propagate(model, r, dt, feedback, saturation, x0)
    if not np.all(np.isfinite(y)):
        raise StepSizeError("시뮬레이션 발산 — 출력에 유한하지 않은 값")

    metrics = response_metrics(t, y, ref, band)
    if saturation is not None:
        metrics["saturated_fraction"] = float(np.mean(np.abs(u) >= saturation * (1 - 1e-12)))
    logger.debug(
        "시뮬레이션: %s, dt=%.3g, 정착=%.4g s", ref.kind, dt, metrics["settling_time_s"],
    )
    return SimResult(
        timestamps=t,
        output=y,
        input_command=u / command_scale,
        reference=r,
        metrics=metrics,
        states=xs,
    )


def simulate_command(
    model: StateSpaceModel,
    timestamps: np.ndarray,
    command: np.ndarray,
    x0: np.ndarray | None = None,
) -> np.ndarray:
    """기록된 명령열을 그대로 재생 (개루프). 출력 배열 반환."""
    t = np.asarray(timestamps, dtype=float).ravel()
    u = np.asarray(command, dtype=float).ravel()
    if t.size != u.size or t.size < 2:
        raise ValidationError(f"시간/명령 길이가 같고 2 이상이어야 합니다: {t.size} vs {u.size}")
    dt = float(t[1] - t[0])
    check_step_size(model.A, dt, warn_resolution=False)
    y, _, _ = _propagate(model, np.zeros_like(u), dt, None, None, x0, command=u)
    return y


def response_metrics(
    t: np.ndarray,
    y: np.ndarray,
    ref: ReferenceSignal,
    band: float = SETTLING_BAND,
) -> dict[str, Any]:
    """정착/오버슈트/정상상태 오차. square 는 edge 지연과 구간별 plateau 오차를 더한다.

    정상상태 오차는 두 경우 모두 |마지막 10% 평균 − 마지막 구간 기준값|.
    """
    final = ref.final_value if ref.kind == "step" else ref.amplitude
    if ref.kind == "step":
        ts = settling_time(t, y, final, band)
        metrics: dict[str, Any] = {
            "settling_time_s": ts,
            "settled": ts != NOT_SETTLED,
            "steady_state_error_rad": steady_state_error(y, final, PLATEAU_FRACTION),
            "overshoot_percent": overshoot_percent(y, final),
        }
        return metrics

    edges = ref.edges()
    delays = edge_delays(t, y, edges)
    plateaus = plateau_errors(t, y, edges, PLATEAU_FRACTION)
    finite = [d for d in delays if d != NOT_SETTLED]
    # 첫 high 구간을 step 응답처럼 본다
    high = (t >= edges[0][0]) & (t < (edges[1][0] if len(edges) > 1 else t[-1] + 1))
    first_high = y[high]
    ts = settling_time(t[high], first_high, ref.amplitude, band) if first_high.size > 1 else NOT_SETTLED
    return {
        "settling_time_s": ts,
        "settled": ts != NOT_SETTLED,
        "steady_state_error_rad": steady_state_error(y, ref.final_value, PLATEAU_FRACTION),
        "overshoot_percent": overshoot_percent(first_high, ref.amplitude) if first_high.size else 0.0,
        "edge_delays_s": delays,
        "mean_edge_delay_s": float(np.mean(finite)) if finite else NOT_SETTLED,
        "plateau_errors_rad": plateaus,
    }


def square_wave_response(
    plant: StateSpaceModel,
    feedback: StateFeedback,
    amplitude: float,
    period: float,
    horizon: float = SIM_HORIZON,
    dt: float = SIM_DT,
    saturation: float | None = None,
) -> SimResult:
    """구형파 추종 (0 ↔ amplitude). edge 지연과 plateau 오차를 지표에 담는다."""
    ref = ReferenceSignal("square", amplitude, horizon=horizon, period=period)
    return simulate(plant, ref, dt, saturation, feedback=feedback)


def write_sim_csv(path: str | Path, result: SimResult) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as fp:
        writer = csv.writer(fp, lineterminator="\n")
        writer.writerow(SIM_CSV_HEADER)
        for row in zip(result.timestamps, result.reference, result.output, result.input_command):
            writer.writerow(tuple(repr(float(v)) for v in row))
    return path
