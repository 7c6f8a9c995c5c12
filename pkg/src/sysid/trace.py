"""실험 trace — 균일 샘플 시계열 (시간, 입력, 굽힘각) + CSV 입출력 + 합성 데이터.

CSV 형식: 헤더 `t_s,input,theta_rad` 또는 `t_s,input,theta_deg` (도 → rad 자동 변환).
쉼표 구분, UTF-8, LF.
"""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import signal

from src.config import SYSID_SAMPLE_RATE_HZ, TRACE_JITTER_TOL, TRACE_MIN_SAMPLES
from src.errors import InvalidTraceError, TraceParseError
from src.lti.models import StateSpaceModel

logger = logging.getLogger(__name__)

HEADER_RAD = ("t_s", "input", "theta_rad")
HEADER_DEG = ("t_s", "input", "theta_deg")


@dataclass(frozen=True, slots=True, eq=False)
class ExperimentTrace:
    """균일 격자 위 (timestamps [s], input, output [rad])."""

    timestamps: np.ndarray
    input: np.ndarray
    output: np.ndarray
    label: str = ""

    def __post_init__(self) -> None:
        t = np.asarray(self.timestamps, dtype=float).ravel()
        u = np.asarray(self.input, dtype=float).ravel()
        y = np.asarray(self.output, dtype=float).ravel()
        if not (t.size == u.size == y.size):
            raise InvalidTraceError(
                f"배열 길이 불일치: t={t.size}, input={u.size}, output={y.size}"
            )
        if t.size < TRACE_MIN_SAMPLES:
            raise InvalidTraceError(f"샘플 {t.size}개 — 최소 {TRACE_MIN_SAMPLES}개 필요")
        if not (np.all(np.isfinite(t)) and np.all(np.isfinite(u)) and np.all(np.isfinite(y))):
            raise InvalidTraceError("유한하지 않은 샘플이 있습니다")
        dt = np.diff(t)
        if np.any(dt <= 0):
            raise InvalidTraceError("timestamps 가 엄밀 증가가 아닙니다")
        mean_dt = float(dt.mean())
        if np.max(np.abs(dt - mean_dt)) > TRACE_JITTER_TOL * max(mean_dt, abs(t[-1])):
            raise InvalidTraceError("비균일 샘플링 — 허용 jitter 초과")
        for name, arr in (("timestamps", t), ("input", u), ("output", y)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def sample_time(self) -> float:
        return float((self.timestamps[-1] - self.timestamps[0]) / (len(self.timestamps) - 1))

    def __len__(self) -> int:
        return len(self.timestamps)

    def scaled(self, output_scale: float) -> ExperimentTrace:
        return ExperimentTrace(self.timestamps, self.input, self.output * output_scale, self.label)


# ------------------------------------------------------------------
# CSV
# ------------------------------------------------------------------


def load_trace_csv(path: str | Path) -> ExperimentTrace:
    """CSV → ExperimentTrace. 파싱 실패는 줄 번호와 함께 TraceParseError."""
    path = Path(path)
    with path.open("r", encoding="utf-8", newline="") as fp:
        reader = csv.reader(fp)
        try:
            header = tuple(h.strip() for h in next(reader))
        except StopIteration:
            raise TraceParseError(str(path), 1, "빈 파일") from None
        if header == HEADER_RAD:
            to_rad = 1.0
        elif header == HEADER_DEG:
            to_rad = math.pi / 180.0
        else:
            raise TraceParseError(
                str(path), 1,
                f"헤더는 {','.join(HEADER_RAD)} 또는 {','.join(HEADER_DEG)} 여야 합니다: {','.join(header)}",
            )
        rows: list[tuple[float, float, float]] = []
        for row in reader:
            line = reader.line_num
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 3:
                raise TraceParseError(str(path), line, f"열 3개가 필요합니다 ({len(row)}개)")
            try:
                t, u, y = (float(c) for c in row)
            except ValueError:
                raise TraceParseError(str(path), line, f"숫자 변환 실패: {row}") from None
            rows.append((t, u, y * to_rad))
    if not rows:
        raise TraceParseError(str(path), 2, "데이터 행이 없습니다")
    arr = np.array(rows)
    trace = ExperimentTrace(arr[:, 0], arr[:, 1], arr[:, 2], label=path.stem)
    logger.info("trace 로드: %s (%d 샘플, dt=%.4g s)", path.name, len(trace), trace.sample_time)
    return trace


def write_trace_csv(path: str | Path, trace: ExperimentTrace) -> Path:
    """ExperimentTrace → CSV (theta_rad)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as fp:
        writer = csv.writer(fp, lineterminator="\n")
        writer.writerow(HEADER_RAD)
        for t, u, y in zip(trace.timestamps, trace.input, trace.output):
            writer.writerow((repr(float(t)), repr(float(u)), repr(float(y))))
    return path


# ------------------------------------------------------------------
# 합성 실험 (원시 측정 데이터 미공개)
# ------------------------------------------------------------------


def time_grid(horizon: float = 10.0, sample_rate_hz: float = SYSID_SAMPLE_RATE_HZ) -> np.ndarray:
    n = int(round(horizon * sample_rate_hz)) + 1
    return np.arange(n) / sample_rate_hz


def step_response_second_order(t: np.ndarray, zeta: float, omega_n: float) -> np.ndarray:
    """단위 step에 대한 과소감쇠 2차계 정규화 응답 (DC = 1). t<0 은 0."""
    tt = np.clip(np.asarray(t, dtype=float), 0.0, None)
    wd = omega_n * math.sqrt(1.0 - zeta * zeta)
    decay = np.exp(-zeta * omega_n * tt)
    y = 1.0 - decay * (np.cos(wd * tt) + zeta / math.sqrt(1.0 - zeta * zeta) * np.sin(wd * tt))
    return np.where(np.asarray(t) < 0, 0.0, y)


def synthesize_step_traces(
    zetas: list[float] | np.ndarray,
    omega_n: float,
    amplitude: float,
    *,
    static_gain: float = 1.0,
    horizon: float = 10.0,
    sample_rate_hz: float = SYSID_SAMPLE_RATE_HZ,
    noise_std: float = 0.0,
    seed: int = 0,
) -> list[ExperimentTrace]:
    """ζ 마다 step 실험 1개. 출력 = static_gain·amplitude·(정규화 응답) + 잡음."""
    rng = np.random.default_rng(seed)
    t = time_grid(horizon, sample_rate_hz)
    traces: list[ExperimentTrace] = []
    for k, zeta in enumerate(zetas):
        y = static_gain * amplitude * step_response_second_order(t, float(zeta), omega_n)
        if noise_std > 0:
            y = y + rng.normal(0.0, noise_std, size=y.shape)
        traces.append(
            ExperimentTrace(t, np.full_like(t, amplitude), y, label=f"step_{k + 1}")
        )
    return traces


def prbs_input(n: int, hold: int = 10, seed: int = 0, amplitude: float = 1.0) -> np.ndarray:
    """±amplitude 랜덤 이진 신호 — hold 샘플마다 부호 재추첨 (지속 여기)."""
    rng = np.random.default_rng(seed)
    levels = rng.choice([-amplitude, amplitude], size=n // hold + 1)
    return np.repeat(levels, hold)[:n]


def synthesize_trace(
    model: StateSpaceModel,
    u: np.ndarray,
    *,
    sample_time: float,
    discrete: bool = False,
    noise_std: float = 0.0,
    seed: int = 0,
    label: str = "synthetic",
) -> ExperimentTrace:
    """모델을 입력 u로 구동한 trace. 연속 모델은 ZOH 이산화 후 시뮬레이션."""
    u = np.asarray(u, dtype=float).ravel()
    if discrete:
        dsys = (model.A, model.B, model.C, model.D, sample_time)
    else:
        dsys = signal.cont2discrete((model.A, model.B, model.C, model.D), sample_time, method="zoh")
    _, y_out, _ = signal.dlsim(dsys, u)
    y = np.asarray(y_out, dtype=float).ravel()
    if noise_std > 0:
        y = y + np.random.default_rng(seed).normal(0.0, noise_std, size=y.shape)
    t = np.arange(u.size) * sample_time
    return ExperimentTrace(t, u, y, label=label)
