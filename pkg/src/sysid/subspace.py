"""부분공간 시스템 식별 (결정론적, MOESP 계열 oblique projection).

절차:
  1. 입력/출력 block-Hankel 행렬 → 과거(Up, Yp) / 미래(Uf, Yf)
  2. Yf 를 Uf 방향으로 Wp=[Up; Yp] 위에 oblique projection
  3. SVD 절단 → 상태열 X
  4. [X(k+1); y(k)] = [A B; C D][X(k); u(k)] 최소제곱
  5. 행렬 로그로 연속시간 변환, 초기상태 추정 후 시뮬레이션 fit 계산
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy import linalg

from src.config import SYSID_RANK_TOL
from src.errors import OrderTooHighError, ValidationError
from src.lti.models import StateSpaceModel
from src.sysid.metrics import fit_percent
from src.sysid.trace import ExperimentTrace

logger = logging.getLogger(__name__)

# 자동 차수 선택 시 살펴볼 최대 특이값 수
_AUTO_ORDER_MAX = 10


@dataclass(frozen=True, slots=True, eq=False)
class IdentifiedModel:
    """식별 결과. model 은 연속시간, discrete_model 은 원 샘플링 주기."""

    model: StateSpaceModel
    order: int
    fit_percent: float
    discrete_model: StateSpaceModel
    sample_time: float
    singular_values: np.ndarray
    initial_state: np.ndarray

    def __post_init__(self) -> None:
        if self.order < 1:
            raise ValidationError(f"차수는 양의 정수여야 합니다: {self.order}")
        if self.fit_percent > 100.0 + 1e-9:
            raise ValidationError(f"fit 은 100% 이하여야 합니다: {self.fit_percent}")

    def to_dict(self) -> dict[str, Any]:
        return {
            "order": self.order,
            "fit_percent": self.fit_percent,
            "sample_time": self.sample_time,
            "continuous": self.model.to_dict(),
            "discrete": self.discrete_model.to_dict(),
            "singular_values": self.singular_values.tolist(),
            "initial_state": self.initial_state.tolist(),
        }


# ------------------------------------------------------------------
# Hankel / 차수
# ------------------------------------------------------------------


def block_hankel(x: np.ndarray, start: int, rows: int, cols: int) -> np.ndarray:
    """H[r, c] = x[start + r + c] (SISO 신호 1개)."""
    windows = sliding_window_view(np.asarray(x, dtype=float), cols)
    return np.array(windows[start:start + rows])


def select_order(singular_values: np.ndarray, max_order: int | None = None) -> int:
    """특이값 곡선의 knee — 로그 간격이 가장 큰 지점."""
    s = np.asarray(singular_values, dtype=float)
    limit = min(s.size, _AUTO_ORDER_MAX if max_order is None else max_order + 1)
    s = s[:limit]
    if s.size < 2 or s[0] <= 0:
        return 1
    floor = s[0] * 1e-16
    logs = np.log(np.maximum(s, floor))
    gaps = logs[:-1] - logs[1:]
    return int(np.argmax(gaps)) + 1


# ------------------------------------------------------------------
# 연속시간 변환 / 시뮬레이션
# ------------------------------------------------------------------


def discrete_to_continuous(dsys: StateSpaceModel, sample_time: float) -> StateSpaceModel:
    """ZOH 역변환: A_c = logm(A_d)/T, B_c = (∫₀ᵀ e^{A_c τ}dτ)⁻¹ B_d."""
    n = dsys.n_states
    Ac = linalg.logm(dsys.A)
    if np.iscomplexobj(Ac):
        imag = float(np.max(np.abs(np.imag(Ac))))
        if imag > 1e-8 * max(1.0, float(np.max(np.abs(Ac)))):
            logger.warning("이산 A 에 음의 실수 고유값 — 행렬 로그 허수부 %.3g 버림", imag)
        Ac = np.real(Ac)
    Ac = Ac / sample_time
    block = np.zeros((2 * n, 2 * n))
    block[:n, :n] = Ac
    block[:n, n:] = np.eye(n)
    psi = linalg.expm(block * sample_time)[:n, n:]
    Bc = linalg.solve(psi, dsys.B)
    return StateSpaceModel(Ac, Bc, dsys.C, dsys.D)


def _estimate_initial_state(dsys: StateSpaceModel, u: np.ndarray, y: np.ndarray) -> np.ndarray:
    """y = O·x0 + y_zs 최소제곱으로 x0 추정."""
    n = dsys.n_states
    N = y.size
    obs = np.empty((N, n))
    row = dsys.C[0].copy()
    for k in range(N):
        obs[k] = row
        row = row @ dsys.A
        if not np.all(np.isfinite(row)):
            obs[k + 1:] = 0.0
            break
    y_zs = simulate_discrete(dsys, u, np.zeros(n))
    x0, *_ = linalg.lstsq(obs, y - y_zs)
    return x0


def simulate_discrete(dsys: StateSpaceModel, u: np.ndarray, x0: np.ndarray) -> np.ndarray:
    """x(k+1) = A x + B u, y = C x + D u."""
    x = np.array(x0, dtype=float)
    b = dsys.B[:, 0]
    c = dsys.C[0]
    d = float(dsys.D[0, 0])
    y = np.empty(u.size)
    for k, uk in enumerate(u):
        y[k] = c @ x + d * uk
        x = dsys.A @ x + b * uk
    return y


# ------------------------------------------------------------------
# 식별
# ------------------------------------------------------------------


def identify_subspace(
    trace: ExperimentTrace,
    order: int | str,
    hankel_rows: int,
) -> IdentifiedModel:
    """trace → (A, B, C, D). order="auto" 이면 특이값 knee 로 선택."""
    i = int(hankel_rows)
    N = len(trace)
    if i < 1:
        raise ValidationError(f"hankel_rows 는 양의 정수여야 합니다: {hankel_rows}")
    if N < 4 * i:
        raise ValidationError(f"trace 길이 {N} < 4·hankel_rows ({4 * i})")
    if order != "auto" and not 1 <= int(order) <= i:
        raise ValidationError(f"차수는 1..{i} 범위여야 합니다: {order}")

    # 스케일 정규화 (조건수 개선)
    u_raw, y_raw = trace.input, trace.output
    su = float(np.std(u_raw)) or float(np.max(np.abs(u_raw))) or 1.0
    sy = float(np.std(y_raw)) or float(np.max(np.abs(y_raw))) or 1.0
    u = u_raw / su
    y = y_raw / sy

    j = N - 2 * i + 1
    Up, Uf = block_hankel(u, 0, i, j), block_hankel(u, i, i, j)
    Yp, Yf = block_hankel(y, 0, i, j), block_hankel(y, i, i, j)
    Wp = np.vstack((Up, Yp))

    # oblique projection: Yf ≈ Lw·Wp + Lu·Uf → O = Lw·Wp
    regressors = np.vstack((Wp, Uf))
    coeffs, *_ = linalg.lstsq(regressors.T, Yf.T)
    Lw = coeffs[: 2 * i].T
    oblique = Lw @ Wp

    U, s, Vt = linalg.svd(oblique, full_matrices=False)
    n = select_order(s, max_order=i) if order == "auto" else int(order)
    if s[0] <= 0 or s[n - 1] < SYSID_RANK_TOL * s[0]:
        raise OrderTooHighError(
            f"데이터 rank 부족 — 요청 차수 {n}, 특이값 {s[: n + 1].tolist()}"
        )

    X = np.sqrt(s[:n])[:, None] * Vt[:n]  # 시점 i .. i+j-1 상태
    lhs = np.vstack((X[:, 1:], y[i:i + j - 1][None, :]))
    rhs = np.vstack((X[:, :-1], u[i:i + j - 1][None, :]))
    theta, *_ = linalg.lstsq(rhs.T, lhs.T)
    theta = theta.T
    A = theta[:n, :n]
    B = theta[:n, n:] / su
    C = theta[n:, :n] * sy
    D = theta[n:, n:] * sy / su

    dsys = StateSpaceModel(A, B, C, D)
    x0 = _estimate_initial_state(dsys, u_raw, y_raw)
    y_model = simulate_discrete(dsys, u_raw, x0)
    fit = fit_percent(y_raw, y_model)
    csys = discrete_to_continuous(dsys, trace.sample_time)

    logger.info(
        "부분공간 식별: %s 차수=%d, hankel=%d, fit=%.2f%%",
        trace.label or "trace", n, i, fit,
    )
    return IdentifiedModel(
        model=csys,
        order=n,
        fit_percent=fit,
        discrete_model=dsys,
        sample_time=trace.sample_time,
        singular_values=s,
        initial_state=x0,
    )


def identify_family(
    traces: list[ExperimentTrace],
    orders: list[int | str] | int | str,
    hankel_rows: int,
) -> list[IdentifiedModel]:
    """trace 목록 일괄 식별 — 차수는 공통값 또는 trace별 목록."""
    if isinstance(orders, list):
        if len(orders) != len(traces):
            raise ValidationError(f"차수 {len(orders)}개 ≠ trace {len(traces)}개")
        per_trace = orders
    else:
        per_trace = [orders] * len(traces)
    return [identify_subspace(t, o, hankel_rows) for t, o in zip(traces, per_trace)]
