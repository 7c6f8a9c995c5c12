"""LQR 상태되먹임 — CARE (Hamiltonian ordered Schur), 기준 게인, Lyapunov 인증, p 튜닝.

    AᵀY + YA − YBR⁻¹BᵀY + Q = 0,   K = R⁻¹BᵀY,   u = N̄r − Kx
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Any

import numpy as np
from scipy import linalg

from src.config import (
    HAMILTONIAN_AXIS_TOL,
    LQR_DEFAULT_VELOCITY_WEIGHT,
    LYAPUNOV_TOL,
    SETTLING_BAND,
    TUNE_DT,
    TUNE_HORIZON,
    TUNE_MAX_ITER,
    TUNE_P_MAX,
    TUNE_P_MIN,
)
from src.errors import (
    HamiltonianBoundaryError,
    SynthesisInfeasibleError,
    UnsupportedModelError,
    ValidationError,
)
from src.lti.analysis import is_hurwitz
from src.lti.models import RationalTransferFunction, StateSpaceModel
from src.sim.engine import ReferenceSignal, StateFeedback, simulate
from src.sim.metrics import NOT_SETTLED

logger = logging.getLogger(__name__)

# CARE 잔차 허용 (‖Q‖_F 대비)
_RESIDUAL_TOL = 1e-9
# Schur 해 정밀화용 Newton-Kleinman 최대 반복
_REFINE_STEPS = 5
# 튜닝 목표 정착 시간 허용 오차 [s]
_TUNE_TIME_TOL = 5e-3


# ------------------------------------------------------------------
# 가중치 / 해
# ------------------------------------------------------------------


@dataclass(frozen=True, slots=True, eq=False)
class LqrWeights:
    """Q = p·diag(1, velocity_weight, 0, …) (Q 를 직접 주면 그대로), R > 0."""

    p: float = 1.0
    R: float = 1.0
    velocity_weight: float = LQR_DEFAULT_VELOCITY_WEIGHT
    Q: np.ndarray | None = None

    def __post_init__(self) -> None:
        if not (math.isfinite(self.p) and self.p > 0):
            raise ValidationError(f"p 는 양수여야 합니다: {self.p}")
        if not (math.isfinite(self.R) and self.R > 0):
            raise ValidationError(f"R 은 양수여야 합니다: {self.R}")
        if self.velocity_weight < 0:
            raise ValidationError(f"velocity_weight 는 0 이상: {self.velocity_weight}")
        if self.Q is not None:
            Q = np.atleast_2d(np.asarray(self.Q, dtype=float))
            if Q.shape[0] != Q.shape[1] or not np.allclose(Q, Q.T, atol=1e-12):
                raise ValidationError("Q 는 대칭 정방행렬이어야 합니다")
            if np.min(linalg.eigvalsh(Q)) < -1e-12 * max(1.0, float(np.abs(Q).max())):
                raise ValidationError("Q 는 양반정치여야 합니다")
            Q.setflags(write=False)
            object.__setattr__(self, "Q", Q)

    def state_weight(self, n: int) -> np.ndarray:
        if self.Q is not None:
            if self.Q.shape != (n, n):
                raise ValidationError(f"Q shape {self.Q.shape} ≠ ({n}, {n})")
            return np.array(self.Q)
        diag = np.zeros(n)
        diag[0] = 1.0
        if n > 1:
            diag[1] = self.velocity_weight
        return self.p * np.diag(diag)

    def to_dict(self) -> dict[str, Any]:
        return {
            "p": self.p,
            "R": self.R,
            "velocity_weight": self.velocity_weight,
            "Q": None if self.Q is None else self.Q.tolist(),
        }


@dataclass(frozen=True, slots=True, eq=False)
class LqrSolution:
    """Riccati 해 Y, 게인 K (1×n), 폐루프 (A−BK, BN̄, C, 0), 기준 게인 N̄."""

    Y: np.ndarray
    K_gain: np.ndarray
    closed_loop: StateSpaceModel
    reference_gain: float = 1.0
    plant: StateSpaceModel | None = None

    def __post_init__(self) -> None:
        Y = np.atleast_2d(np.asarray(self.Y, dtype=float))
        K = np.atleast_2d(np.asarray(self.K_gain, dtype=float))
        n = self.closed_loop.n_states
        if Y.shape != (n, n) or K.shape != (1, n):
            raise ValidationError(f"Y {Y.shape}, K {K.shape} 가 상태 {n} 과 맞지 않습니다")
        object.__setattr__(self, "Y", Y)
        object.__setattr__(self, "K_gain", K)

    @property
    def feedback(self) -> StateFeedback:
        return StateFeedback(self.K_gain[0], self.reference_gain)

    def closed_loop_poles(self) -> np.ndarray:
        return linalg.eigvals(self.closed_loop.A)

    def to_dict(self) -> dict[str, Any]:
        poles = self.closed_loop_poles()
        return {
            "Y": self.Y.tolist(),
            "K": self.K_gain[0].tolist(),
            "reference_gain": self.reference_gain,
            "closed_loop": self.closed_loop.to_dict(),
            "closed_loop_poles": [{"real": float(p.real), "imag": float(p.imag)} for p in poles],
            "plant": None if self.plant is None else self.plant.to_dict(),
        }


@dataclass(frozen=True, slots=True)
class LyapunovCertificate:
    """V = xᵀYx. v_positive: Y ≻ 0, vdot_negative: λmax(A_clᵀY + YA_cl) < tol."""

    v_positive: bool
    vdot_negative: bool
    min_eig_y: float
    max_eig_vdot: float

    @property
    def valid(self) -> bool:
        return self.v_positive and self.vdot_negative

    def to_dict(self) -> dict[str, Any]:
        return {
            "v_positive": self.v_positive,
            "vdot_negative": self.vdot_negative,
            "min_eig_Y": self.min_eig_y,
            "max_eig_Vdot": self.max_eig_vdot,
        }


@dataclass(frozen=True, slots=True)
class TuningResult:
    p: float
    settling_time: float
    iterations: int

    def to_dict(self) -> dict[str, Any]:
        return {"p": self.p, "settling_time_s": self.settling_time, "iterations": self.iterations}


# ------------------------------------------------------------------
# CARE
# ------------------------------------------------------------------


def _as_r(R: float | np.ndarray, m: int) -> np.ndarray:
    Rm = np.atleast_2d(np.asarray(R, dtype=float))
    if Rm.shape == (1, 1) and m > 1:
        Rm = Rm[0, 0] * np.eye(m)
    if Rm.shape != (m, m):
        raise ValidationError(f"R shape {Rm.shape} ≠ ({m}, {m})")
    try:
        linalg.cholesky(Rm)
    except linalg.LinAlgError:
        raise ValidationError("R 은 양정치여야 합니다") from None
    return Rm


def _check_stabilizable(A: np.ndarray, B: np.ndarray) -> None:
    """PBH: Re λ ≥ 0 인 고유값마다 rank[λI − A, B] = n."""
    n = A.shape[0]
    for lam in linalg.eigvals(A):
        if lam.real < -HAMILTONIAN_AXIS_TOL:
            continue
        pbh = np.hstack((lam * np.eye(n) - A, B))
        if np.linalg.matrix_rank(pbh) < n:
            raise SynthesisInfeasibleError(f"(A, B) 안정화 불가 — 모드 λ={lam:.4g} 가 비가제어")


def care_residual(A: np.ndarray, B: np.ndarray, Q: np.ndarray, R: np.ndarray, Y: np.ndarray) -> float:
    res = A.T @ Y + Y @ A - Y @ B @ linalg.solve(R, B.T) @ Y + Q
    return float(np.linalg.norm(res, "fro"))


def _kleinman_step(A: np.ndarray, B: np.ndarray, Q: np.ndarray, R: np.ndarray, K: np.ndarray) -> np.ndarray:
    Ak = A - B @ K
    Y = linalg.solve_continuous_lyapunov(Ak.T, -(Q + K.T @ R @ K))
    return 0.5 * (Y + Y.T)


def solve_care(
    A: np.ndarray,
    B: np.ndarray,
    Q: np.ndarray,
    R: float | np.ndarray,
) -> np.ndarray:
    """안정화 해 Y. Hamiltonian 의 안정 불변부분공간 [U11; U21] 에서 Y = U21·U11⁻¹.

    허수축 고유값이 있으면 HamiltonianBoundaryError, 안정화 불가면 SynthesisInfeasibleError.
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    B = np.asarray(B, dtype=float)
    B = B.reshape(A.shape[0], -1)
    Q = np.atleast_2d(np.asarray(Q, dtype=float))
    n, m = B.shape
    if A.shape != (n, n) or Q.shape != (n, n):
        raise ValidationError(f"A {A.shape}, B {B.shape}, Q {Q.shape} 차원 불일치")
    Rm = _as_r(R, m)
    _check_stabilizable(A, B)

    G = B @ linalg.solve(Rm, B.T)
    H = np.block([[A, -G], [-Q, -A.T]])
    scale = max(1.0, float(np.linalg.norm(H, 1)))
    eig = linalg.eigvals(H)
    if np.any(np.abs(eig.real) <= HAMILTONIAN_AXIS_TOL * scale):
        raise HamiltonianBoundaryError(
            f"Hamiltonian 고유값이 허수축 위에 있습니다: {eig[np.argmin(np.abs(eig.real))]:.4g}"
        )

    _, Z, sdim = linalg.schur(H, output="real", sort="lhp")
    if sdim != n:
        raise HamiltonianBoundaryError(f"안정 고유값 {sdim}개 ≠ {n}")
    U11, U21 = Z[:n, :n], Z[n:, :n]
    if np.linalg.cond(U11) > 1.0 / np.finfo(float).eps:
        raise SynthesisInfeasibleError("U11 특이 — 안정화 해가 없습니다 (검출 불가 모드)")
    Y = linalg.solve(U11.T, U21.T).T
    Y = 0.5 * (Y + Y.T)

    tol = _RESIDUAL_TOL * max(1.0, float(np.linalg.norm(Q, "fro")))
    residual = care_residual(A, B, Q, Rm, Y)
    steps = 0
    while residual > tol and steps < _REFINE_STEPS:
        K = linalg.solve(Rm, B.T @ Y)
        if not is_hurwitz(A - B @ K):
            break
        Y = _kleinman_step(A, B, Q, Rm, K)
        residual = care_residual(A, B, Q, Rm, Y)
        steps += 1
    if residual > tol:
        logger.warning("CARE 잔차 %.3g > 허용 %.3g (Newton 정밀화 %d회)", residual, tol, steps)
    else:
        logger.debug("CARE 잔차 %.3g (Newton 정밀화 %d회)", residual, steps)
    return Y


def solve_care_kleinman(
    A: np.ndarray,
    B: np.ndarray,
    Q: np.ndarray,
    R: float | np.ndarray,
    K0: np.ndarray | None = None,
    tol: float = 1e-12,
    max_iter: int = 100,
) -> np.ndarray:
    """Newton-Kleinman 반복. K0 은 안정화 게인이어야 한다 (A 가 Hurwitz 면 생략 가능)."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    B = np.asarray(B, dtype=float).reshape(A.shape[0], -1)
    Q = np.atleast_2d(np.asarray(Q, dtype=float))
    Rm = _as_r(R, B.shape[1])
    if K0 is None:
        if not is_hurwitz(A):
            raise ValidationError("A 가 Hurwitz 가 아니면 안정화 초기 게인 K0 가 필요합니다")
        K = np.zeros((B.shape[1], A.shape[0]))
    else:
        K = np.atleast_2d(np.asarray(K0, dtype=float))
    if not is_hurwitz(A - B @ K):
        raise ValidationError("K0 가 안정화 게인이 아닙니다")

    Y_prev: np.ndarray | None = None
    for it in range(max_iter):
        Y = _kleinman_step(A, B, Q, Rm, K)
        K = linalg.solve(Rm, B.T @ Y)
        if Y_prev is not None and np.linalg.norm(Y - Y_prev) <= tol * max(1.0, np.linalg.norm(Y)):
            logger.debug("Kleinman 수렴: %d회", it + 1)
            return Y
        Y_prev = Y
    logger.warning("Kleinman 반복 %d회 내 미수렴", max_iter)
    return Y


# ------------------------------------------------------------------
# 게인 / 인증
# ------------------------------------------------------------------


def reference_gain(A_cl: np.ndarray, B: np.ndarray, C: np.ndarray) -> float:
    """N̄ = 1 / (C(−A_cl)⁻¹B) — 폐루프 DC 이득을 1로."""
    B = np.asarray(B, dtype=float).reshape(np.asarray(A_cl).shape[0], -1)
    dc = (np.atleast_2d(C)[:1] @ linalg.solve(-np.asarray(A_cl, dtype=float), B[:, :1])).item()
    if abs(dc) < 1e-300 or not math.isfinite(dc):
        raise SynthesisInfeasibleError(f"폐루프 DC 이득이 0 — 기준 게인 정의 불가 ({dc})")
    return 1.0 / dc


def lqr_gain(sys: StateSpaceModel, weights: LqrWeights) -> LqrSolution:
    """CARE → K = R⁻¹BᵀY → A_cl Hurwitz 확인 → N̄."""
    if not sys.is_siso:
        raise UnsupportedModelError("단일 입력/출력 플랜트만 지원합니다")
    n = sys.n_states
    Q = weights.state_weight(n)
    Y = solve_care(sys.A, sys.B, Q, weights.R)
    K = (sys.B.T @ Y) / weights.R
    A_cl = sys.A - sys.B @ K
    if not is_hurwitz(A_cl):
        raise SynthesisInfeasibleError("LQR 폐루프가 Hurwitz 가 아닙니다 (Q 검출성 확인)")
    nbar = reference_gain(A_cl, sys.B, sys.C)
    closed = StateSpaceModel(A_cl, sys.B * nbar, sys.C, np.zeros((1, 1)))
    poles = linalg.eigvals(A_cl)
    logger.info(
        "LQR: p=%.4g, K=%s, N̄=%.4g, 최저 감쇠 극점 Re=%.4g",
        weights.p, np.array2string(K[0], precision=4), nbar, float(np.max(poles.real)),
    )
    return LqrSolution(Y=Y, K_gain=K, closed_loop=closed, reference_gain=nbar, plant=sys)


def lyapunov_certificate(sol: LqrSolution) -> LyapunovCertificate:
    """Y 양정치(Cholesky)와 A_clᵀY + YA_cl 음정치 확인."""
    Y = 0.5 * (sol.Y + sol.Y.T)
    try:
        linalg.cholesky(Y)
        v_positive = True
    except linalg.LinAlgError:
        v_positive = False
    A_cl = sol.closed_loop.A
    vdot = A_cl.T @ Y + Y @ A_cl
    max_vdot = float(np.max(linalg.eigvalsh(0.5 * (vdot + vdot.T))))
    cert = LyapunovCertificate(
        v_positive=v_positive,
        vdot_negative=max_vdot < LYAPUNOV_TOL,
        min_eig_y=float(np.min(linalg.eigvalsh(Y))),
        max_eig_vdot=max_vdot,
    )
    if not cert.valid:
        logger.warning("Lyapunov 인증 실패: %s", cert.to_dict())
    return cert


def loop_controller(sol: LqrSolution) -> RationalTransferFunction:
    """상태되먹임과 등가인 직렬 보상기 K_eq(s) = (Σ k_i s^(i−1)) / num_T(s).

    가제어 정준형 플랜트에서 T·K_eq 가 루프 전달함수 K(sI−A)⁻¹B 와 같다.
    """
    plant = sol.plant
    if plant is None:
        raise ValidationError("loop_controller 는 plant 가 기록된 LqrSolution 이 필요합니다")
    n = plant.n_states
    e_n = np.zeros((n, 1))
    e_n[-1, 0] = 1.0
    companion = np.allclose(plant.A[:-1, 1:], np.eye(n - 1)) and np.allclose(plant.A[:-1, 0], 0.0)
    if not (companion and np.allclose(plant.B, e_n)):
        raise UnsupportedModelError("가제어 정준형 플랜트에서만 등가 보상기를 만듭니다")
    return RationalTransferFunction(tuple(sol.K_gain[0][::-1]), tuple(plant.C[0][::-1]))


# ------------------------------------------------------------------
# 튜닝
# ------------------------------------------------------------------


def velocity_weight_floor(target_settling: float, band: float = SETTLING_BAND) -> float:
    """p → ∞ 에서 느린 극점이 −1/√q2 로 수렴하므로 정착 시간 하한은 ln(1/band)·√q2.

    target 을 달성 가능하게 하는 q2 의 상한.
    """
    return (target_settling / math.log(1.0 / band)) ** 2


def _settling_for(sys: StateSpaceModel, p: float, weights: LqrWeights, band: float, dt: float, horizon: float) -> float:
    w = LqrWeights(p=p, R=weights.R, velocity_weight=weights.velocity_weight)
    try:
        sol = lqr_gain(sys, w)
    except SynthesisInfeasibleError:
        return NOT_SETTLED
    ref = ReferenceSignal("step", 1.0, horizon=horizon)
    result = simulate(sys, ref, dt, feedback=sol.feedback, band=band, warn_resolution=False)
    return float(result.metrics["settling_time_s"])


def tune_state_penalty(
    sys: StateSpaceModel,
    target_settling: float,
    window: tuple[float, float],
    weights: LqrWeights | None = None,
    *,
    band: float = SETTLING_BAND,
    p_min: float = TUNE_P_MIN,
    p_max: float = TUNE_P_MAX,
    dt: float = TUNE_DT,
    horizon: float = TUNE_HORIZON,
    max_iter: int = TUNE_MAX_ITER,
) -> TuningResult:
    """log p 이분법 — p 가 클수록 정착이 빨라진다는 단조성에 기대고,
    실패 시 로그 격자 탐색으로 window 안의 p 를 찾는다."""
    lo_w, hi_w = window
    if not 0 < lo_w <= target_settling <= hi_w:
        raise ValidationError(f"window {window} 가 목표 {target_settling} 를 포함해야 합니다")
    base = weights or LqrWeights()

    best: tuple[float, float] | None = None

    def consider(p: float, ts: float) -> None:
        nonlocal best
        if lo_w <= ts <= hi_w and (best is None or abs(ts - target_settling) < abs(best[1] - target_settling)):
            best = (p, ts)

    lo, hi = math.log10(p_min), math.log10(p_max)
    ts_hi = _settling_for(sys, 10.0 ** hi, base, band, dt, horizon)
    consider(10.0 ** hi, ts_hi)
    if ts_hi > target_settling and ts_hi > hi_w:
        floor = math.log(1.0 / band) * math.sqrt(base.velocity_weight)
        raise SynthesisInfeasibleError(
            f"p={p_max:.3g} 에서도 정착 {ts_hi:.4g} s > {hi_w} s "
            f"(velocity_weight={base.velocity_weight} 의 정착 하한 ≈ {floor:.3g} s)"
        )

    iterations = 0
    for iterations in range(1, max_iter + 1):
        mid = 0.5 * (lo + hi)
        ts = _settling_for(sys, 10.0 ** mid, base, band, dt, horizon)
        consider(10.0 ** mid, ts)
        if abs(ts - target_settling) <= _TUNE_TIME_TOL:
            break
        if ts > target_settling:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-4:
            break

    if best is None:
        logger.warning("이분법 실패 — 로그 격자 탐색으로 전환")
        for p in np.logspace(math.log10(p_min), math.log10(p_max), 91):
            iterations += 1
            consider(float(p), _settling_for(sys, float(p), base, band, dt, horizon))
    if best is None:
        raise SynthesisInfeasibleError(f"정착 시간 window {window} 를 만족하는 p 가 없습니다")

    p_star, ts_star = best
    logger.info("p 튜닝: p=%.4g → 정착 %.4g s (목표 %.3g s, %d회)", p_star, ts_star, target_settling, iterations)
    return TuningResult(p=float(p_star), settling_time=float(ts_star), iterations=iterations)
