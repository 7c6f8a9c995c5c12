"""LTI 기본 타입 — 전달함수, 상태공간, 주파수 응답 점.

모든 타입은 생성 후 불변. 모듈 간 공용어.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any

import numpy as np

from src.errors import InvalidModelError


def _trim_leading(coeffs: np.ndarray) -> np.ndarray:
    """앞쪽 0 계수 제거. 전부 0이면 빈 배열."""
    nz = np.flatnonzero(coeffs)
    if nz.size == 0:
        return coeffs[:0]
    return coeffs[nz[0]:]


def _as_coeffs(values: Any, label: str) -> np.ndarray:
    arr = np.atleast_1d(np.asarray(values, dtype=float))
    if arr.ndim != 1:
        raise InvalidModelError(f"{label} 계수는 1차원이어야 합니다: shape={arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidModelError(f"{label} 계수에 유한하지 않은 값이 있습니다")
    return arr


# ------------------------------------------------------------------
# 전달함수
# ------------------------------------------------------------------
@dataclass(frozen=True, slots=True)
class RationalTransferFunction:
    """s 다항식의 비 num(s)/den(s). 계수는 내림차순.

    생성 시 분모를 monic으로 정규화하므로 계수 비교가 곧 동치 비교.
    """

    numerator: tuple[float, ...]
    denominator: tuple[float, ...]

    def __post_init__(self) -> None:
        num = _trim_leading(_as_coeffs(self.numerator, "분자"))
        den = _trim_leading(_as_coeffs(self.denominator, "분모"))
        if den.size == 0:
            raise InvalidModelError("분모 다항식이 0입니다")
        lead = den[0]
        num = num / lead if num.size else np.zeros(1)
        den = den / lead
        object.__setattr__(self, "numerator", tuple(float(c) for c in num))
        object.__setattr__(self, "denominator", tuple(float(c) for c in den))

    # ---- 생성 헬퍼 ----

    @classmethod
    def constant(cls, gain: float) -> RationalTransferFunction:
        return cls((gain,), (1.0,))

    # ---- 조회 ----

    @property
    def num(self) -> np.ndarray:
        return np.array(self.numerator)

    @property
    def den(self) -> np.ndarray:
        return np.array(self.denominator)

    @property
    def order(self) -> int:
        return len(self.denominator) - 1

    @property
    def is_zero(self) -> bool:
        return not any(self.numerator)

    @property
    def numerator_degree(self) -> int:
        return -1 if self.is_zero else len(self.numerator) - 1

    @property
    def is_proper(self) -> bool:
        return self.numerator_degree <= self.order

    @property
    def is_strictly_proper(self) -> bool:
        return self.numerator_degree < self.order

    def evaluate(self, s: complex | np.ndarray) -> complex | np.ndarray:
        """T(s) 직접 계산. 극점 위에서는 inf/nan이 나올 수 있음."""
        return np.polyval(self.num, s) / np.polyval(self.den, s)

    def dc_gain(self) -> float:
        """T(0). 원점 극점이면 inf."""
        if self.denominator[-1] == 0.0:
            return math.inf
        return float(self.numerator[-1] / self.denominator[-1]) if len(self.numerator) else 0.0

    # ---- 합성 ----

    def __mul__(self, other: RationalTransferFunction | float) -> RationalTransferFunction:
        if isinstance(other, RationalTransferFunction):
            return RationalTransferFunction(
                np.polymul(self.num, other.num), np.polymul(self.den, other.den),
            )
        return self.scale(float(other))

    __rmul__ = __mul__

    def __add__(self, other: RationalTransferFunction) -> RationalTransferFunction:
        num = np.polyadd(np.polymul(self.num, other.den), np.polymul(other.num, self.den))
        return RationalTransferFunction(num, np.polymul(self.den, other.den))

    def __neg__(self) -> RationalTransferFunction:
        return self.scale(-1.0)

    def scale(self, gain: float) -> RationalTransferFunction:
        return RationalTransferFunction(self.num * gain, self.den)

    def series(self, other: RationalTransferFunction) -> RationalTransferFunction:
        """직렬 연결 self·other."""
        return self * other

    def feedback(self) -> RationalTransferFunction:
        """단위 음되먹임 L/(1+L) — self를 루프 전달함수로 본다."""
        return RationalTransferFunction(self.num, np.polyadd(self.den, self.num))

    def to_dict(self) -> dict[str, list[float]]:
        return {"numerator": list(self.numerator), "denominator": list(self.denominator)}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> RationalTransferFunction:
        return cls(tuple(data["numerator"]), tuple(data["denominator"]))


# ------------------------------------------------------------------
# 상태공간
# ------------------------------------------------------------------
@dataclass(frozen=True, slots=True, eq=False)
class StateSpaceModel:
    """(A, B, C, D) 실수 행렬. 연속시간.

    내부 배열은 읽기 전용 복사본.
    """

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray

    def __post_init__(self) -> None:
        A = np.atleast_2d(np.array(self.A, dtype=float))
        n = A.shape[0]
        if A.shape != (n, n):
            raise InvalidModelError(f"A는 정방행렬이어야 합니다: shape={A.shape}")
        try:
            B = np.array(self.B, dtype=float).reshape(n, -1) if n else np.zeros((0, 1))
            C = np.array(self.C, dtype=float).reshape(-1, n) if n else np.zeros((1, 0))
        except ValueError:
            raise InvalidModelError(f"B/C 차원이 상태 수 {n} 과 맞지 않습니다") from None
        D = np.atleast_2d(np.array(self.D, dtype=float))
        if D.shape != (C.shape[0], B.shape[1]):
            if D.size == 1:
                D = np.full((C.shape[0], B.shape[1]), float(D.ravel()[0]))
            else:
                raise InvalidModelError(
                    f"D 차원 불일치: {D.shape} ≠ ({C.shape[0]}, {B.shape[1]})"
                )
        for name, mat in (("A", A), ("B", B), ("C", C), ("D", D)):
            if not np.all(np.isfinite(mat)):
                raise InvalidModelError(f"{name}에 유한하지 않은 값이 있습니다")
            mat.setflags(write=False)
            object.__setattr__(self, name, mat)

    @property
    def n_states(self) -> int:
        return self.A.shape[0]

    @property
    def n_inputs(self) -> int:
        return self.B.shape[1]

    @property
    def n_outputs(self) -> int:
        return self.C.shape[0]

    @property
    def is_siso(self) -> bool:
        return self.n_inputs == 1 and self.n_outputs == 1

    def to_dict(self) -> dict[str, list[list[float]]]:
        return {k: getattr(self, k).tolist() for k in ("A", "B", "C", "D")}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> StateSpaceModel:
        return cls(
            np.array(data["A"]), np.array(data["B"]), np.array(data["C"]), np.array(data["D"]),
        )


# ------------------------------------------------------------------
# 주파수 응답 점
# ------------------------------------------------------------------
@dataclass(frozen=True, slots=True)
class FrequencyResponsePoint:
    """ω [rad/s] 에서의 크기(무차원)와 위상(rad)."""

    omega: float
    magnitude: float
    phase: float

    def __post_init__(self) -> None:
        if not self.omega > 0:
            raise InvalidModelError(f"ω는 양수여야 합니다: {self.omega}")
        if not self.magnitude >= 0:
            raise InvalidModelError(f"크기는 0 이상이어야 합니다: {self.magnitude}")

    @property
    def complex_value(self) -> complex:
        return self.magnitude * complex(math.cos(self.phase), math.sin(self.phase))
