"""툴킷 예외 계층 — CLI 종료 코드 매핑.

라이브러리 코드는 raise만 한다. 종료 코드 변환은 src.main에서만.
  2: 검증 (config / trace / 모델 형태)
  3: 수치 실패
  4: 상류 산출물 누락
"""

from __future__ import annotations


class SpaToolkitError(RuntimeError):
    """모든 툴킷 예외의 베이스."""

    exit_code: int = 1


# ===== 검증 (exit 2) =====
class ValidationError(SpaToolkitError):
    exit_code = 2


class InvalidModelError(ValidationError):
    """분모가 0 다항식이거나 차원이 맞지 않는 모델."""


class UnsupportedModelError(ValidationError):
    """improper 전달함수 등 지원하지 않는 형태."""


class InvalidTraceError(ValidationError):
    """비균일 샘플링, 길이 부족 등."""


class InvalidExperimentError(ValidationError):
    """step 입력이 아닌 실험."""


class TraceParseError(ValidationError):
    """CSV 파싱 실패 — 줄 번호 포함."""

    def __init__(self, path: str, line: int, reason: str) -> None:
        super().__init__(f"{path}:{line}: {reason}")
        self.path = path
        self.line = line


class ActuationLimitError(ValidationError):
    """모터 속도 한계 초과."""


# ===== 수치 실패 (exit 3) =====
class NumericError(SpaToolkitError):
    exit_code = 3


class PoleOnGridError(NumericError):
    """주파수 격자 위의 허수축 극점."""

    def __init__(self, omega: float) -> None:
        super().__init__(f"ω={omega:.6g} rad/s 에서 허수축 극점 — 주파수 응답 정의 불가")
        self.omega = omega


class InfiniteNormError(NumericError):
    """불안정 시스템의 H∞ 노름."""


class DegenerateDivisionError(NumericError):
    """공칭 모델 크기가 0에 가까워 상대오차 계산 불가."""

    def __init__(self, omega: float, magnitude: float) -> None:
        super().__init__(
            f"ω={omega:.6g} rad/s 에서 공칭 크기 {magnitude:.3g} — 상대오차 분모 퇴화"
        )
        self.omega = omega


class OrderTooHighError(NumericError):
    """요청 차수가 데이터 rank보다 높음."""


class UndefinedFitError(NumericError):
    """측정 신호가 상수라 fit 정의 불가."""


class SynthesisInfeasibleError(NumericError):
    """(A, B) 안정화 불가 등 LQR 합성 불가."""


class HamiltonianBoundaryError(NumericError):
    """Hamiltonian 고유값이 허수축 위."""


class NominalInstabilityError(NumericError):
    """공칭 폐루프가 불안정 — 강건성 판정 무의미."""


class StepSizeError(NumericError):
    """적분 스텝이 RK4 안정 영역을 벗어남."""


class RobustnessPreconditionError(NumericError):
    """small-gain 조건 미충족 상태에서 표본 검증 호출."""


class BoundaryFitError(NumericError):
    """--strict 에서 감쇠비 피팅이 탐색 경계에 닿음."""


# ===== 의존성 (exit 4) =====
class DependencyError(SpaToolkitError):
    """상류 산출물 누락 — 생성 명령을 알려준다."""

    exit_code = 4

    def __init__(self, artifact: str, producer: str) -> None:
        super().__init__(f"{artifact} 없음 — 먼저 `{producer}` 를 실행하세요")
        self.artifact = artifact
        self.producer = producer
