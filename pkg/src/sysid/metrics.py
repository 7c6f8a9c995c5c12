"""식별 적합도 — 정규화 RMSE fit [%]."""

from __future__ import annotations

import numpy as np

from src.errors import UndefinedFitError, ValidationError


def fit_percent(y_measured: np.ndarray, y_model: np.ndarray) -> float:
    """100·(1 − ‖y − ŷ‖₂ / ‖y − mean(y)‖₂). 상한 100, 하한 없음."""
    y = np.asarray(y_measured, dtype=float).ravel()
    yhat = np.asarray(y_model, dtype=float).ravel()
    if y.shape != yhat.shape or y.size < 2:
        raise ValidationError(f"길이가 같고 2 이상이어야 합니다: {y.size} vs {yhat.size}")
    spread = float(np.linalg.norm(y - y.mean()))
    if spread == 0.0:
        raise UndefinedFitError("측정 신호가 상수 — fit 정의 불가")
    return float(100.0 * (1.0 - np.linalg.norm(y - yhat) / spread))
