"""환경변수 로드 + 설정 상수."""

import os
from pathlib import Path

from dotenv import load_dotenv

# .env 파일 로드
load_dotenv(Path(__file__).resolve().parent.parent / ".env")


# --- 실행 환경 ---
SPA_LOG_LEVEL: str = os.getenv("SPA_LOG_LEVEL", "INFO")
SPA_OUT_DIR: str = os.getenv("SPA_OUT_DIR", "out")
SPA_SEED: int = int(os.getenv("SPA_SEED", "0"))
SPA_RUN_DB: str = os.getenv("SPA_RUN_DB", "")  # 비어 있으면 <out_dir>/runs.db

# --- 물리 상수 ---
GRAVITY: float = 9.81  # m/s², 무게(N) → 질량(kg) 변환

# --- 주파수 해석 ---
HINF_GRID_POINTS: int = int(os.getenv("HINF_GRID_POINTS", "400"))
HINF_OMEGA_MIN: float = float(os.getenv("HINF_OMEGA_MIN", "1e-3"))
HINF_OMEGA_MAX: float = float(os.getenv("HINF_OMEGA_MAX", "1e3"))
HINF_REL_TOL: float = 1e-4
ENVELOPE_GRID_POINTS: int = int(os.getenv("ENVELOPE_GRID_POINTS", "200"))
ENVELOPE_DECADES: float = 2.0  # ωn 기준 앞뒤 2 decade

# --- 시뮬레이션 ---
SIM_DT: float = float(os.getenv("SIM_DT", "1e-3"))  # 초
SIM_HORIZON: float = float(os.getenv("SIM_HORIZON", "10.0"))  # 초
SETTLING_BAND: float = 0.02
SETTLING_BAND_MAX: float = 0.1
PLATEAU_FRACTION: float = 0.1  # 정상상태 = 마지막 10%
RK4_STABILITY_LIMIT: float = 2.5  # dt·ρ(A) 상한 (RK4 실축 안정 한계 ≈ 2.785)
RESOLUTION_FRACTION: float = 0.01  # dt ≤ 1% × 가장 빠른 시정수 권장

# --- 감쇠비 피팅 ---
DAMPING_SEARCH_LOWER: float = 0.01
DAMPING_SEARCH_UPPER: float = 0.99
DAMPING_TOL: float = 1e-5
DAMPING_COARSE_POINTS: int = 99

# --- 시스템 식별 ---
SYSID_SAMPLE_RATE_HZ: float = float(os.getenv("SYSID_SAMPLE_RATE_HZ", "100"))
SYSID_RANK_TOL: float = 1e-10  # σ_n / σ_1 이 이보다 작으면 rank 부족
TRACE_MIN_SAMPLES: int = 16
TRACE_JITTER_TOL: float = 1e-9

# --- LQR ---
LQR_DEFAULT_VELOCITY_WEIGHT: float = 0.1  # Q = p·diag(1, 0.1, 0)
LYAPUNOV_TOL: float = 1e-10
HAMILTONIAN_AXIS_TOL: float = 1e-9
TUNE_P_MIN: float = 1e-2
TUNE_P_MAX: float = 1e9
TUNE_MAX_ITER: int = 60
TUNE_DT: float = 2e-3
TUNE_HORIZON: float = 6.0

# --- 강건성 ---
ROBUST_SAMPLES: int = 200
