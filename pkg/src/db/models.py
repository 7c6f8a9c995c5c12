"""SQLAlchemy 모델 — CLI 실행 이력 (run ledger)."""

from sqlalchemy import JSON, Column, DateTime, Integer, String, Text, func
from sqlalchemy.orm import DeclarativeBase


class Base(DeclarativeBase):
    """SQLAlchemy 2.0 Declarative Base."""

    pass


# ===== RUNS =====
class RunRecord(Base):
    __tablename__ = "runs"

    id = Column(Integer, primary_key=True, autoincrement=True)
    command = Column(String(32), nullable=False, index=True)
    config_hash = Column(String(64), nullable=False)
    seed = Column(Integer, nullable=False, default=0)
    exit_code = Column(Integer, nullable=False, default=0)
    out_dir = Column(Text, nullable=False)
    summary = Column(JSON, nullable=True)  # 명령별 핵심 지표
    error = Column(Text, nullable=True)
    created_at = Column(DateTime(timezone=True), nullable=False, server_default=func.now())

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "command": self.command,
            "config_hash": self.config_hash,
            "seed": self.seed,
            "exit_code": self.exit_code,
            "out_dir": self.out_dir,
            "summary": self.summary,
            "error": self.error,
            "created_at": self.created_at.isoformat() if self.created_at else None,
        }
