"""동기 세션 팩토리 — SQLAlchemy 2.0 + SQLite.

DB 경로: SPA_RUN_DB 가 있으면 그 파일, 없으면 <out_dir>/runs.db.
"""

from __future__ import annotations

import logging
from collections.abc import Iterator
from contextlib import contextmanager
from functools import lru_cache
from pathlib import Path

from sqlalchemy import Engine, create_engine, event, select
from sqlalchemy.orm import Session, sessionmaker

from src.config import SPA_RUN_DB
from src.db.models import Base, RunRecord

logger = logging.getLogger(__name__)


def resolve_db_path(out_dir: str | Path) -> Path:
    return Path(SPA_RUN_DB) if SPA_RUN_DB else Path(out_dir) / "runs.db"


@lru_cache(maxsize=8)
def get_engine(db_path: str) -> Engine:
    """경로별 엔진 1개. 최초 생성 시 테이블 create_all."""
    Path(db_path).parent.mkdir(parents=True, exist_ok=True)
    engine = create_engine(
        f"sqlite:///{db_path}",
        echo=False,
        connect_args={"check_same_thread": False, "timeout": 30},
    )

    @event.listens_for(engine, "connect")
    def _pragma(dbapi_conn, _record) -> None:  # noqa: ANN001
        cur = dbapi_conn.cursor()
        cur.execute("PRAGMA busy_timeout=5000")
        cur.close()

    Base.metadata.create_all(engine)
    return engine


@contextmanager
def session_scope(out_dir: str | Path) -> Iterator[Session]:
    """commit / rollback 을 묶은 세션 컨텍스트."""
    factory = sessionmaker(get_engine(str(resolve_db_path(out_dir))), expire_on_commit=False)
    session = factory()
    try:
        yield session
        session.commit()
    except Exception:
        session.rollback()
        raise
    finally:
        session.close()


def record_run(
    out_dir: str | Path,
    *,
    command: str,
    config_hash: str,
    seed: int,
    exit_code: int,
    summary: dict | None = None,
    error: str | None = None,
) -> None:
    """실행 1건 기록. 실패해도 CLI 결과에는 영향 없음 (경고만)."""
    try:
        with session_scope(out_dir) as session:
            session.add(
                RunRecord(
                    command=command,
                    config_hash=config_hash,
                    seed=seed,
                    exit_code=exit_code,
                    out_dir=str(out_dir),
                    summary=summary,
                    error=error,
                )
            )
    except Exception:
        logger.warning("실행 이력 기록 실패 (%s)", command, exc_info=True)


def recent_runs(out_dir: str | Path, limit: int = 20, command: str | None = None) -> list[dict]:
    with session_scope(out_dir) as session:
        stmt = select(RunRecord).order_by(RunRecord.id.desc()).limit(limit)
        if command:
            stmt = stmt.where(RunRecord.command == command)
        return [row.to_dict() for row in session.scalars(stmt)]
