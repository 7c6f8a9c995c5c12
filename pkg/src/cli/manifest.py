"""실행 manifest — 명령, 설정 hash, seed, 입력/출력 파일 hash, 패키지 버전.

시각 정보는 넣지 않는다 (같은 설정 + seed → 같은 파일).
"""

from __future__ import annotations

import hashlib
import json
import logging
import math
import platform
from importlib import metadata
from pathlib import Path
from typing import Any

logger = logging.getLogger(__name__)

_TRACKED_PACKAGES = ("numpy", "scipy", "pydantic", "sqlalchemy")


def file_sha256(path: str | Path) -> str:
    digest = hashlib.sha256()
    with Path(path).open("rb") as fp:
        for chunk in iter(lambda: fp.read(1 << 16), b""):
            digest.update(chunk)
    return digest.hexdigest()


def package_versions() -> dict[str, str]:
    versions = {"python": platform.python_version()}
    for name in _TRACKED_PACKAGES:
        try:
            versions[name] = metadata.version(name)
        except metadata.PackageNotFoundError:
            versions[name] = "unknown"
    return versions


def _json_safe(value: Any) -> Any:
    """inf/nan → None (표준 JSON)."""
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, dict):
        return {str(k): _json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_safe(v) for v in value]
    return value


def write_json(path: str | Path, payload: Any) -> Path:
    """정렬된 키, 2칸 들여쓰기, LF 끝 — 바이트 단위 재현."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    text = json.dumps(_json_safe(payload), indent=2, sort_keys=True, ensure_ascii=False, allow_nan=False)
    path.write_text(text + "\n", encoding="utf-8")
    return path


def write_manifest(
    out_dir: str | Path,
    command: str,
    *,
    config_hash: str,
    seed: int,
    inputs: list[Path],
    outputs: list[Path],
) -> Path:
    out = Path(out_dir)

    def rel(p: Path) -> str:
        try:
            return p.resolve().relative_to(out.resolve()).as_posix()
        except ValueError:
            return p.name

    manifest = {
        "command": command,
        "config_hash": config_hash,
        "seed": seed,
        "inputs": {rel(p): file_sha256(p) for p in sorted(inputs)},
        "outputs": {rel(p): file_sha256(p) for p in sorted(outputs)},
        "versions": package_versions(),
    }
    path = write_json(out / f"manifest_{command}.json", manifest)
    logger.info("manifest 기록: %s (출력 %d개)", path.name, len(outputs))
    return path
