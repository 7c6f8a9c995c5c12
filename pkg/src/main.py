"""SPA 툴킷 CLI 진입점 — `python -m src.main <command> [flags]`.

명령:
  model | synth-traces | fit-zeta | sysid | weight | lqr | simulate | robust | gripper | history

실행 순서:
1. 로깅 설정
2. 설정 JSON 로드 + 검증 (history 제외)
3. 명령 실행 → 산출물 + manifest_<command>.json
4. 실행 이력(runs.db) 기록
5. 예외 → 종료 코드 (2 검증, 3 수치, 4 의존성)
"""

from __future__ import annotations

import argparse
import logging
import sys
from collections.abc import Sequence
from pathlib import Path

from src.cli.commands import COMMANDS, RunContext
from src.cli.formatter import FORMATTERS, format_history
from src.cli.manifest import write_manifest
from src.cli.schema import load_config, parse_angle, resolve_path
from src.config import SPA_LOG_LEVEL, SPA_OUT_DIR, SPA_SEED
from src.db.session import record_run, recent_runs
from src.errors import SpaToolkitError

logger = logging.getLogger(__name__)


def _angle_arg(value: str) -> float:
    try:
        return parse_angle(value)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="프로젝트 설정 JSON")
    common.add_argument("--out", type=Path, help="산출물 디렉터리 (기본: 설정의 paths.out_dir)")
    common.add_argument("--seed", type=int, default=SPA_SEED)
    common.add_argument("--strict", action="store_true", help="경계 피팅 경고를 실패로 취급")

    parser = argparse.ArgumentParser(prog="spa", description="소프트 공압 액추에이터 모델링/제어 툴킷")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        cmd = sub.add_parser(name, parents=[common])
        if name == "simulate":
            cmd.add_argument("--ref", choices=("step", "square"), default="step")
            cmd.add_argument("--amplitude", type=_angle_arg, help="rad 또는 '90deg'")
    hist = sub.add_parser("history", parents=[common])
    hist.add_argument("--limit", type=int, default=20)
    return parser


def _history(args: argparse.Namespace) -> int:
    out_dir = args.out or Path(SPA_OUT_DIR)
    print(format_history(recent_runs(out_dir, limit=args.limit)))
    return 0


def main(argv: Sequence[str] | None = None) -> int:
    logging.basicConfig(
        level=getattr(logging, SPA_LOG_LEVEL.upper(), logging.INFO),
        format="%(asctime)s [%(levelname)s] %(name)s: %(message)s",
    )
    args = build_parser().parse_args(argv)
    if args.command == "history":
        return _history(args)

    if args.config is None:
        logger.error("--config 가 필요합니다")
        return 2

    config_hash = "invalid"
    out_dir = args.out or Path(SPA_OUT_DIR)
    try:
        config = load_config(args.config)
        config_hash = config.config_hash()
        out_dir = args.out or resolve_path(config.paths.out_dir, args.config)
        ctx = RunContext(
            config=config,
            out_dir=out_dir,
            seed=args.seed,
            strict=args.strict,
            config_path=args.config,
            ref=getattr(args, "ref", "step"),
            amplitude=getattr(args, "amplitude", None),
        )
        outcome = COMMANDS[args.command](ctx)
        write_manifest(
            out_dir,
            args.command,
            config_hash=config_hash,
            seed=args.seed,
            inputs=[args.config, *outcome.inputs],
            outputs=outcome.outputs,
        )
    except SpaToolkitError as e:
        logger.error("%s 실패 (exit %d): %s", args.command, e.exit_code, e)
        record_run(
            out_dir, command=args.command, config_hash=config_hash, seed=args.seed,
            exit_code=e.exit_code, error=str(e),
        )
        return e.exit_code

    print(FORMATTERS[args.command](outcome.report))
    record_run(
        out_dir, command=args.command, config_hash=config_hash, seed=args.seed,
        exit_code=0, summary={"outputs": [p.name for p in outcome.outputs]},
    )
    logger.info("%s 완료 → %s", args.command, out_dir)
    return 0


if __name__ == "__main__":
    sys.exit(main())
