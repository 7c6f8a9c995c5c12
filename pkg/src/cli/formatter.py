"""터미널 요약 포매팅 — 명령별 리포트 dict → 사람이 읽는 텍스트."""

from __future__ import annotations

import math
from collections.abc import Sequence
from typing import Any


def num(value: float | None, digits: int = 4) -> str:
    """유효숫자 포맷. None/inf 는 '—'."""
    if value is None or (isinstance(value, float) and not math.isfinite(value)):
        return "—"
    return f"{value:.{digits}g}"


def poly(coeffs: Sequence[float]) -> str:
    """내림차순 계수 → 's^2 + 2.17s + 3.28' 형태."""
    n = len(coeffs) - 1
    terms = []
    for i, c in enumerate(coeffs):
        if c == 0:
            continue
        power = n - i
        mag = abs(c)
        coef = "" if (mag == 1 and power > 0) else num(mag)
        var = "" if power == 0 else ("s" if power == 1 else f"s^{power}")
        sign = "-" if c < 0 else "+"
        terms.append((sign, f"{coef}{var}"))
    if not terms:
        return "0"
    head_sign, head = terms[0]
    text = ("-" if head_sign == "-" else "") + head
    for sign, body in terms[1:]:
        text += f" {sign} {body}"
    return text


def tf(model: dict[str, Any]) -> str:
    return f"({poly(model['numerator'])}) / ({poly(model['denominator'])})"


def complex_list(items: Sequence[dict[str, float]]) -> str:
    return ", ".join(f"{num(p['real'])}{'+' if p['imag'] >= 0 else '-'}{num(abs(p['imag']))}j" for p in items)


def format_model(report: dict[str, Any]) -> str:
    lines = [
        f"🧩 설계: {report['design']['name']}",
        f"  · 스프링 상수 K = {num(report['spring_constant'])} N·m",
        f"  · 고유진동수 ωn = {num(report['omega_n'])} rad/s",
        f"  · T_SPA = {tf(report['actuator_tf'])}",
        f"  · T_PCS = {tf(report['pump_tf'])}",
        f"  · T_SYS = {tf(report['system_tf'])}",
        f"  · 개루프 극점: {complex_list(report['open_loop']['poles'])}",
        f"  · 판정: {report['open_loop']['verdict']}",
    ]
    return "\n".join(lines)


def format_synth(report: dict[str, Any]) -> str:
    zetas = report["zetas"]
    return "\n".join([
        f"🧪 합성 trace {len(report['files'])}개 → {report['traces_dir']}",
        f"  · ζ: {num(min(zetas))} … {num(max(zetas))} ({len(zetas)}단계), ωn = {num(report['omega_n'])} rad/s",
        f"  · 잡음 비율: {num(report['noise_fraction'])}",
    ])


def format_damping(report: dict[str, Any]) -> str:
    lines = [
        f"📉 감쇠비: ζ = {num(report['zeta_nominal'])} ± {num(report['zeta_delta'])}",
        f"  · trace별: {', '.join(num(z) for z in report['per_trace_zetas'])}",
        f"  · 잔차 RMS: {num(report['residual_rms'])} rad",
    ]
    for w in report.get("warnings", []):
        lines.append(f"  ⚠️ {w}")
    return "\n".join(lines)


def format_sysid(report: dict[str, Any]) -> str:
    lines = [f"🔍 식별 모델 {len(report['models'])}개"]
    for m in report["models"]:
        lines.append(f"  · {m['label']}: 차수 {m['order']}, fit {m['fit_percent']:.2f}%")
    return "\n".join(lines)


def format_weight(report: dict[str, Any]) -> str:
    return "\n".join([
        f"📐 W_T = {tf(report['weight'])}",
        f"  · envelope 최대: {num(max(report['envelope']))}",
    ])


def format_lqr(report: dict[str, Any]) -> str:
    cert = report["certificate"]
    lines = [
        f"🎛️ LQR: p = {num(report['weights']['p'])}, q2 = {num(report['weights']['velocity_weight'])}",
        f"  · K = [{', '.join(num(k) for k in report['solution']['K'])}]",
        f"  · N̄ = {num(report['solution']['reference_gain'])}",
        f"  · 폐루프 극점: {complex_list(report['solution']['closed_loop_poles'])}",
        f"  · Lyapunov: V≻0 {'✅' if cert['v_positive'] else '❌'}, V̇≺0 {'✅' if cert['vdot_negative'] else '❌'}",
    ]
    if report.get("tuning"):
        t = report["tuning"]
        lines.append(f"  · 튜닝: 정착 {num(t['settling_time_s'])} s ({t['iterations']}회)")
    return "\n".join(lines)


def format_sim(report: dict[str, Any]) -> str:
    m = report["metrics"]
    lines = [
        f"⏱️ 시뮬레이션 ({report['reference']['kind']}, {num(report['reference']['amplitude'])} rad)",
        f"  · 2% 정착 시간: {num(m['settling_time_s'])} s",
        f"  · 정상상태 오차: {num(m['steady_state_error_rad'])} rad",
        f"  · 오버슈트: {num(m['overshoot_percent'], 3)}%",
    ]
    if "mean_edge_delay_s" in m:
        lines.append(f"  · 평균 edge 지연: {num(m['mean_edge_delay_s'])} s")
    return "\n".join(lines)


def format_robust(report: dict[str, Any]) -> str:
    verdict = "PASS ✅" if report["pass"] else "FAIL ❌"
    lines = [f"🛡️ 강건 안정성: margin = {num(report['margin'])} → {verdict}"]
    if report.get("sample_verified") is not None:
        lines.append(f"  · 표본 {report['samples']}개 검증: {'모두 안정' if report['sample_verified'] else '불안정 표본 존재'}")
    return "\n".join(lines)


def format_gripper(report: dict[str, Any]) -> str:
    return "\n".join([
        f"🤏 그리퍼 동기화 (spread {num(report['zeta_spread'])})",
        f"  · 개루프 불일치: {num(report['open_loop_mismatch_rad'])} rad",
        f"  · 폐루프 불일치: {num(report['closed_loop_mismatch_rad'])} rad",
    ])


def format_history(rows: list[dict[str, Any]]) -> str:
    if not rows:
        return "기록된 실행이 없습니다"
    lines = ["📜 최근 실행"]
    for r in rows:
        lines.append(
            f"  #{r['id']} {r['command']:<9} exit={r['exit_code']} seed={r['seed']} "
            f"cfg={r['config_hash'][:10]} {r['created_at'] or ''}"
        )
    return "\n".join(lines)


FORMATTERS = {
    "model": format_model,
    "synth-traces": format_synth,
    "fit-zeta": format_damping,
    "sysid": format_sysid,
    "weight": format_weight,
    "lqr": format_lqr,
    "simulate": format_sim,
    "robust": format_robust,
    "gripper": format_gripper,
}
