"""CLI 명령 구현 — 설정 + 상류 산출물 → 결정적 산출물 파일.

산출물 의존 관계:
  synth-traces → traces_dir (step_*.csv → fit-zeta, prbs_*.csv → sysid)
  sysid → sysid.json → weight → weight.json ┐
  lqr → lqr.json ─────────────────────────────┼→ robust
          ├→ simulate                          │
          └→ gripper                           ┘
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from src.cli.manifest import write_json
from src.cli.schema import ProjectConfig, resolve_path
from src.control.lqr import (
    LqrSolution,
    LqrWeights,
    loop_controller,
    lqr_gain,
    lyapunov_certificate,
    tune_state_penalty,
)
from src.errors import BoundaryFitError, DependencyError, ValidationError
from src.lti.analysis import to_controllable_canonical
from src.lti.models import RationalTransferFunction, StateSpaceModel
from src.plant.models import (
    actuator_tf,
    damped_poles,
    full_system_tf,
    natural_frequency,
    open_loop_analysis,
    pump_tf,
    spring_constant,
)
from src.robust.small_gain import robust_stability_check, sample_family_verify
from src.robust.weight import build_uncertain_plant, envelope_table
from src.sim.engine import ReferenceSignal, simulate, write_sim_csv
from src.sim.gripper import gripper_sync_study
from src.sysid.damping import fit_damping_ratio
from src.sysid.subspace import identify_family
from src.sysid.trace import (
    ExperimentTrace,
    load_trace_csv,
    prbs_input,
    synthesize_step_traces,
    synthesize_trace,
    write_trace_csv,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True, slots=True)
class RunContext:
    config: ProjectConfig
    out_dir: Path
    seed: int = 0
    strict: bool = False
    config_path: Path | None = None
    ref: str = "step"
    amplitude: float | None = None


@dataclass(slots=True)
class CommandOutcome:
    report: dict[str, Any]
    inputs: list[Path] = field(default_factory=list)
    outputs: list[Path] = field(default_factory=list)


# ------------------------------------------------------------------
# 공통
# ------------------------------------------------------------------


def _require(ctx: RunContext, artifact: str, producer: str) -> Path:
    path = ctx.out_dir / artifact
    if not path.is_file():
        raise DependencyError(artifact, producer)
    return path


def _read(path: Path) -> dict[str, Any]:
    return json.loads(path.read_text(encoding="utf-8"))


def _traces_dir(ctx: RunContext) -> Path:
    raw = ctx.config.paths.traces_dir
    if raw is None:
        raise ValidationError("paths.traces_dir 가 설정되지 않았습니다")
    return resolve_path(raw, ctx.config_path)


def _load_traces(ctx: RunContext, pattern: str) -> tuple[list[ExperimentTrace], list[Path]]:
    directory = _traces_dir(ctx)
    files = sorted(directory.glob(pattern)) if directory.is_dir() else []
    if not files:
        raise ValidationError(f"trace 가 없습니다: {directory / pattern} (synth-traces 로 생성 가능)")
    return [load_trace_csv(f) for f in files], files


def _plant(cfg: ProjectConfig) -> tuple[RationalTransferFunction, StateSpaceModel]:
    system = full_system_tf(cfg.actuator.to_design(), cfg.pump.to_pump())
    return system, to_controllable_canonical(system)


def _load_solution(path: Path) -> tuple[LqrSolution, LqrWeights]:
    data = _read(path)
    sol_data = data["solution"]
    solution = LqrSolution(
        Y=np.array(sol_data["Y"]),
        K_gain=np.array([sol_data["K"]]),
        closed_loop=StateSpaceModel.from_dict(sol_data["closed_loop"]),
        reference_gain=float(sol_data["reference_gain"]),
        plant=StateSpaceModel.from_dict(sol_data["plant"]),
    )
    w = data["weights"]
    return solution, LqrWeights(p=w["p"], R=w["R"], velocity_weight=w["velocity_weight"])


# ------------------------------------------------------------------
# 명령
# ------------------------------------------------------------------


def cmd_model(ctx: RunContext) -> CommandOutcome:
    design = ctx.config.actuator.to_design()
    pump = ctx.config.pump.to_pump()
    system = full_system_tf(design, pump)
    report = {
        "design": design.to_dict(),
        "pump": pump.to_dict(),
        "spring_constant": spring_constant(design),
        "omega_n": natural_frequency(design),
        "actuator_tf": actuator_tf(design).to_dict(),
        "pump_tf": pump_tf(pump).to_dict(),
        "system_tf": system.to_dict(),
        "open_loop": open_loop_analysis(system),
        "damped_poles": damped_poles(design).to_dict(),
    }
    out = write_json(ctx.out_dir / "model.json", report)
    return CommandOutcome(report, outputs=[out])


def cmd_synth(ctx: RunContext) -> CommandOutcome:
    """ζ ± Δζ 구간의 합성 실험을 traces_dir 에 쓴다.

    step 실험은 fit-zeta 용, PRBS 실험은 sysid 용. 파일 이름은 paths 의 패턴과 맞춘다.
    """
    cfg = ctx.config
    synth = cfg.synth
    design = cfg.actuator.to_design()
    lo = design.damping_ratio - design.damping_perturbation
    hi = design.damping_ratio + design.damping_perturbation
    if hi >= 1.0:
        raise ValidationError(f"ζ + Δζ = {hi:.4g} — 과소감쇠 범위 (0, 1) 를 벗어납니다")
    zetas = [design.damping_ratio] if synth.traces == 1 else np.linspace(lo, hi, synth.traces).tolist()
    directory = _traces_dir(ctx)
    omega_n = natural_frequency(design)
    amplitude = cfg.sysid.step_amplitude
    static_gain = actuator_tf(design).dc_gain()

    outputs: list[Path] = []
    steps = synthesize_step_traces(
        zetas,
        omega_n,
        amplitude,
        static_gain=static_gain,
        horizon=synth.step_horizon,
        noise_std=synth.noise_fraction * abs(static_gain * amplitude),
        seed=ctx.seed,
    )
    for k, trace in enumerate(steps, start=1):
        outputs.append(write_trace_csv(directory / f"step_{k}.csv", trace))

    for k, zeta in enumerate(zetas, start=1):
        model = to_controllable_canonical(actuator_tf(design.with_damping(zeta)))
        u = prbs_input(synth.prbs_samples, hold=synth.prbs_hold, seed=ctx.seed + k)
        trace = synthesize_trace(model, u, sample_time=synth.prbs_sample_time, label=f"prbs_{k}")
        if synth.noise_fraction > 0:
            trace = synthesize_trace(
                model,
                u,
                sample_time=synth.prbs_sample_time,
                noise_std=synth.noise_fraction * float(np.std(trace.output)),
                seed=ctx.seed + k,
                label=f"prbs_{k}",
            )
        outputs.append(write_trace_csv(directory / f"prbs_{k}.csv", trace))

    logger.info("합성 trace %d개 → %s", len(outputs), directory)
    report = {
        "traces_dir": directory.as_posix(),
        "zetas": zetas,
        "omega_n": omega_n,
        "noise_fraction": synth.noise_fraction,
        "files": [p.name for p in outputs],
    }
    out = write_json(ctx.out_dir / "traces.json", report)
    return CommandOutcome(report, outputs=[*outputs, out])


def cmd_fit(ctx: RunContext) -> CommandOutcome:
    traces, files = _load_traces(ctx, ctx.config.paths.step_pattern)
    design = ctx.config.actuator.to_design()
    estimate = fit_damping_ratio(traces, natural_frequency(design), ctx.config.sysid.step_amplitude)
    report = estimate.to_dict() | {"traces": [f.name for f in files]}
    out = write_json(ctx.out_dir / "damping.json", report)
    if ctx.strict and estimate.boundary_hit:
        raise BoundaryFitError("; ".join(estimate.warnings))
    return CommandOutcome(report, inputs=files, outputs=[out])


def cmd_sysid(ctx: RunContext) -> CommandOutcome:
    traces, files = _load_traces(ctx, ctx.config.paths.ident_pattern)
    spec = ctx.config.sysid
    models = identify_family(traces, spec.order, spec.hankel_rows)
    report = {
        "hankel_rows": spec.hankel_rows,
        "models": [
            {"label": t.label} | m.to_dict() for t, m in zip(traces, models)
        ],
    }
    out = write_json(ctx.out_dir / "sysid.json", report)
    return CommandOutcome(report, inputs=files, outputs=[out])


def cmd_weight(ctx: RunContext) -> CommandOutcome:
    """공칭 = 해석적 T_SPA, 정적 게인만 식별 모델군 중앙값에 맞춤."""
    src = _require(ctx, "sysid.json", "sysid")
    family = [StateSpaceModel.from_dict(m["continuous"]) for m in _read(src)["models"]]
    design = ctx.config.actuator.to_design()
    analytic = actuator_tf(design)
    dc_family = [
        float((m.C @ np.linalg.solve(-m.A, m.B) + m.D).item()) for m in family
    ]
    gain_scale = float(np.median(dc_family)) / analytic.dc_gain()
    if not np.isfinite(gain_scale) or gain_scale == 0.0:
        raise ValidationError(f"식별 모델군의 정적 게인이 유효하지 않습니다: {dc_family}")
    nominal = analytic.scale(gain_scale)
    plant = build_uncertain_plant(
        nominal, family, order=ctx.config.sysid.weight_order, omega_n=natural_frequency(design),
    )
    report = plant.to_dict() | {"gain_scale": gain_scale}
    out_json = write_json(ctx.out_dir / "weight.json", report)
    out_csv = ctx.out_dir / "envelope.csv"
    lines = ["omega_rad_s,envelope,weight_mag"]
    lines += [",".join(repr(v) for v in row) for row in envelope_table(plant)]
    out_csv.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return CommandOutcome(report, inputs=[src], outputs=[out_json, out_csv])


def cmd_lqr(ctx: RunContext) -> CommandOutcome:
    spec = ctx.config.lqr
    system, plant = _plant(ctx.config)
    tuning = None
    weights = spec.to_weights()
    if spec.tune:
        tuning = tune_state_penalty(
            plant, spec.target_settling_s, spec.settling_window_s, weights, band=spec.settling_band,
        )
        weights = spec.to_weights(p=tuning.p)
    solution = lqr_gain(plant, weights)
    cert = lyapunov_certificate(solution)
    report = {
        "system_tf": system.to_dict(),
        "weights": weights.to_dict(),
        "solution": solution.to_dict(),
        "certificate": cert.to_dict(),
        "tuning": None if tuning is None else tuning.to_dict(),
    }
    out = write_json(ctx.out_dir / "lqr.json", report)
    return CommandOutcome(report, outputs=[out])


def cmd_simulate(ctx: RunContext) -> CommandOutcome:
    src = _require(ctx, "lqr.json", "lqr")
    solution, _ = _load_solution(src)
    sim = ctx.config.sim
    pump = ctx.config.pump.to_pump()
    if ctx.ref not in ("step", "square"):
        raise ValidationError(f"--ref 는 step 또는 square: {ctx.ref}")
    amplitude = sim.amplitude if ctx.amplitude is None else ctx.amplitude
    ref = ReferenceSignal(ctx.ref, amplitude, horizon=sim.horizon, period=sim.square_period)
    result = simulate(
        solution.plant,
        ref,
        sim.dt,
        pump.motor_speed_max if sim.saturate else None,
        feedback=solution.feedback,
        command_scale=pump.motor_speed_max,
        band=ctx.config.lqr.settling_band,
    )
    out_csv = write_sim_csv(ctx.out_dir / f"sim_{ctx.ref}.csv", result)
    report = {
        "reference": {"kind": ref.kind, "amplitude": ref.amplitude, "period": ref.period, "horizon": ref.horizon},
        "dt": sim.dt,
        "metrics": result.metrics,
    }
    out_json = write_json(ctx.out_dir / f"sim_{ctx.ref}.json", report)
    return CommandOutcome(report, inputs=[src], outputs=[out_csv, out_json])


def cmd_robust(ctx: RunContext) -> CommandOutcome:
    weight_src = _require(ctx, "weight.json", "weight")
    lqr_src = _require(ctx, "lqr.json", "lqr")
    weight = RationalTransferFunction.from_dict(_read(weight_src)["weight"])
    solution, _ = _load_solution(lqr_src)
    system, _ = _plant(ctx.config)
    controller = loop_controller(solution)
    check = robust_stability_check(system, weight, controller)
    samples = ctx.config.robust.samples
    verified = (
        sample_family_verify(system, weight, controller, samples, seed=ctx.seed) if check.passed else None
    )
    report = check.to_dict() | {
        "controller": controller.to_dict(),
        "samples": samples,
        "sample_verified": verified,
    }
    out = write_json(ctx.out_dir / "robust.json", report)
    return CommandOutcome(report, inputs=[weight_src, lqr_src], outputs=[out])


def cmd_gripper(ctx: RunContext) -> CommandOutcome:
    src = _require(ctx, "lqr.json", "lqr")
    _, weights = _load_solution(src)
    cfg = ctx.config
    ref = ReferenceSignal("step", cfg.gripper.amplitude, horizon=cfg.sim.horizon)
    study = gripper_sync_study(
        cfg.actuator.to_design(),
        cfg.pump.to_pump(),
        cfg.gripper.zeta_spread,
        ref,
        seed=ctx.seed,
        weights=weights,
        dt=cfg.sim.dt,
    )
    report = study.to_dict() | {"zeta_spread": cfg.gripper.zeta_spread, "seed": ctx.seed}
    out = write_json(ctx.out_dir / "gripper.json", report)
    return CommandOutcome(report, inputs=[src], outputs=[out])


COMMANDS = {
    "model": cmd_model,
    "synth-traces": cmd_synth,
    "fit-zeta": cmd_fit,
    "sysid": cmd_sysid,
    "weight": cmd_weight,
    "lqr": cmd_lqr,
    "simulate": cmd_simulate,
    "robust": cmd_robust,
    "gripper": cmd_gripper,
}
