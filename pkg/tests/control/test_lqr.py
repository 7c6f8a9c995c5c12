from __future__ import annotations

import math

import numpy as np
import pytest

from src.control.lqr import (
    LqrSolution,
    LqrWeights,
    loop_controller,
    lqr_gain,
    lyapunov_certificate,
    tune_state_penalty,
    velocity_weight_floor,
)
from src.errors import SynthesisInfeasibleError, UnsupportedModelError, ValidationError
from src.lti.analysis import ss_to_tf, to_controllable_canonical
from src.lti.models import StateSpaceModel
from src.plant.models import full_system_tf
from src.sim.engine import ReferenceSignal, simulate, square_wave_response

WEIGHTS = LqrWeights(p=1e4, velocity_weight=0.01)


def test_weights_structure():
    Q = WEIGHTS.state_weight(3)
    np.testing.assert_allclose(Q, np.diag([1e4, 100.0, 0.0]))
    with pytest.raises(ValidationError):
        LqrWeights(p=0.0)
    with pytest.raises(ValidationError):
        LqrWeights(Q=np.array([[1.0, 2.0], [0.0, 1.0]]))
    with pytest.raises(ValidationError):
        LqrWeights(Q=-np.eye(2))


def test_gain_certificate_and_unit_dc(plant1):
    sol = lqr_gain(plant1, WEIGHTS)
    assert sol.K_gain.shape == (1, 3)
    assert np.all(sol.closed_loop_poles().real < 0)
    cert = lyapunov_certificate(sol)
    assert cert.valid
    assert cert.min_eig_y > 0
    closed = ss_to_tf(sol.closed_loop)
    assert closed.dc_gain() == pytest.approx(1.0, rel=1e-6)


def test_certificate_negative_cases(plant1):
    sol = lqr_gain(plant1, WEIGHTS)
    flipped = LqrSolution(-sol.Y, sol.K_gain, sol.closed_loop, sol.reference_gain, sol.plant)
    assert not lyapunov_certificate(flipped).v_positive

    unstable = StateSpaceModel(np.diag([1.0, -1.0]), [[0.0], [1.0]], [[1.0, 0.0]], [[0.0]])
    bogus = LqrSolution(np.eye(2), np.zeros((1, 2)), unstable)
    cert = lyapunov_certificate(bogus)
    assert cert.v_positive
    assert not cert.vdot_negative
    assert not cert.valid


def test_slow_pole_approaches_velocity_limit(plant1):
    sol = lqr_gain(plant1, LqrWeights(p=1e8, velocity_weight=0.01))
    slowest = float(np.max(sol.closed_loop_poles().real))
    assert slowest == pytest.approx(-10.0, rel=0.02)


def test_loop_controller_matches_state_feedback(design1, pump, plant1):
    sol = lqr_gain(plant1, WEIGHTS)
    controller = loop_controller(sol)
    plant_tf = full_system_tf(design1, pump)
    K = sol.K_gain[0]
    for s in (0.5j, 2.0j, 1.0 + 1.0j):
        state_loop = K @ np.linalg.solve(s * np.eye(3) - plant1.A, plant1.B[:, 0])
        assert complex(plant_tf.evaluate(s) * controller.evaluate(s)) == pytest.approx(complex(state_loop), rel=1e-6)


def test_loop_controller_needs_canonical_plant():
    plant = StateSpaceModel(np.diag([-1.0, -2.0]), [[1.0], [1.0]], [[1.0, 1.0]], [[0.0]])
    sol = lqr_gain(plant, LqrWeights(p=1.0))
    with pytest.raises(UnsupportedModelError):
        loop_controller(sol)


def test_unstabilizable_plant_rejected():
    plant = StateSpaceModel(np.diag([1.0, -1.0]), [[0.0], [1.0]], [[1.0, 1.0]], [[0.0]])
    with pytest.raises(SynthesisInfeasibleError):
        lqr_gain(plant, LqrWeights(p=1.0))


def test_velocity_weight_floor():
    q2 = velocity_weight_floor(0.8)
    assert math.log(50.0) * math.sqrt(q2) == pytest.approx(0.8)


# ------------------------------------------------------------------
# 튜닝
# ------------------------------------------------------------------


def _tuned(plant, target, window):
    tuning = tune_state_penalty(plant, target, window, WEIGHTS)
    return tuning, lqr_gain(plant, LqrWeights(p=tuning.p, velocity_weight=0.01))


def test_tuning_design1_meets_window(plant1):
    tuning, sol = _tuned(plant1, 0.8, (0.5, 1.2))
    assert 0.5 <= tuning.settling_time <= 1.2
    ref = ReferenceSignal("step", math.pi / 2, horizon=8.0)
    result = simulate(plant1, ref, 1e-3, feedback=sol.feedback)
    m = result.metrics
    assert 0.5 <= m["settling_time_s"] <= 1.2
    assert m["steady_state_error_rad"] < math.radians(1.0)


def test_tuning_design4_faster_than_design1(plant1, plant4):
    tuning4, sol4 = _tuned(plant4, 0.5, (0.3, 0.8))
    assert 0.3 <= tuning4.settling_time <= 0.8
    _, sol1 = _tuned(plant1, 0.8, (0.5, 1.2))
    run1 = square_wave_response(plant1, sol1.feedback, math.pi / 2, period=4.0, horizon=8.0)
    run4 = square_wave_response(plant4, sol4.feedback, math.pi / 2, period=4.0, horizon=8.0)
    assert run4.metrics["mean_edge_delay_s"] < run1.metrics["mean_edge_delay_s"]


def test_tuning_infeasible_velocity_weight(plant1):
    with pytest.raises(SynthesisInfeasibleError):
        tune_state_penalty(plant1, 0.8, (0.5, 1.2), LqrWeights(velocity_weight=1.0))


def test_tuning_window_must_contain_target(plant1):
    with pytest.raises(ValidationError):
        tune_state_penalty(plant1, 2.0, (0.5, 1.2))


@pytest.mark.parametrize("scale", [1e-3, 7.0, 1e3])
def test_gain_unchanged_when_q_and_r_scaled_together(plant1, scale):
    base = lqr_gain(plant1, LqrWeights(p=1e3, R=2.0, velocity_weight=0.01))
    scaled = lqr_gain(plant1, LqrWeights(p=1e3 * scale, R=2.0 * scale, velocity_weight=0.01))
    np.testing.assert_allclose(scaled.K_gain, base.K_gain, rtol=1e-8)


def test_closed_loop_hurwitz_across_penalty_sweep(plant1):
    for p in np.logspace(-2, 4, 13):
        sol = lqr_gain(plant1, LqrWeights(p=float(p), velocity_weight=0.01))
        assert np.all(sol.closed_loop_poles().real < 0), p
