from __future__ import annotations

import math

import pytest

from src.control.lqr import LqrWeights
from src.errors import ValidationError
from src.sim.engine import ReferenceSignal
from src.sim.gripper import OMEGA_ERROR_SPAN, gripper_sync_study

REF = ReferenceSignal("step", math.pi / 2, horizon=6.0)
STRONG = LqrWeights(p=1e6, velocity_weight=0.1)


def test_identical_fingers_stay_in_sync(design1, pump):
    study = gripper_sync_study(design1, pump, 0.0, REF, seed=3, weights=STRONG, dt=2e-3)
    assert study.open_loop_mismatch == 0.0
    assert study.closed_loop_mismatch == 0.0
    assert abs(study.omega_error) <= OMEGA_ERROR_SPAN


def test_spread_sign_is_symmetric(design1, pump):
    plus = gripper_sync_study(design1, pump, 0.05, REF, seed=1, weights=STRONG, dt=2e-3)
    minus = gripper_sync_study(design1, pump, -0.05, REF, seed=1, weights=STRONG, dt=2e-3)
    assert plus.open_loop_mismatch == pytest.approx(minus.open_loop_mismatch, rel=1e-12)
    assert plus.closed_loop_mismatch == pytest.approx(minus.closed_loop_mismatch, rel=1e-12)
    assert plus.finger_zetas == minus.finger_zetas[::-1]


def test_feedback_reduces_mismatch(design1, pump):
    for seed in range(20):
        study = gripper_sync_study(design1, pump, 0.1, REF, seed=seed, weights=STRONG, dt=2e-3)
        assert study.closed_loop_mismatch < study.open_loop_mismatch


def test_spread_beyond_perturbation_rejected(design1, pump):
    with pytest.raises(ValidationError):
        gripper_sync_study(design1, pump, 0.2, REF)
