from __future__ import annotations

import math

import numpy as np
import pytest

from src.errors import ValidationError
from src.sim.metrics import (
    NOT_SETTLED,
    edge_delays,
    overshoot_percent,
    plateau_errors,
    settling_time,
    steady_state_error,
)
from src.sysid.trace import step_response_second_order


def test_first_order_settling_is_ln50():
    t = np.linspace(0.0, 10.0, 10001)
    y = 1.0 - np.exp(-t)
    assert settling_time(t, y, 1.0) == pytest.approx(math.log(50.0), abs=1e-4)


def test_settling_edge_cases():
    t = np.linspace(0.0, 5.0, 51)
    assert settling_time(t, np.ones(51), 1.0) == 0.0
    assert settling_time(t, t, 2.0) == NOT_SETTLED
    assert settling_time(t, np.zeros(51), 0.0) == 0.0
    with pytest.raises(ValidationError):
        settling_time(t, np.ones(51), 1.0, band=1.5)
    with pytest.raises(ValidationError):
        settling_time(t, np.ones(51), 1.0, band=0.2)
    assert settling_time(t, np.ones(51), 1.0, band=0.1) == 0.0
    with pytest.raises(ValidationError):
        settling_time(t, np.ones(50), 1.0)


def test_second_order_overshoot():
    t = np.linspace(0.0, 10.0, 100001)
    y = step_response_second_order(t, 0.5, 1.0)
    expected = 100.0 * math.exp(-math.pi * 0.5 / math.sqrt(0.75))
    assert overshoot_percent(y, 1.0) == pytest.approx(expected, rel=1e-4)
    assert overshoot_percent(y, 1.0) == pytest.approx(16.303, abs=1e-3)


def test_overshoot_direction_and_zero_step():
    y = np.array([0.0, -0.5, -1.2, -1.0])
    assert overshoot_percent(y, -1.0) == pytest.approx(20.0)
    assert overshoot_percent(np.zeros(4), 0.0) == 0.0
    assert overshoot_percent(np.array([0.0, 0.5, 0.9]), 1.0) == 0.0


def test_steady_state_error_uses_tail():
    y = np.r_[np.zeros(90), np.full(10, 0.98)]
    assert steady_state_error(y, 1.0) == pytest.approx(0.02)


def test_edge_delay_and_plateaus():
    t = np.arange(0.0, 4.0, 1e-3)
    y = np.where(t < 2.0, 1.0 - np.exp(-5.0 * t), np.exp(-5.0 * (t - 2.0)) * (1.0 - np.exp(-10.0)))
    edges = [(0.0, 0.0, 1.0), (2.0, 1.0, 0.0)]
    delays = edge_delays(t, y, edges)
    np.testing.assert_allclose(delays, math.log(2.0) / 5.0, atol=2e-3)
    errors = plateau_errors(t, y, edges)
    assert len(errors) == 2
    assert max(errors) < 1e-3


def test_edge_never_crossed():
    t = np.linspace(0.0, 1.0, 11)
    assert edge_delays(t, np.zeros(11), [(0.0, 0.0, 1.0)]) == [NOT_SETTLED]
