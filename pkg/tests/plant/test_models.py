from __future__ import annotations

import math
from dataclasses import replace

import numpy as np
import pytest

from src.errors import ActuationLimitError, ValidationError
from src.lti.analysis import poles
from src.plant.design import (
    DESIGN_PRESETS,
    ESTIMATED_OMEGA_N,
    ActuatorDesign,
    PumpConfig,
    mass_from_weight,
    moment_of_inertia_from_frequency,
)
from src.plant.models import (
    actuator_tf,
    calibrate_pressure_gain,
    damped_poles,
    full_system_tf,
    natural_frequency,
    open_loop_analysis,
    pump_pressure_rate,
    pump_tf,
    spring_constant,
    system_gain,
)
from src.lti.models import RationalTransferFunction


@pytest.mark.parametrize("name", ["design1", "design2", "design3", "design4"])
def test_table_presets_reproduce_estimated_frequency(name):
    omega = natural_frequency(DESIGN_PRESETS[name])
    assert f"{omega:.4g}" == f"{ESTIMATED_OMEGA_N[name]:.4g}"


def test_inertia_inversion_round_trip():
    M = mass_from_weight(0.17)
    inertia = moment_of_inertia_from_frequency(0.34e6, M, 0.94, 1.812)
    d = ActuatorDesign(youngs_modulus=0.34e6, moment_of_inertia=inertia, mass=M, length=0.94)
    assert natural_frequency(d) == pytest.approx(1.812, rel=1e-12)


def test_unit_parameters():
    d = ActuatorDesign(youngs_modulus=1.0, moment_of_inertia=0.5, mass=1.0, length=1.0)
    assert spring_constant(d) == pytest.approx(1.0)
    assert natural_frequency(d) == pytest.approx(1.0)
    pump = PumpConfig(screw_lead=2 * math.pi, syringe_area=1.0, actuator_capacity=1.0, motor_speed_max=10.0)
    assert pump.gain == pytest.approx(1.0)
    system = full_system_tf(d, pump)
    np.testing.assert_allclose(system.num, [1.0])
    np.testing.assert_allclose(system.den, [1.0, 2 * 0.6, 1.0, 0.0])
    assert system_gain(d, pump) == pytest.approx(1.0)


def test_actuator_and_pump_tf(design1, pump):
    spa = actuator_tf(design1)
    wn = natural_frequency(design1)
    np.testing.assert_allclose(spa.den, [1.0, 2 * 0.6 * wn, wn ** 2])
    assert spa.num[0] == pytest.approx(1.0 / design1.mass)
    pcs = pump_tf(pump)
    assert pcs.denominator == (1.0, 0.0)
    assert pcs.numerator[0] == pytest.approx(0.002 * 4.9e-4 / (2 * math.pi * 1e-8))


@pytest.mark.parametrize(
    "kwargs",
    [
        {"damping_ratio": 1.0},
        {"damping_ratio": 0.0},
        {"damping_ratio": 0.05, "damping_perturbation": 0.1},
        {"damping_perturbation": -0.1},
        {"mass": -1.0},
        {"length": 0.0},
        {"pressure_to_force_gain": 0.0},
    ],
)
def test_design_validation(kwargs):
    base = {"youngs_modulus": 1.0, "moment_of_inertia": 0.5, "mass": 1.0, "length": 1.0}
    with pytest.raises(ValidationError):
        ActuatorDesign(**(base | kwargs))


def test_pump_validation():
    with pytest.raises(ValidationError):
        PumpConfig(screw_lead=0.0, syringe_area=1.0, actuator_capacity=1.0, motor_speed_max=1.0)


def test_open_loop_pole_structure_random_designs():
    rng = np.random.default_rng(7)
    pump = PumpConfig(screw_lead=0.002, syringe_area=4.9e-4, actuator_capacity=1e-8, motor_speed_max=100.0)
    for _ in range(100):
        zeta = rng.uniform(0.05, 0.95)
        wn = 10 ** rng.uniform(-0.5, 1.3)
        M = rng.uniform(0.001, 0.05)
        E = 10 ** rng.uniform(5, 7)
        L = rng.uniform(0.03, 1.0)
        d = ActuatorDesign(
            youngs_modulus=E,
            moment_of_inertia=moment_of_inertia_from_frequency(E, M, L, wn),
            mass=M,
            length=L,
            damping_ratio=zeta,
            damping_perturbation=0.0,
        )
        pole_list = poles(full_system_tf(d, pump))
        at_origin = [p for p in pole_list if abs(p.real) < 1e-9 and abs(p.imag) < 1e-9]
        assert len(at_origin) == 1
        pair = [p for p in pole_list if abs(p.imag) > 1e-9]
        assert len(pair) == 2
        for p in pair:
            assert p.real == pytest.approx(-zeta * natural_frequency(d), abs=1e-9)


def test_open_loop_verdicts(design1, pump):
    assert open_loop_analysis(full_system_tf(design1, pump))["verdict"] == "marginally stable"
    assert open_loop_analysis(actuator_tf(design1))["verdict"] == "stable"
    assert open_loop_analysis(RationalTransferFunction((1.0,), (1.0, 0.0, 0.0)))["verdict"] == "unstable"
    assert open_loop_analysis(RationalTransferFunction((1.0,), (1.0, -1.0)))["verdict"] == "unstable"


def test_damped_pole_sensitivity(design1):
    wn = natural_frequency(design1)
    dp = damped_poles(design1)
    assert dp.nominal.real == pytest.approx(-0.6 * wn)
    assert dp.nominal.imag == pytest.approx(0.8 * wn)
    assert dp.real_spread == pytest.approx(0.1 * wn)
    assert dp.imag_spread == pytest.approx(wn * (math.sqrt(0.75) - math.sqrt(0.51)) / 2)


def test_calibrate_pressure_gain(design1):
    P = np.linspace(1e3, 2e4, 8)
    theta = 2.5 * P / (design1.mass * natural_frequency(design1) ** 2)
    assert calibrate_pressure_gain(P, theta, design1) == pytest.approx(2.5)


def test_pump_speed_limit(pump):
    assert pump_pressure_rate(pump, 50.0) == pytest.approx(pump.gain * 50.0)
    with pytest.raises(ActuationLimitError):
        pump_pressure_rate(pump, 150.0)


def test_frequency_consistent_with_spring_constant_random_designs():
    rng = np.random.default_rng(11)
    for _ in range(100):
        d = ActuatorDesign(
            youngs_modulus=10 ** rng.uniform(5, 7),
            moment_of_inertia=10 ** rng.uniform(-11, -7),
            mass=rng.uniform(0.001, 0.05),
            length=rng.uniform(0.03, 1.0),
        )
        wn = natural_frequency(d)
        assert wn ** 2 * d.mass == pytest.approx(spring_constant(d), rel=1e-12)
        assert natural_frequency(replace(d, youngs_modulus=4 * d.youngs_modulus)) == pytest.approx(2 * wn)
        assert natural_frequency(replace(d, moment_of_inertia=1.5 * d.moment_of_inertia)) > wn
        assert natural_frequency(replace(d, mass=1.5 * d.mass)) < wn
        assert natural_frequency(replace(d, length=1.5 * d.length)) < wn
