from __future__ import annotations

import math

import numpy as np
import pytest

from src.errors import InfiniteNormError, PoleOnGridError, UnsupportedModelError
from src.lti.analysis import (
    evaluate_response,
    frequency_response,
    hinf_norm,
    is_hurwitz,
    is_stable,
    poles,
    ss_to_tf,
    step_response_exact,
    to_controllable_canonical,
)
from src.lti.models import RationalTransferFunction, StateSpaceModel


def test_poles_of_second_order():
    tf = RationalTransferFunction((1.0,), (1.0, 3.0, 2.0))
    assert sorted(p.real for p in poles(tf)) == pytest.approx([-2.0, -1.0])
    assert is_stable(tf)


def test_hurwitz():
    assert is_hurwitz(np.array([[-1.0, 0.0], [0.0, -2.0]]))
    assert not is_hurwitz(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_controllable_canonical_realization():
    ss = to_controllable_canonical(RationalTransferFunction((2.0,), (1.0, 3.0, 2.0)))
    np.testing.assert_allclose(ss.A, [[0.0, 1.0], [-2.0, -3.0]])
    np.testing.assert_allclose(ss.B, [[0.0], [1.0]])
    np.testing.assert_allclose(ss.C, [[2.0, 0.0]])
    np.testing.assert_allclose(ss.D, [[0.0]])


def test_canonical_numerator_placement():
    tf = RationalTransferFunction((1.0, 5.0), (1.0, 2.0, 3.0, 4.0))
    ss = to_controllable_canonical(tf)
    np.testing.assert_allclose(ss.C, [[5.0, 1.0, 0.0]])
    back = ss_to_tf(ss)
    np.testing.assert_allclose(back.num, tf.num, atol=1e-12)
    np.testing.assert_allclose(back.den, tf.den, atol=1e-12)


def test_canonical_requires_strictly_proper():
    with pytest.raises(UnsupportedModelError):
        to_controllable_canonical(RationalTransferFunction((1.0, 1.0), (1.0, 2.0)))
    with pytest.raises(UnsupportedModelError):
        to_controllable_canonical(RationalTransferFunction((1.0, 0.0, 0.0), (1.0, 2.0)))


def test_evaluate_first_order():
    h = evaluate_response(RationalTransferFunction((1.0,), (1.0, 1.0)), [1.0])
    assert h[0] == pytest.approx(0.5 - 0.5j)


def test_evaluate_state_space_matches_tf():
    tf = RationalTransferFunction((2.0,), (1.0, 3.0, 2.0))
    w = np.logspace(-1, 1, 5)
    np.testing.assert_allclose(
        evaluate_response(to_controllable_canonical(tf), w), evaluate_response(tf, w), rtol=1e-12,
    )


def test_pole_on_grid_raises():
    with pytest.raises(PoleOnGridError) as exc:
        evaluate_response(RationalTransferFunction((1.0,), (1.0, 0.0, 1.0)), [0.5, 1.0, 2.0])
    assert exc.value.omega == pytest.approx(1.0)


def test_frequency_response_phase_continuous():
    tf = RationalTransferFunction((1.0,), (1.0, 0.6, 1.0, 0.0))
    pts = frequency_response(tf, np.logspace(-2, 2, 200))
    phases = np.array([p.phase for p in pts])
    assert np.max(np.abs(np.diff(phases))) < 0.5
    assert phases[-1] - phases[0] == pytest.approx(-math.pi, abs=0.05)


def test_hinf_first_order_is_dc_gain():
    assert hinf_norm(RationalTransferFunction((1.0,), (1.0, 1.0))) == pytest.approx(1.0, rel=1e-4)


def test_hinf_resonant_peak():
    zeta = 0.1
    tf = RationalTransferFunction((1.0,), (1.0, 2.0 * zeta, 1.0))
    expected = 1.0 / (2.0 * zeta * math.sqrt(1.0 - zeta ** 2))
    assert hinf_norm(tf) == pytest.approx(expected, rel=1e-4)


def test_hinf_special_cases():
    assert hinf_norm(RationalTransferFunction((0.0,), (1.0, 1.0))) == 0.0
    assert hinf_norm(RationalTransferFunction.constant(-3.0)) == pytest.approx(3.0)
    with pytest.raises(InfiniteNormError):
        hinf_norm(RationalTransferFunction((1.0, 0.0, 0.0), (1.0, 1.0)))
    with pytest.raises(InfiniteNormError):
        hinf_norm(RationalTransferFunction((1.0,), (1.0, -1.0)))


def test_hinf_biproper_high_frequency_limit():
    # (2s + 1)/(s + 1): 고주파에서 2
    tf = RationalTransferFunction((2.0, 1.0), (1.0, 1.0))
    assert hinf_norm(tf) == pytest.approx(2.0, rel=1e-6)


def test_step_response_exact_first_order():
    ss = StateSpaceModel([[-1.0]], [[1.0]], [[1.0]], [[0.0]])
    t = np.linspace(0.0, 5.0, 11)
    np.testing.assert_allclose(step_response_exact(ss, t), 1.0 - np.exp(-t), atol=1e-12)


# ------------------------------------------------------------------
# 무작위 성질
# ------------------------------------------------------------------


def _random_stable_tf(rng: np.random.Generator, order: int) -> RationalTransferFunction:
    roots: list[complex] = []
    while len(roots) < order:
        if order - len(roots) >= 2 and rng.random() < 0.5:
            re, im = -rng.uniform(0.1, 10.0), rng.uniform(0.1, 10.0)
            roots += [complex(re, im), complex(re, -im)]
        else:
            roots.append(complex(-rng.uniform(0.1, 10.0)))
    den = np.real(np.poly(roots))
    num = rng.normal(size=int(rng.integers(1, order + 1)))
    return RationalTransferFunction(num, den)


def test_canonical_round_trip_random():
    rng = np.random.default_rng(2024)
    w = np.logspace(-2, 2, 100)
    for _ in range(100):
        tf = _random_stable_tf(rng, int(rng.integers(1, 6)))
        expected = evaluate_response(tf, w)
        got = evaluate_response(to_controllable_canonical(tf), w)
        np.testing.assert_allclose(got, expected, rtol=1e-8)


def test_hinf_sign_and_gain_invariance():
    rng = np.random.default_rng(5)
    for _ in range(20):
        tf = _random_stable_tf(rng, int(rng.integers(1, 5)))
        base = hinf_norm(tf)
        gain = float(10 ** rng.uniform(-1, 1))
        assert hinf_norm(-tf) == pytest.approx(base, rel=1e-9)
        assert hinf_norm(tf.scale(gain)) == pytest.approx(gain * base, rel=1e-6)
