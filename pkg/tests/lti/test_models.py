from __future__ import annotations

import math

import numpy as np
import pytest

from src.errors import InvalidModelError
from src.lti.models import FrequencyResponsePoint, RationalTransferFunction, StateSpaceModel


def test_denominator_normalized_monic():
    tf = RationalTransferFunction((2.0, 4.0), (2.0, 2.0))
    assert tf.numerator == (1.0, 2.0)
    assert tf.denominator == (1.0, 1.0)


def test_leading_zeros_trimmed():
    tf = RationalTransferFunction((0.0, 0.0, 1.0), (0.0, 1.0, 1.0))
    assert tf.numerator == (1.0,)
    assert tf.denominator == (1.0, 1.0)
    assert tf.order == 1
    assert tf.is_strictly_proper


def test_zero_denominator_rejected():
    with pytest.raises(InvalidModelError):
        RationalTransferFunction((1.0,), (0.0, 0.0))


def test_non_finite_coefficients_rejected():
    with pytest.raises(InvalidModelError):
        RationalTransferFunction((math.nan,), (1.0, 1.0))


def test_zero_numerator_is_zero():
    tf = RationalTransferFunction((0.0,), (1.0, 3.0))
    assert tf.is_zero
    assert tf.numerator_degree == -1
    assert tf.dc_gain() == 0.0


def test_unity_feedback_of_integrator():
    closed = RationalTransferFunction((1.0,), (1.0, 0.0)).feedback()
    assert closed.numerator == (1.0,)
    assert closed.denominator == (1.0, 1.0)


def test_series_and_scalar_product():
    a = RationalTransferFunction((1.0,), (1.0, 1.0))
    b = RationalTransferFunction((3.0,), (1.0, 2.0))
    prod = a.series(b)
    np.testing.assert_allclose(prod.den, [1.0, 3.0, 2.0])
    np.testing.assert_allclose(prod.num, [3.0])
    assert (2.0 * a).numerator == (2.0,)


def test_sum_of_transfer_functions():
    a = RationalTransferFunction((1.0,), (1.0, 1.0))
    total = a + RationalTransferFunction.constant(1.0)
    np.testing.assert_allclose(total.num, [1.0, 2.0])
    np.testing.assert_allclose(total.den, [1.0, 1.0])


def test_dc_gain():
    assert RationalTransferFunction((3.0,), (1.0, 2.0)).dc_gain() == pytest.approx(1.5)
    assert math.isinf(RationalTransferFunction((1.0,), (1.0, 0.0)).dc_gain())


def test_state_space_shapes():
    sys = StateSpaceModel([[0.0, 1.0], [-2.0, -3.0]], [0.0, 1.0], [1.0, 0.0], 0.0)
    assert sys.n_states == 2
    assert sys.is_siso
    assert sys.B.shape == (2, 1)
    assert sys.C.shape == (1, 2)
    assert sys.D.shape == (1, 1)
    assert not sys.A.flags.writeable


def test_state_space_dimension_mismatch():
    with pytest.raises(InvalidModelError):
        StateSpaceModel([[0.0, 1.0], [-2.0, -3.0]], [0.0, 1.0, 2.0], [1.0, 0.0], 0.0)
    with pytest.raises(InvalidModelError):
        StateSpaceModel(np.zeros((2, 3)), [0.0, 1.0], [1.0, 0.0], 0.0)


def test_frequency_point_validation():
    point = FrequencyResponsePoint(1.0, 2.0, math.pi / 2)
    assert point.complex_value == pytest.approx(2j)
    with pytest.raises(InvalidModelError):
        FrequencyResponsePoint(0.0, 1.0, 0.0)
    with pytest.raises(InvalidModelError):
        FrequencyResponsePoint(1.0, -1.0, 0.0)
