from __future__ import annotations

import math

import numpy as np
import pytest
from scipy import linalg, signal

from src.control.lqr import care_residual, solve_care, solve_care_kleinman
from src.errors import HamiltonianBoundaryError, SynthesisInfeasibleError, ValidationError


def test_double_integrator():
    A = np.array([[0.0, 1.0], [0.0, 0.0]])
    B = np.array([[0.0], [1.0]])
    Y = solve_care(A, B, np.eye(2), 1.0)
    np.testing.assert_allclose(Y, [[math.sqrt(3), 1.0], [1.0, math.sqrt(3)]], atol=1e-10)
    K = B.T @ Y
    np.testing.assert_allclose(K, [[1.0, math.sqrt(3)]], atol=1e-10)


def test_scalar_closed_form():
    Y = solve_care(np.array([[-1.0]]), np.array([[1.0]]), np.array([[1.0]]), 1.0)
    assert Y[0, 0] == pytest.approx(math.sqrt(2) - 1, abs=1e-12)


def test_random_systems_agree_with_kleinman_and_scipy():
    rng = np.random.default_rng(42)
    for _ in range(50):
        A = rng.normal(size=(3, 3))
        B = rng.normal(size=(3, 1))
        M = rng.normal(size=(3, 3))
        Q = M @ M.T + np.eye(3)
        R = float(rng.uniform(0.5, 2.0))
        Y = solve_care(A, B, Q, R)
        K0 = signal.place_poles(A, B, [-1.0, -2.0, -3.0]).gain_matrix
        Y_newton = solve_care_kleinman(A, B, Q, R, K0=K0)
        np.testing.assert_allclose(Y, Y_newton, rtol=1e-6, atol=1e-8)
        np.testing.assert_allclose(Y, linalg.solve_continuous_are(A, B, Q, R), rtol=1e-6, atol=1e-8)
        assert care_residual(A, B, Q, np.array([[R]]), Y) <= 1e-6 * max(1.0, np.linalg.norm(Q))
        assert np.all(linalg.eigvals(A - B @ (B.T @ Y) / R).real < 0)


def test_imaginary_axis_hamiltonian():
    A = np.array([[0.0, 1.0], [-1.0, 0.0]])
    B = np.array([[0.0], [1.0]])
    with pytest.raises(HamiltonianBoundaryError):
        solve_care(A, B, np.zeros((2, 2)), 1.0)


def test_unstabilizable_pair():
    A = np.diag([1.0, -1.0])
    B = np.array([[0.0], [1.0]])
    with pytest.raises(SynthesisInfeasibleError):
        solve_care(A, B, np.eye(2), 1.0)


def test_zero_state_weight_on_stable_plant():
    A = np.diag([-1.0, -2.0])
    B = np.array([[1.0], [1.0]])
    Y = solve_care(A, B, np.zeros((2, 2)), 1.0)
    np.testing.assert_allclose(Y, 0.0, atol=1e-12)


def test_kleinman_requires_initial_gain():
    A = np.array([[0.0, 1.0], [0.0, 0.0]])
    B = np.array([[0.0], [1.0]])
    with pytest.raises(ValidationError):
        solve_care_kleinman(A, B, np.eye(2), 1.0)
    with pytest.raises(ValidationError):
        solve_care_kleinman(A, B, np.eye(2), 1.0, K0=np.zeros((1, 2)))


def test_bad_weights():
    A = np.array([[-1.0]])
    B = np.array([[1.0]])
    with pytest.raises(ValidationError):
        solve_care(A, B, np.eye(1), 0.0)
    with pytest.raises(ValidationError):
        solve_care(A, B, np.eye(2), 1.0)
