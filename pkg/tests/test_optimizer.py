import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from eawmr.channels import amplitude_damping, cptp_residual, transform
from eawmr.optimizer import (
    EulerUnitary,
    SweepCurve,
    SweepPoint,
    argmax_delta,
    euler_matrix,
    p_ew_of_delta,
    p_ew_of_mixing,
    phase_invariance_check,
    rotation,
    sweep_delta,
)

gamma_inner = st.floats(0.01, 0.99)
angle = st.floats(-10.0, 10.0)


def _p_ew_oracle(gamma, v):
    # independent route: LAPACK singular values of each remixed operator
    w = math.sqrt(1 - gamma**2)
    k = [np.array([[gamma, 0], [0, 1]]), np.array([[0, 0], [w, 0]])]
    total = 0.0
    for n in range(2):
        l = v[n, 0] * k[0] + v[n, 1] * k[1]
        s = np.linalg.svd(l, compute_uv=False)
        if s.min() > 1e-9 * s.max():
            total += s.min() ** 2
    return total


def test_euler_matrix_examples():
    assert np.allclose(euler_matrix(EulerUnitary()), np.eye(2))
    assert np.allclose(euler_matrix(EulerUnitary(delta=math.pi / 2)), [[0, -1], [1, 0]])


def test_euler_matrix_printed_entries():
    a, b, g, d = 0.3, -1.1, 2.0, 0.7
    v = euler_matrix(EulerUnitary(a, b, g, d))
    expected = np.array([
        [np.exp(1j * (a - b - g)) * np.cos(d), -np.exp(1j * (a - b + g)) * np.sin(d)],
        [np.exp(1j * (a + b - g)) * np.sin(d), np.exp(1j * (a + b + g)) * np.cos(d)],
    ])
    assert np.allclose(v, expected, atol=1e-15)


@given(angle, angle, angle, angle)
def test_euler_matrix_unitary(a, b, g, d):
    v = euler_matrix(EulerUnitary(a, b, g, d))
    assert np.max(np.abs(v.conj().T @ v - np.eye(2))) < 1e-12


@given(st.floats(0.0, 1.0))
def test_p_ew_of_delta_canonical_and_swapped(gamma):
    assert p_ew_of_delta(gamma, 0.0) == pytest.approx(gamma**2, abs=1e-12)
    assert p_ew_of_delta(gamma, math.pi / 2) == pytest.approx(gamma**2, abs=1e-12)


def test_p_ew_of_delta_quarter_pi():
    assert p_ew_of_delta(0.6, math.pi / 4) == pytest.approx(0.2, abs=1e-12)


@given(gamma_inner, angle)
def test_p_ew_of_delta_against_svd_oracle(gamma, delta):
    assert p_ew_of_delta(gamma, delta) == pytest.approx(_p_ew_oracle(gamma, rotation(delta)), abs=1e-10)


@given(gamma_inner, angle)
def test_symmetries(gamma, delta):
    p = p_ew_of_delta(gamma, delta)
    assert abs(p - p_ew_of_delta(gamma, -delta)) < 1e-10
    assert abs(p - p_ew_of_delta(gamma, delta + math.pi)) < 1e-10


@given(gamma_inner, angle)
def test_canonical_is_optimal(gamma, delta):
    assert p_ew_of_delta(gamma, delta) <= gamma**2 + 1e-12


@given(gamma_inner, angle)
def test_rotated_channels_stay_cptp(gamma, delta):
    assert cptp_residual(transform(amplitude_damping(gamma), rotation(delta)).ops) < 1e-10


def test_sweep_grid():
    curve = sweep_delta(0.6, 5, math.pi)
    assert np.allclose(curve.deltas, np.linspace(0, math.pi, 5))
    curve = sweep_delta(0.6, 2)
    assert curve.deltas.tolist() == [0.0, 2 * math.pi]
    with pytest.raises(ValueError):
        sweep_delta(0.6, 1)


@pytest.mark.parametrize("gamma", [0.3, 0.6, 0.9])
def test_sweep_structure(gamma):
    curve = sweep_delta(gamma, 401, 2 * math.pi)
    v = curve.values
    assert np.all((v >= 0) & (v <= 1))
    assert v.max() == pytest.approx(gamma**2, abs=1e-10)
    # 400 intervals over 2 pi: pi/2 sits at every 100th sample
    assert np.max(np.abs(v[:201] - v[200:])) < 1e-10
    got = argmax_delta(curve)
    assert np.allclose(got, [0, math.pi / 2, math.pi, 3 * math.pi / 2, 2 * math.pi], atol=1e-12)


def test_argmax_flat_and_single():
    curve = sweep_delta(1.0, 21)
    assert len(argmax_delta(curve)) == 21
    single = SweepCurve(0.5, (SweepPoint(0.3, 0.1),))
    assert argmax_delta(single) == [0.3]
    with pytest.raises(ValueError):
        argmax_delta(SweepCurve(0.5, ()))


def test_sweep_curve_requires_increasing():
    with pytest.raises(ValueError):
        SweepCurve(0.5, (SweepPoint(0.3, 0.1), SweepPoint(0.3, 0.2)))


def test_phase_invariance():
    assert phase_invariance_check(1.0, 20, 0) < 1e-14
    assert phase_invariance_check(0.6, 100, 7) < 1e-10


def test_zero_phase_draws_have_no_deviation():
    for d in np.linspace(0, 2 * math.pi, 13):
        full = p_ew_of_mixing(0.6, euler_matrix(EulerUnitary(0.0, 0.0, 0.0, d)))
        assert full == p_ew_of_delta(0.6, d)


@given(gamma_inner, angle, angle, angle, angle)
def test_phase_invariance_property(gamma, a, b, g, d):
    full = p_ew_of_mixing(gamma, euler_matrix(EulerUnitary(a, b, g, d)))
    assert abs(full - p_ew_of_delta(gamma, d)) < 1e-10


def test_fully_decayed_curve_is_zero():
    assert np.allclose(sweep_delta(0.0, 41).values, 0.0)
