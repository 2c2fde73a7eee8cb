import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import random_density, random_unitary
from eawmr.channels import (
    PAULI_Z,
    DecayParams,
    DecayProfile,
    KrausChannel,
    NotRu,
    RuDecomposition,
    amplitude_damping,
    apply,
    channel_from_dict,
    channel_to_dict,
    cptp_residual,
    dephasing,
    detect_ru,
    dumps_channel,
    gamma_at,
    identity_channel,
    load_channel,
    loads_channel,
    random_unitary_channel,
    save_channel,
    transform,
    two_qubit_dissipative,
)
from eawmr.errors import CptpError, DimensionError, NotUnitary
from eawmr.optimizer import rotation

unit = st.floats(0.0, 1.0)
angle = st.floats(-2 * math.pi, 2 * math.pi)


def test_amplitude_damping_limits():
    ch = amplitude_damping(1.0)
    assert np.array_equal(ch[0], np.eye(2))
    assert np.array_equal(ch[1], np.zeros((2, 2)))
    ch = amplitude_damping(0.0)
    assert np.array_equal(ch[0], np.diag([0.0, 1.0]))
    assert np.array_equal(ch[1], np.array([[0, 0], [1, 0]]))


def test_amplitude_damping_omega():
    assert amplitude_damping(0.6)[1][1, 0] == pytest.approx(0.8, abs=1e-15)


@pytest.mark.parametrize("gamma", [-0.1, 1.1, float("nan")])
def test_amplitude_damping_range(gamma):
    with pytest.raises(ValueError):
        amplitude_damping(gamma)


def test_decay_params():
    p = DecayParams(0.6, 0.8)
    assert p.omega_a == pytest.approx(0.8)
    assert p.omega_b == pytest.approx(0.6)
    with pytest.raises(ValueError):
        DecayParams(1.2, 0.5)


@given(unit, unit)
def test_decay_params_pythagoras(ga, gb):
    p = DecayParams(ga, gb)
    assert abs(p.gamma_a**2 + p.omega_a**2 - 1) < 1e-12
    assert abs(p.gamma_b**2 + p.omega_b**2 - 1) < 1e-12


def test_two_qubit_identity_at_t0():
    ch = two_qubit_dissipative(DecayParams(1.0, 1.0))
    assert np.array_equal(ch[0], np.eye(4))
    for k in ch.ops[1:]:
        assert np.array_equal(k, np.zeros((4, 4)))


def test_two_qubit_k1_diagonal():
    ch = two_qubit_dissipative(DecayParams(0.6, 0.8))
    assert np.allclose(ch[0], np.diag([0.48, 0.6, 0.8, 1.0]), atol=1e-15)


def test_two_qubit_operators_match_printed_products():
    ga, gb = 0.3, 0.55
    wa, wb = math.sqrt(1 - ga**2), math.sqrt(1 - gb**2)
    keep = lambda g: np.array([[g, 0], [0, 1]])
    jump = lambda w: np.array([[0, 0], [w, 0]])
    ch = two_qubit_dissipative(DecayParams(ga, gb))
    expected = [
        np.kron(keep(ga), keep(gb)),
        np.kron(keep(ga), jump(wb)),
        np.kron(jump(wa), keep(gb)),
        np.kron(jump(wa), jump(wb)),
    ]
    for got, want in zip(ch.ops, expected):
        assert np.allclose(got, want, atol=1e-15)


@given(unit, unit)
def test_two_qubit_cptp(ga, gb):
    ch = two_qubit_dissipative(DecayParams(ga, gb))
    assert cptp_residual(ch.ops) < 1e-12


def test_channel_rejects_non_cptp():
    with pytest.raises(CptpError) as info:
        KrausChannel((np.diag([0.5, 1.0]),))
    assert info.value.residual == pytest.approx(0.75)


def test_channel_rejects_mixed_shapes():
    with pytest.raises(DimensionError):
        KrausChannel((np.eye(2), np.zeros((3, 3))))


def test_apply_identity(rng):
    rho = random_density(3, rng)
    assert np.allclose(apply(identity_channel(3), rho).mat, rho)


def test_apply_full_decay():
    out = apply(amplitude_damping(0.0), np.diag([1.0, 0.0]))
    assert np.allclose(out.mat, np.diag([0.0, 1.0]))


def test_apply_partial_decay():
    g = 0.35
    out = apply(amplitude_damping(g), np.diag([1.0, 0.0]))
    assert np.allclose(out.mat, np.diag([g * g, 1 - g * g]))


def test_apply_dimension_mismatch():
    with pytest.raises(DimensionError):
        apply(amplitude_damping(0.5), np.eye(4) / 4)


@given(unit, unit, st.integers(0, 2**32 - 1))
def test_apply_preserves_state_properties(ga, gb, seed):
    rng = np.random.default_rng(seed)
    rho = random_density(4, rng, rank=int(rng.integers(1, 5)))
    out = apply(two_qubit_dissipative(DecayParams(ga, gb)), rho).mat
    assert abs(np.trace(out).real - 1) < 1e-9
    assert np.min(np.linalg.eigvalsh(out)) > -1e-9


def test_transform_identity_and_swap():
    ch = amplitude_damping(0.6)
    same = transform(ch, np.eye(2))
    for a, b in zip(same.ops, ch.ops):
        assert np.array_equal(a, b)
    swapped = transform(ch, np.array([[0, 1], [1, 0]]))
    assert np.array_equal(swapped[0], ch[1])
    assert np.array_equal(swapped[1], ch[0])


def test_transform_rotation_quarter_pi():
    c = s = math.sqrt(2) / 2
    out = transform(amplitude_damping(0.6), rotation(math.pi / 4))
    assert np.allclose(out[0], [[0.6 * c, 0], [-0.8 * s, c]], atol=1e-15)


def test_transform_rejects_bad_mixing():
    ch = amplitude_damping(0.6)
    with pytest.raises(NotUnitary):
        transform(ch, np.array([[1, 1], [0, 1]]))
    with pytest.raises(DimensionError):
        transform(ch, np.eye(3))


@given(unit, angle)
def test_transform_rotation_keeps_cptp(gamma, delta):
    out = transform(amplitude_damping(gamma), rotation(delta))
    assert cptp_residual(out.ops) < 1e-10


def _action_matrix(ch, basis):
    return [sum(k @ e @ k.conj().T for k in ch.ops) for e in basis]


def test_transform_preserves_channel_action(rng):
    dim = 4
    basis = []
    for i in range(dim):
        for j in range(dim):
            e = np.zeros((dim, dim), dtype=complex)
            e[i, j] = 1.0
            basis.append(e)
    for _ in range(20):
        ch = two_qubit_dissipative(DecayParams(*rng.uniform(0, 1, size=2)))
        mixed = transform(ch, random_unitary(4, rng))
        assert cptp_residual(mixed.ops) < 1e-10
        for a, b in zip(_action_matrix(ch, basis), _action_matrix(mixed, basis)):
            assert np.max(np.abs(a - b)) < 1e-9


def test_detect_ru_dephasing():
    p = 0.3
    result = detect_ru(dephasing(p))
    assert isinstance(result, RuDecomposition)
    assert np.allclose(result.coeffs, [math.sqrt(p), math.sqrt(1 - p)])
    assert np.allclose(result.unitaries[0], np.eye(2))
    assert np.allclose(result.unitaries[1], PAULI_Z)


def test_detect_ru_amplitude_damping():
    result = detect_ru(amplitude_damping(0.6))
    assert isinstance(result, NotRu)
    assert result.failing_index == 0


def test_detect_ru_identity_and_zero_operator():
    result = detect_ru(identity_channel(2))
    assert result.coeffs == (1.0,)
    result = detect_ru(amplitude_damping(1.0))
    assert result.coeffs == (1.0, 0.0)
    assert np.array_equal(result.unitaries[1], np.eye(2))


def _direct_ru_check(ch, tol=1e-10):
    # independent oracle: singular values of each operator must all coincide
    for k in ch.ops:
        s = np.linalg.svd(k, compute_uv=False)
        if s.max() - s.min() > tol:
            return False
    return True


def test_detect_ru_agrees_with_singular_value_oracle(rng):
    phases = lambda: np.diag(np.exp(1j * rng.uniform(0, 2 * np.pi, size=2)))
    for trial in range(60):
        p = rng.uniform(0, 1)
        ch = random_unitary_channel([p, 1 - p], [phases(), phases() @ PAULI_Z])
        if trial % 3 == 0:
            v = random_unitary(2, rng)
        elif trial % 3 == 1:
            v = np.diag(np.exp(1j * rng.uniform(0, 2 * np.pi, size=2)))
        else:
            v = np.array([[0, 1], [1, 0]])
        mixed = transform(ch, v)
        decided = not isinstance(detect_ru(mixed), NotRu)
        assert decided == _direct_ru_check(mixed)
        if decided:
            ru = detect_ru(mixed)
            for c, u, k in zip(ru.coeffs, ru.unitaries, mixed.ops):
                assert np.allclose(c * u, k, atol=1e-10)
                assert np.allclose(u.conj().T @ u, np.eye(2), atol=1e-10)
            assert abs(sum(c * c for c in ru.coeffs) - 1) < 1e-10


@given(st.floats(0.0, 0.999))
def test_dissipative_never_ru_below_one(gamma):
    assert isinstance(detect_ru(two_qubit_dissipative(DecayParams(gamma, gamma))), NotRu)


def test_gamma_at():
    prof = DecayProfile(1.0)
    assert gamma_at(prof, 0.0) == 1.0
    assert gamma_at(prof, 2 * math.log(2)) == pytest.approx(0.5, abs=1e-15)
    ts = np.linspace(0, 50, 200)
    vals = [prof(t) for t in ts]
    assert all(b <= a for a, b in zip(vals, vals[1:]))
    assert 0 < vals[-1] < 1e-10
    with pytest.raises(ValueError):
        gamma_at(prof, -1.0)
    with pytest.raises(ValueError):
        DecayProfile(0.0)


def test_json_round_trip_is_exact(tmp_path, rng):
    ch = transform(amplitude_damping(0.37), random_unitary(2, rng))
    back = loads_channel(dumps_channel(ch))
    for a, b in zip(ch.ops, back.ops):
        assert np.array_equal(a, b)
    path = tmp_path / "ch.json"
    save_channel(ch, path)
    assert load_channel(path).dim == 2


def test_json_schema_layout():
    d = channel_to_dict(amplitude_damping(0.6))
    assert d["dim"] == 2
    assert len(d["ops"]) == 2
    assert d["ops"][1][2] == [pytest.approx(0.8), 0.0]  # row-major (1, 0)
    json.dumps(d)


@pytest.mark.parametrize(
    "payload",
    [
        {"ops": []},
        {"dim": 2, "ops": [[[1, 0], [0, 0], [0, 0]]]},
        {"dim": 2, "ops": [[["a", 0], [0, 0], [0, 0], [1, 0]]]},
    ],
)
def test_json_malformed(payload):
    with pytest.raises(ValueError):
        channel_from_dict(payload)


def test_json_not_cptp():
    payload = {"dim": 2, "ops": [[[0.5, 0], [0, 0], [0, 0], [1, 0]]]}
    with pytest.raises(CptpError):
        channel_from_dict(payload)
