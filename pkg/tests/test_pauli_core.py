import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from seqwitness.errors import NonUnitTrace, NotHermitian
from seqwitness.pauli_core import (
    PAULI,
    TwoQubitState,
    bell_diagonal_spectrum,
    decompose,
    eigenvalues_hermitian4,
    jacobi_eigenvalues,
    partial_transpose_bob,
    partial_transpose_bob_matrix,
    random_density_matrix,
    random_state,
    reconstruct,
    spectrum,
)

QUARTER = math.pi / 4
SQRT_HALF = math.sqrt(0.5)


def eq5_state(theta, alpha):
    s = math.sin(theta)
    return TwoQubitState.bell_diagonal(-math.cos(theta), -alpha * s, -alpha * s)


def test_pauli_algebra():
    for sigma in PAULI[1:]:
        assert np.allclose(sigma, sigma.conj().T)
        assert abs(np.trace(sigma)) == 0
        assert np.allclose(sigma @ sigma, np.eye(2))
    x, y, z = PAULI[1:]
    assert np.allclose(x @ y, 1j * z)
    assert np.allclose(y @ z, 1j * x)
    assert np.allclose(z @ x, 1j * y)


def test_reconstruct_maximally_mixed():
    assert np.allclose(reconstruct(TwoQubitState.maximally_mixed()), np.eye(4) / 4)


def test_reconstruct_pure_product():
    state = TwoQubitState([0, 0, 1], [0, 0, 1], np.diag([0, 0, 1]))
    expected = np.zeros((4, 4))
    expected[0, 0] = 1
    assert np.allclose(reconstruct(state), expected, atol=1e-15)


def test_reconstruct_eq5_matches_kron_sum():
    theta, alpha = QUARTER, 1.0
    expected = (
        np.eye(4)
        - math.cos(theta) * np.kron(PAULI[1], PAULI[1])
        - alpha * math.sin(theta) * np.kron(PAULI[2], PAULI[2])
        - alpha * math.sin(theta) * np.kron(PAULI[3], PAULI[3])
    ) / 4
    assert np.allclose(reconstruct(eq5_state(theta, alpha)), expected, atol=1e-15)


def test_slot_convention():
    # m rides on I (x) sigma (Bob), n on sigma (x) I (Alice)
    bob_up = TwoQubitState([0, 0, 1], [0, 0, 0], np.zeros((3, 3)))
    assert np.allclose(reconstruct(bob_up), np.kron(np.eye(2) / 2, np.diag([1, 0])))
    alice_up = TwoQubitState([0, 0, 0], [0, 0, 1], np.zeros((3, 3)))
    assert np.allclose(reconstruct(alice_up), np.kron(np.diag([1, 0]), np.eye(2) / 2))


def test_decompose_maximally_mixed():
    state = decompose(np.eye(4) / 4)
    assert state.allclose(TwoQubitState.maximally_mixed())


def test_decompose_eq5():
    state = decompose(reconstruct(eq5_state(QUARTER, 1.0)))
    assert np.allclose(np.diag(state.T), [-0.70710678118654752] * 3, atol=1e-12)
    assert np.allclose(state.m, 0) and np.allclose(state.n, 0)


def test_decompose_rejects_bad_trace():
    with pytest.raises(NonUnitTrace):
        decompose(np.eye(4) / 2)


def test_roundtrip_1000_random_states():
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(1000):
        rho = random_density_matrix(rng)
        worst = max(worst, np.max(np.abs(reconstruct(decompose(rho)) - rho)))
        state = decompose(rho)
        assert decompose(reconstruct(state)).allclose(state)
    assert worst < 1e-12


def test_eigenvalues_identity_and_diagonal():
    assert np.allclose(eigenvalues_hermitian4(np.eye(4)), [1, 1, 1, 1])
    assert np.allclose(eigenvalues_hermitian4(np.diag([0.4, 0.3, 0.2, 0.1])), [0.1, 0.2, 0.3, 0.4])


def test_eigenvalues_eq5_bell_diagonal():
    expected = [0.07322330470336312, 0.07322330470336312, 0.07322330470336312, 0.78033008588991064]
    rho = reconstruct(eq5_state(QUARTER, 1.0))
    assert np.allclose(eigenvalues_hermitian4(rho), expected, atol=1e-10)
    assert np.allclose(bell_diagonal_spectrum(*[-SQRT_HALF] * 3), expected, atol=1e-15)


def test_eigenvalues_rejects_non_hermitian():
    h = np.eye(4, dtype=complex)
    h[0, 1] = 1e-6
    with pytest.raises(NotHermitian):
        eigenvalues_hermitian4(h)


def test_jacobi_against_lapack_random():
    rng = np.random.default_rng(3)
    g = rng.normal(size=(500, 4, 4)) + 1j * rng.normal(size=(500, 4, 4))
    h = g + np.swapaxes(g.conj(), -1, -2)
    ours = eigenvalues_hermitian4(h)
    assert np.max(np.abs(ours - np.linalg.eigvalsh(h))) < 1e-10
    assert np.max(np.abs(ours.sum(axis=-1) - np.trace(h, axis1=-2, axis2=-1).real)) < 1e-10


def test_jacobi_degenerate_and_other_sizes():
    u = np.linalg.qr(np.random.default_rng(0).normal(size=(3, 3)))[0]
    a = u @ np.diag([2.0, 2.0, -1.0]) @ u.T
    assert np.allclose(jacobi_eigenvalues(a), [-1, 2, 2], atol=1e-12)


def test_spectrum_fast_path_matches_solver():
    rng = np.random.default_rng(11)
    for t in rng.uniform(-1, 1, size=(200, 3)):
        state = TwoQubitState.bell_diagonal(*t)
        assert np.allclose(spectrum(state), eigenvalues_hermitian4(reconstruct(state)), atol=1e-12)


def test_partial_transpose_product_state():
    state = TwoQubitState([0, 0, 1], [0, 0, 1], np.diag([0, 0, 1]))
    assert partial_transpose_bob(state).allclose(state)
    assert abs(spectrum(partial_transpose_bob(state))[0]) < 1e-12


def test_partial_transpose_eq5_rule():
    theta, alpha = 0.3, 0.8
    pt = partial_transpose_bob(eq5_state(theta, alpha))
    expected = np.diag([-math.cos(theta), alpha * math.sin(theta), -alpha * math.sin(theta)])
    assert np.allclose(pt.T, expected)


def test_partial_transpose_matches_matrix_1000():
    rng = np.random.default_rng(5)
    worst = 0.0
    for _ in range(1000):
        state = random_state(rng)
        diff = reconstruct(partial_transpose_bob(state)) - partial_transpose_bob_matrix(reconstruct(state))
        worst = max(worst, np.max(np.abs(diff)))
    assert worst < 1e-12


seeds = st.integers(min_value=0, max_value=2**32 - 1)


@settings(max_examples=200, deadline=None)
@given(seed=seeds, rank=st.integers(1, 4))
def test_state_properties(seed, rank):
    rng = np.random.default_rng(seed)
    state = random_state(rng, rank)
    eig = eigenvalues_hermitian4(reconstruct(state))
    assert eig[0] >= -1e-10 and eig[-1] <= 1 + 1e-10
    assert abs(eig.sum() - 1) < 1e-10
    pt = partial_transpose_bob(state)
    assert partial_transpose_bob(pt).allclose(state, atol=0)
    pt_matrix = reconstruct(pt)
    assert abs(np.trace(pt_matrix) - 1) < 1e-12
    assert np.allclose(pt_matrix, pt_matrix.conj().T, atol=1e-15)
