"""Two-qubit state algebra in the Pauli-coefficient and dense-matrix pictures.

A two-qubit operator is written as

    rho = 1/4 [I(x)I + sum_i m_i I(x)s_i + sum_i n_i s_i(x)I + sum_ij t_ij s_i(x)s_j]

with Alice on the first tensor slot and Bob on the second.  ``m`` is therefore
the local Bloch vector of Bob's qubit and ``n`` that of Alice's qubit; the
correlation tensor ``T`` carries Alice's Pauli index on rows and Bob's on
columns.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from seqwitness.errors import NonUnitTrace, NotHermitian

PSD_TOL = 1e-10
HERM_TOL = 1e-12
TRACE_TOL = 1e-10

JACOBI_TOL = 1e-13
JACOBI_MAX_SWEEPS = 100

IDENTITY = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)

# Index 0 is the identity so that PAULI[i] is sigma_i for i = 1, 2, 3.
PAULI = np.stack([IDENTITY, SIGMA_X, SIGMA_Y, SIGMA_Z])
PAULI.flags.writeable = False

# PAULI_PRODUCTS[a, b] = PAULI[a] (x) PAULI[b], Alice first.
PAULI_PRODUCTS = np.einsum("aij,bkl->abikjl", PAULI, PAULI).reshape(4, 4, 4, 4)
PAULI_PRODUCTS.flags.writeable = False


def _frozen(values, shape):
    arr = np.array(values, dtype=float).reshape(shape)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class TwoQubitState:
    """Pauli coefficients (m, n, T) of a unit-trace Hermitian 4x4 operator.

    Positivity is not enforced here: partial transposes and witness-like
    operators share the representation.  Use :func:`is_psd` to check it.
    """

    m: np.ndarray
    n: np.ndarray
    T: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "m", _frozen(self.m, (3,)))
        object.__setattr__(self, "n", _frozen(self.n, (3,)))
        object.__setattr__(self, "T", _frozen(self.T, (3, 3)))

    @classmethod
    def bell_diagonal(cls, t1, t2, t3):
        return cls(np.zeros(3), np.zeros(3), np.diag([t1, t2, t3]))

    @classmethod
    def maximally_mixed(cls):
        return cls(np.zeros(3), np.zeros(3), np.zeros((3, 3)))

    @property
    def is_bell_diagonal(self):
        return (
            not self.m.any()
            and not self.n.any()
            and not (self.T - np.diag(np.diag(self.T))).any()
        )

    def coefficients(self):
        """The full 4x4 coefficient table c[a, b] with c[0, 0] = 1."""
        c = np.empty((4, 4))
        c[0, 0] = 1.0
        c[0, 1:] = self.m
        c[1:, 0] = self.n
        c[1:, 1:] = self.T
        return c

    def allclose(self, other, atol=1e-12):
        return bool(np.allclose(self.coefficients(), other.coefficients(), rtol=0, atol=atol))

    def __repr__(self):
        return f"TwoQubitState(m={self.m.tolist()}, n={self.n.tolist()}, T={self.T.tolist()})"


def check_hermitian(h, tol=HERM_TOL):
    h = np.asarray(h, dtype=complex)
    if h.shape[-2:] != (h.shape[-1], h.shape[-1]):
        raise ValueError(f"expected square matrices, got shape {h.shape}")
    dev = np.max(np.abs(h - np.swapaxes(h.conj(), -1, -2)), initial=0.0)
    if dev > tol:
        raise NotHermitian(f"matrix deviates from Hermitian by {dev:.3e}")
    return h


def coefficients_to_matrix(c) -> np.ndarray:
    """Dense matrices from coefficient tables of shape (..., 4, 4)."""
    return np.einsum("...ab,abij->...ij", c, PAULI_PRODUCTS) / 4


def reconstruct(state: TwoQubitState) -> np.ndarray:
    """Dense 4x4 matrix of ``state``."""
    return coefficients_to_matrix(state.coefficients())


def decompose(rho) -> TwoQubitState:
    """Pauli coefficients of a unit-trace 4x4 matrix.

    Raises:
        NonUnitTrace: if ``|Tr rho - 1| > TRACE_TOL``.
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise ValueError(f"expected a 4x4 matrix, got shape {rho.shape}")
    tr = np.trace(rho)
    if abs(tr - 1) > TRACE_TOL:
        raise NonUnitTrace(f"trace is {tr.real:.12g}{tr.imag:+.3g}j, expected 1")
    # Tr[rho (s_a (x) s_b)] for every pair at once.
    c = np.einsum("abij,ji->ab", PAULI_PRODUCTS, rho).real
    return TwoQubitState(c[0, 1:], c[1:, 0], c[1:, 1:])


def jacobi_eigenvalues(h, tol=JACOBI_TOL, max_sweeps=JACOBI_MAX_SWEEPS):
    """Eigenvalues of Hermitian matrices by cyclic complex Jacobi rotations.

    Works on a single ``(n, n)`` matrix or any stack ``(..., n, n)``; every
    matrix in a stack is rotated in lockstep.  Sweeps stop once the
    off-diagonal Frobenius norm falls below ``tol * max(1, ||h||_F)``.

    Returns the eigenvalues in ascending order along the last axis.
    """
    a = np.array(h, dtype=complex, copy=True)
    n = a.shape[-1]
    scale = np.maximum(1.0, np.linalg.norm(a, axis=(-2, -1)))
    offdiag = ~np.eye(n, dtype=bool)
    for _ in range(max_sweeps):
        off = np.sqrt(np.sum(np.abs(a[..., offdiag]) ** 2, axis=-1))
        if np.all(off < tol * scale):
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                g = a[..., p, q]
                absg = np.abs(g)
                active = absg > 1e-300
                safe = np.where(active, absg, 1.0)
                phase = np.where(active, g / safe, 1.0)
                zeta = (a[..., q, q].real - a[..., p, p].real) / (2 * safe)
                sgn = np.where(zeta >= 0, 1.0, -1.0)
                t = sgn / (np.abs(zeta) + np.hypot(1.0, zeta))
                t = np.where(active, t, 0.0)
                c = 1 / np.sqrt(1 + t * t)
                s = t * c
                c, s, phase = c[..., None], s[..., None], phase[..., None]
                col_p = a[..., :, p].copy()
                col_q = a[..., :, q]
                a[..., :, p] = c * col_p - s * phase.conj() * col_q
                a[..., :, q] = s * col_p + c * phase.conj() * col_q
                row_p = a[..., p, :].copy()
                row_q = a[..., q, :]
                a[..., p, :] = c * row_p - s * phase * row_q
                a[..., q, :] = s * row_p + c * phase * row_q
                a[..., p, q] = 0
                a[..., q, p] = 0
    return np.sort(np.diagonal(a, axis1=-2, axis2=-1).real, axis=-1)


def eigenvalues_hermitian4(h) -> np.ndarray:
    """Ascending eigenvalues of a 4x4 Hermitian matrix (or a stack of them).

    Raises:
        NotHermitian: if any entry differs from its conjugate partner by
            more than ``HERM_TOL``.
    """
    h = check_hermitian(h)
    if h.shape[-2:] != (4, 4):
        raise ValueError(f"expected 4x4 matrices, got shape {h.shape}")
    return jacobi_eigenvalues(h)


def bell_diagonal_spectrum(t1, t2, t3):
    """Ascending spectrum of the Bell-diagonal operator with T = diag(t1, t2, t3)."""
    return np.sort(
        [
            (1 - t1 - t2 - t3) / 4,
            (1 - t1 + t2 + t3) / 4,
            (1 + t1 - t2 + t3) / 4,
            (1 + t1 + t2 - t3) / 4,
        ]
    )


def spectrum(state: TwoQubitState) -> np.ndarray:
    """Ascending spectrum of ``state``, closed form for Bell-diagonal input."""
    if state.is_bell_diagonal:
        return bell_diagonal_spectrum(*np.diag(state.T))
    return eigenvalues_hermitian4(reconstruct(state))


def min_eigenvalue(state: TwoQubitState) -> float:
    return float(spectrum(state)[0])


def is_psd(state: TwoQubitState, tol=PSD_TOL) -> bool:
    return min_eigenvalue(state) >= -tol


def partial_transpose_bob(state: TwoQubitState) -> TwoQubitState:
    """Transpose on Bob's slot: sigma_y^T = -sigma_y flips every Bob-side y component."""
    flip = np.array([1.0, -1.0, 1.0])
    return TwoQubitState(state.m * flip, state.n, state.T * flip)


def partial_transpose_bob_matrix(rho) -> np.ndarray:
    """Explicit partial transpose of a dense 4x4 matrix on the second slot."""
    r = np.asarray(rho).reshape(2, 2, 2, 2)
    return r.transpose(0, 3, 2, 1).reshape(4, 4)


def random_density_matrix(rng: np.random.Generator, rank=4) -> np.ndarray:
    """Random 4x4 density matrix from a complex Ginibre matrix of the given rank."""
    g = rng.normal(size=(4, rank)) + 1j * rng.normal(size=(4, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_state(rng: np.random.Generator, rank=4) -> TwoQubitState:
    return decompose(random_density_matrix(rng, rank))
