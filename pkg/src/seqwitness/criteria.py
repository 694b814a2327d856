"""Entanglement and locality tests for two-qubit states."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from seqwitness.pauli_core import (
    PAULI,
    TwoQubitState,
    jacobi_eigenvalues,
    min_eigenvalue,
    partial_transpose_bob,
    reconstruct,
)

# Discriminant threshold below which the cubic closed form hands over to Jacobi.
CUBIC_DEGENERACY = 1e-24
DETECT_TOL = 0.0
# cos^2 + sin^2 of a rounded angle can land an ulp above 1.
LOCAL_TOL = 1e-12


@dataclass(frozen=True)
class Witness:
    """The operator 1/4 [I(x)I + sum_i lam_i s_i(x)s_i] with sharpnesses lam in [0, 1]^3."""

    lam: tuple

    def __post_init__(self):
        lam = tuple(float(x) for x in self.lam)
        if len(lam) != 3:
            raise ValueError(f"witness needs three sharpness values, got {len(lam)}")
        if not all(0.0 <= x <= 1.0 for x in lam):
            raise ValueError(f"witness sharpness values must lie in [0, 1], got {lam}")
        object.__setattr__(self, "lam", lam)

    @classmethod
    def for_bob(cls, lam):
        """Sharp on the x axis, sharpness ``lam`` on y and z."""
        return cls((1.0, lam, lam))


@dataclass(frozen=True)
class ChshReport:
    u0: float
    u1: float

    @property
    def value(self):
        return self.u0 + self.u1

    @property
    def is_local(self):
        return self.value <= 1.0 + LOCAL_TOL


@dataclass(frozen=True)
class ProductState:
    """Alice and Bob Bloch unit vectors of a pure product state."""

    r_a: np.ndarray
    r_b: np.ndarray

    def __post_init__(self):
        for name in ("r_a", "r_b"):
            v = np.array(getattr(self, name), dtype=float).reshape(3)
            if abs(np.linalg.norm(v) - 1) > 1e-12:
                raise ValueError(f"{name} must be a unit vector, |{name}| = {np.linalg.norm(v)!r}")
            v.flags.writeable = False
            object.__setattr__(self, name, v)

    def density_matrix(self):
        rho_a = (PAULI[0] + np.einsum("i,ijk->jk", self.r_a, PAULI[1:])) / 2
        rho_b = (PAULI[0] + np.einsum("i,ijk->jk", self.r_b, PAULI[1:])) / 2
        return np.kron(rho_a, rho_b)


def ppt_min_eigenvalue(state: TwoQubitState) -> float:
    """Smallest eigenvalue of the partial transpose; negative iff ``state`` is entangled."""
    return min_eigenvalue(partial_transpose_bob(state))


def is_entangled(state: TwoQubitState, tol=1e-10) -> bool:
    return ppt_min_eigenvalue(state) < -tol


def symmetric3_eigenvalues(a):
    """Descending eigenvalues of a real symmetric 3x3 matrix.

    Trigonometric solution of the characteristic cubic; if the eigenvalues
    are too close for it to be trusted the Jacobi solver is used instead.
    """
    a = np.asarray(a, dtype=float)
    p1 = a[0, 1] ** 2 + a[0, 2] ** 2 + a[1, 2] ** 2
    if p1 == 0.0:
        return np.sort(np.diag(a))[::-1]
    q = np.trace(a) / 3
    p2 = np.sum((np.diag(a) - q) ** 2) + 2 * p1
    p = math.sqrt(p2 / 6)
    b = (a - q * np.eye(3)) / p
    r = min(1.0, max(-1.0, np.linalg.det(b) / 2))
    phi = math.acos(r) / 3
    e0 = q + 2 * p * math.cos(phi)
    e2 = q + 2 * p * math.cos(phi + 2 * math.pi / 3)
    e1 = 3 * q - e0 - e2
    disc = ((e0 - e1) * (e0 - e2) * (e1 - e2)) ** 2
    if disc < CUBIC_DEGENERACY:
        return jacobi_eigenvalues(a)[::-1]
    return np.array([e0, e1, e2])


def chsh_value(state: TwoQubitState) -> ChshReport:
    """Sum of the two largest eigenvalues of T^T T; the state is CHSH-local iff it is <= 1."""
    t = state.T
    u = np.clip(symmetric3_eigenvalues(t.T @ t), 0.0, None)
    return ChshReport(float(u[0]), float(u[1]))


def witness_matrix(w: Witness) -> np.ndarray:
    terms = sum(lam * np.kron(PAULI[i + 1], PAULI[i + 1]) for i, lam in enumerate(w.lam))
    return (np.eye(4) + terms) / 4


def witness_expectation(w: Witness, state: TwoQubitState) -> float:
    """Tr[W rho]; only the diagonal of the correlation tensor contributes."""
    return (1 + float(np.dot(w.lam, np.diag(state.T)))) / 4


def witness_expectation_trace(w: Witness, state: TwoQubitState) -> float:
    """Same quantity through explicit 4x4 matrices."""
    return float(np.trace(witness_matrix(w) @ reconstruct(state)).real)


def detects(w: Witness, state: TwoQubitState) -> bool:
    return witness_expectation(w, state) < -DETECT_TOL


def witness_expectation_product(w: Witness, p: ProductState) -> float:
    """1/4 (1 + r_a . s_b) with s_b = lam * r_b; never negative since |s_b| <= 1."""
    s_b = np.asarray(w.lam) * p.r_b
    return (1 + float(np.dot(p.r_a, s_b))) / 4


def sample_unit_vectors(rng: np.random.Generator, size):
    """Uniform points on the unit sphere: cos(polar) ~ U[-1, 1], azimuth ~ U[0, 2pi)."""
    cos_t = rng.uniform(-1.0, 1.0, size)
    phi = rng.uniform(0.0, 2 * np.pi, size)
    sin_t = np.sqrt(1 - cos_t**2)
    v = np.stack([sin_t * np.cos(phi), sin_t * np.sin(phi), cos_t], axis=-1)
    # Renormalise to absorb rounding in sqrt(1 - c^2).
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


def sample_product_state(rng: np.random.Generator) -> ProductState:
    r_a = sample_unit_vectors(rng, None)
    r_b = sample_unit_vectors(rng, None)
    return ProductState(r_a, r_b)
