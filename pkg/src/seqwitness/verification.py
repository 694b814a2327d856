"""Self-checks run by ``seqwitness verify`` and the acceptance tests."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from seqwitness import criteria, protocol
from seqwitness.errors import InternalInconsistency
from seqwitness.pauli_core import (
    PSD_TOL,
    decompose,
    eigenvalues_hermitian4,
    random_density_matrix,
    reconstruct,
)

PRODUCT_TOL = 1e-12
CHANNEL_TOL = 1e-10
ROUNDTRIP_TOL = 1e-12


@dataclass
class SuiteResult:
    name: str
    passed: bool
    checked: int
    detail: str = ""

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.name}: {self.checked} checks{'; ' + self.detail if self.detail else ''}"


def theta_grid(lo=1e-6, hi=math.pi / 4, steps=50):
    return np.geomspace(lo, hi, steps)


def product_nonnegativity(rng, samples):
    """Witness expectations on random pure product states with random sharpness."""
    lowest = math.inf
    for _ in range(samples):
        state = criteria.sample_product_state(rng)
        w = criteria.Witness(rng.uniform(0.0, 1.0, 3))
        lowest = min(lowest, criteria.witness_expectation_product(w, state))
    passed = samples == 0 or lowest >= -PRODUCT_TOL
    return SuiteResult("product-state nonnegativity", passed, samples, f"min <W> = {lowest:.3e}" if samples else "")


def channel_equivalence(rng, samples):
    """Kraus-matrix and Pauli-coefficient channels on random (state, sharpness) pairs."""
    worst = 0.0
    trace_dev = 0.0
    outputs = []
    for _ in range(samples):
        rho = random_density_matrix(rng, rank=int(rng.integers(1, 5)))
        lam = rng.uniform(1e-6, 1.0)
        via_matrix = protocol.apply_bob_channel_matrix(rho, lam)
        via_tensor = reconstruct(protocol.apply_bob_channel(decompose(rho), lam))
        worst = max(worst, float(np.max(np.abs(via_matrix - via_tensor))))
        trace_dev = max(trace_dev, abs(np.trace(via_matrix).real - 1))
        outputs.append(via_matrix)
    lowest = float(eigenvalues_hermitian4(np.array(outputs))[:, 0].min()) if samples else 0.0
    passed = worst <= CHANNEL_TOL and trace_dev <= CHANNEL_TOL and lowest >= -PSD_TOL
    detail = f"max |diff| = {worst:.3e}, trace dev = {trace_dev:.3e}, min eig = {lowest:.3e}"
    return SuiteResult("channel matrix/tensor equivalence", passed, samples, detail if samples else "")


def pauli_roundtrip(rng, samples):
    worst = 0.0
    for _ in range(samples):
        rho = random_density_matrix(rng)
        worst = max(worst, float(np.max(np.abs(reconstruct(decompose(rho)) - rho))))
    passed = worst <= ROUNDTRIP_TOL
    return SuiteResult("Pauli round trip", passed, samples, f"max |diff| = {worst:.3e}" if samples else "")


def lemma_checks(thetas=None, epsilons=(0.0, 0.01), alpha=1.0):
    """Gamma growth ratio > 3/2 and gamma >= lambda over a grid of angles and margins."""
    thetas = theta_grid() if thetas is None else thetas
    failures = []
    checked = 0
    for eps in epsilons:
        for theta in thetas:
            p = protocol.ProtocolParams(theta, alpha, eps)
            for report in (protocol.verify_lemma1(p), protocol.verify_lemma2(p)):
                checked += 1
                if not report.passed:
                    failures.append(f"{report.lemma} at theta={theta:.6g}, eps={eps}: {report.detail}")
    return SuiteResult("lemma checks", not failures, checked, "; ".join(failures[:3]))


def sequence_soundness(thetas=None, epsilons=(0.1, 0.01, 0.001), alpha=1.0):
    """Along every run: locality kept, detections only on NPT states, paths agree."""
    thetas = theta_grid(1e-3) if thetas is None else thetas
    failures = []
    checked = 0
    for eps in epsilons:
        for theta in thetas:
            p = protocol.ProtocolParams(theta, alpha, eps)
            try:
                protocol.count_bobs(p)
            except InternalInconsistency as exc:
                failures.append(f"theta={theta:.6g}, eps={eps}: {exc}")
                continue
            for step in protocol.simulate_protocol(p):
                checked += 1
                if step.chsh > 1 + 1e-12:
                    failures.append(f"CHSH {float(step.chsh):.15g} at theta={theta:.6g}, Bob {step.k}")
                if step.witness < 0 and not step.ppt_min < 0:
                    failures.append(f"detection on a PPT state at theta={theta:.6g}, Bob {step.k}")
    return SuiteResult("locality and detection soundness", not failures, checked, "; ".join(failures[:3]))


def run_all(seed=42, samples=100_000, channel_samples=1000):
    rng = np.random.default_rng(seed)
    children = rng.spawn(3)
    return [
        product_nonnegativity(children[0], samples),
        channel_equivalence(children[1], channel_samples),
        pauli_roundtrip(children[2], channel_samples),
        lemma_checks(),
        sequence_soundness(),
    ]
