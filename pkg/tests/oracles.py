"""Reference evaluations kept apart from the package code paths."""

import mpmath


def literal_lambda_sequence(theta, alpha, epsilon, dps, cap=200):
    """The lambda recursion with its products re-multiplied from scratch each step."""
    ctx = mpmath.MPContext()
    ctx.dps = dps
    theta, alpha, epsilon = ctx.mpf(theta), ctx.mpf(alpha), ctx.mpf(epsilon)
    out = []
    while len(out) < cap:
        x_prod, y_prod = ctx.mpf(1), ctx.mpf(1)
        for lam in out:
            c = ctx.sqrt(1 - lam * lam)
            x_prod *= (1 + 2 * c) / 3
            y_prod *= (1 + c) / 3
        lam = (1 + epsilon) * (1 - ctx.cos(theta) * x_prod) / (2 * alpha * ctx.sin(theta) * y_prod)
        out.append(lam)
        if not 0 < lam < 1:
            break
    return out


def literal_count(theta, alpha=1, epsilon="0.01", dps=60):
    return sum(1 for v in literal_lambda_sequence(theta, alpha, epsilon, dps) if 0 < v < 1)


def conjugation_sum_channel(rho, lam):
    """One Bob's update written as a weighted sum of Pauli conjugations on his qubit."""
    import numpy as np

    from seqwitness.pauli_core import PAULI

    c = np.sqrt(1 - lam**2)
    conj = [np.kron(PAULI[0], PAULI[i]) for i in (1, 2, 3)]
    return (
        (3 + 2 * c) / 2 * rho
        + 0.5 * conj[0] @ rho @ conj[0]
        + (1 - c) / 2 * (conj[1] @ rho @ conj[1] + conj[2] @ rho @ conj[2])
    ) / 3
