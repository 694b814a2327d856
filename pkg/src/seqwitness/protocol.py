"""Sequential witnessing: one Alice, a chain of Bobs measuring unsharply.

Alice and the first Bob share the Bell-diagonal state with correlation tensor
``diag(-cos(theta), -alpha sin(theta), -beta sin(theta))`` (``beta = alpha``
unless given).  Every Bob picks one of three settings with probability 1/3:
a sharp x measurement, or y/z measurements of sharpness ``lam_k``.  He then
passes his qubit on, updated by the Lüders rule with the outcome unread.

The sharpness iterations and the exact trajectory use a private mpmath
context.  In the interesting regime the count of Bobs grows only like
``log2 log(1/theta)``, so the angles involved lie far below the double
range (about ``1e-50000`` for twenty Bobs).
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from typing import Optional

import mpmath
import numpy as np

from seqwitness import criteria
from seqwitness.errors import (
    InternalInconsistency,
    InvalidParams,
    InvalidSharpness,
    NotFound,
)
from seqwitness.pauli_core import (
    PAULI,
    PSD_TOL,
    TwoQubitState,
    eigenvalues_hermitian4,
    partial_transpose_bob_matrix,
    reconstruct,
    spectrum,
)

WORKING_DPS = 30
DEFAULT_MAX_BOBS = 10**6
# Decimal inputs like 0.7853981634 overshoot pi/4 by a few 1e-12.
THETA_SNAP = 1e-9
# Relative agreement required between analytic and simulated sharpnesses.
PATH_RTOL = 1e-9
# Smallest witness margin at which the float64 trajectory is also run.
FLOAT_MARGIN = 1e-9
# Allowed gap between the float64 replay and the exact trajectory.
FLOAT_STATE_ATOL = 1e-12
# Bisection runs on u = log(log(1/theta)); u = 200 means theta ~ 10**(-3e86).
LOGLOG_MAX = 200.0

REACHED_CAP = "reached_cap"
ESCAPED = "escaped_unit_interval"

mp = mpmath.MPContext()
mp.dps = WORKING_DPS


def to_mpf(x):
    return mp.convert(x)


def working_prec(theta):
    """Bits needed to follow the recursion at angle ``theta``.

    Each Bob roughly squares the previous sharpness, doubling its relative
    error, and a run lasts about log2(ln(1/theta)) Bobs; two bits per
    expected Bob on top of 100 keeps both computation paths well inside
    ``PATH_RTOL`` of each other.
    """
    ln_inv = -mp.log(to_mpf(theta))
    expected = mp.log(max(ln_inv, 1), 2) + 16
    return 100 + 2 * int(expected)


def _in_working_precision(func):
    @functools.wraps(func)
    def wrapper(p, *args, **kwargs):
        with mp.workprec(working_prec(p.theta)):
            return func(p, *args, **kwargs)

    return wrapper


def entanglement_bound(theta):
    """Smallest alpha for which the initial state is entangled: (1 - cos t) / (2 sin t)."""
    return mp.tan(to_mpf(theta) / 2) / 2


@dataclass(frozen=True)
class ProtocolParams:
    """Angle, state weights and margin of one protocol run.

    ``theta`` may be a float, a decimal string or an mpf; it is kept as an
    mpf so that angles below the double range survive.  ``epsilon`` may be 0
    for the sharpness iterations but :func:`count_bobs` needs it positive.
    """

    theta: object
    alpha: object = 1.0
    epsilon: object = 0.01
    beta: object = None
    max_bobs: int = DEFAULT_MAX_BOBS

    def __post_init__(self):
        try:
            theta = to_mpf(self.theta)
            alpha = to_mpf(self.alpha)
            epsilon = to_mpf(self.epsilon)
            beta = None if self.beta is None else to_mpf(self.beta)
        except (TypeError, ValueError) as exc:
            raise InvalidParams(f"non-numeric parameter: {exc}") from None
        quarter_pi = mp.pi / 4
        if quarter_pi < theta <= quarter_pi + THETA_SNAP:
            theta = quarter_pi
        if not 0 < theta <= quarter_pi:
            raise InvalidParams(f"theta must lie in (0, pi/4], got {mp.nstr(theta, 17)}")
        bound = entanglement_bound(theta)
        if not bound < alpha <= 1:
            raise InvalidParams(
                f"alpha must lie in ((1 - cos theta)/(2 sin theta), 1] = "
                f"({mp.nstr(bound, 17)}, 1], got {mp.nstr(alpha, 17)}"
            )
        if not epsilon >= 0:
            raise InvalidParams(f"epsilon must be nonnegative, got {mp.nstr(epsilon, 17)}")
        if beta is not None and not 0 < beta < alpha:
            raise InvalidParams(
                f"beta must lie in (0, alpha) = (0, {mp.nstr(alpha, 17)}), got {mp.nstr(beta, 17)}"
            )
        if int(self.max_bobs) < 1:
            raise InvalidParams(f"max_bobs must be positive, got {self.max_bobs}")
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "epsilon", epsilon)
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "max_bobs", int(self.max_bobs))

    @property
    def z_weight(self):
        return self.alpha if self.beta is None else self.beta

    @property
    def mean_weight(self):
        """(alpha + beta)/2: the weight the y/z witness terms see."""
        return (self.alpha + self.z_weight) / 2


def make_initial_state(p: ProtocolParams) -> TwoQubitState:
    theta = float(p.theta)
    s = math.sin(theta)
    return TwoQubitState.bell_diagonal(-math.cos(theta), -float(p.alpha) * s, -float(p.alpha) * s)


def make_initial_state_asymmetric(p: ProtocolParams) -> TwoQubitState:
    """Initial state with different y and z weights (alpha, beta).

    Positivity needs ``(alpha - beta) sin(theta) <= 1 - cos(theta)``, so beta
    has to approach alpha as theta shrinks.
    """
    if p.beta is None:
        raise InvalidParams("the asymmetric state needs beta")
    lowest = ExactBellState.initial(p).spectrum()[0]
    if lowest < -PSD_TOL:
        raise InvalidParams(
            f"state is not positive semidefinite (min eigenvalue {mp.nstr(lowest, 6)}); "
            "beta must satisfy (alpha - beta) sin(theta) <= 1 - cos(theta)"
        )
    theta = float(p.theta)
    s = math.sin(theta)
    return TwoQubitState.bell_diagonal(-math.cos(theta), -float(p.alpha) * s, -float(p.beta) * s)


def initial_state(p: ProtocolParams) -> TwoQubitState:
    return make_initial_state(p) if p.beta is None else make_initial_state_asymmetric(p)


@dataclass(frozen=True)
class PovmEffect:
    """The effect (I + lam sigma_axis)/2 of an unsharp spin measurement."""

    axis: int
    sharpness: float

    def __post_init__(self):
        if self.axis not in (1, 2, 3):
            raise ValueError(f"axis must be 1, 2 or 3, got {self.axis}")
        if not 0.0 <= self.sharpness <= 1.0:
            raise InvalidSharpness(f"sharpness must lie in [0, 1], got {self.sharpness}")

    def effect(self):
        return (PAULI[0] + self.sharpness * PAULI[self.axis]) / 2

    def complement(self):
        return PAULI[0] - self.effect()

    def kraus_pair(self):
        """Square roots of the effect and of its complement, a I +- b sigma."""
        lam = float(self.sharpness)
        up, down = math.sqrt(1 + lam), math.sqrt(1 - lam)
        a = (up + down) / (2 * math.sqrt(2))
        b = (up - down) / (2 * math.sqrt(2))
        sigma = PAULI[self.axis]
        return a * PAULI[0] + b * sigma, a * PAULI[0] - b * sigma


def bob_settings(lam):
    return (PovmEffect(1, 1.0), PovmEffect(2, lam), PovmEffect(3, lam))


def _check_sharpness(lam):
    if not 0.0 < lam <= 1.0:
        raise InvalidSharpness(f"Bob's sharpness must lie in (0, 1], got {lam}")


def bob_channel_factors(lam):
    """How much one Bob shrinks his x and his y/z Bloch components."""
    c = math.sqrt((1.0 - lam) * (1.0 + lam))
    return (1 + 2 * c) / 3, (1 + c) / 3


def apply_bob_channel(state: TwoQubitState, lam) -> TwoQubitState:
    """Unread Lüders update of one Bob, on Pauli coefficients."""
    lam = float(lam)
    _check_sharpness(lam)
    fx, fyz = bob_channel_factors(lam)
    scale = np.array([fx, fyz, fyz])
    return TwoQubitState(state.m * scale, state.n, state.T * scale)


def apply_bob_channel_matrix(rho, lam) -> np.ndarray:
    """Unread Lüders update of one Bob, on a dense 4x4 matrix or a stack of them."""
    lam = float(lam)
    _check_sharpness(lam)
    rho = np.asarray(rho, dtype=complex)
    out = np.zeros(rho.shape, dtype=complex)
    for setting in bob_settings(lam):
        for k in setting.kraus_pair():
            kk = np.kron(PAULI[0], k)
            out += kk @ rho @ kk
    return out / 3


@dataclass(frozen=True)
class SharpnessSequence:
    """Iterated sharpness values, the first ``valid_length`` of them in (0, 1).

    When the run ended by escaping the unit interval the escaping value is
    kept as the last entry of ``values``.
    """

    values: tuple
    valid_length: int
    terminated_reason: str

    @property
    def valid_values(self):
        return self.values[: self.valid_length]

    def as_floats(self):
        return [float(v) for v in self.values]


def _iterate(first_numerator, denominator_scale, next_terms, cap):
    """Shared driver for the lambda and gamma recursions.

    ``next_terms(x)`` returns the log-increments of the two running products
    after a value ``x``; the k-th value is ``first_numerator(L1) /
    (denominator_scale * exp(L2))``.
    """
    values = []
    log_num = mp.zero
    log_den = mp.zero
    while len(values) < cap:
        x = first_numerator(log_num) / (denominator_scale * mp.exp(log_den))
        values.append(x)
        if not 0 < x < 1:
            return SharpnessSequence(tuple(values), len(values) - 1, ESCAPED)
        d_num, d_den = next_terms(x)
        log_num += d_num
        log_den += d_den
    return SharpnessSequence(tuple(values), len(values), REACHED_CAP)


@_in_working_precision
def lambda_sequence(p: ProtocolParams) -> SharpnessSequence:
    """Smallest detecting sharpnesses, inflated by (1 + epsilon).

    lam_k = (1 + eps) (1 - cos(t) X_k) / (2 alpha sin(t) Y_k), with
    X_k = prod_{i<k} (1 + 2 c_i)/3, Y_k = prod_{i<k} (1 + c_i)/3 and
    c_i = sqrt(1 - lam_i^2).  Both products are accumulated as logarithms
    and ``1 - cos(t) X_k`` is formed from complements, so nothing cancels
    as theta -> 0.
    """
    theta = p.theta
    half_chord = 2 * mp.sin(theta / 2) ** 2
    cos_t = mp.cos(theta)
    scale = 2 * p.mean_weight * mp.sin(theta) / (1 + p.epsilon)

    def numerator(log_x):
        return half_chord - cos_t * mp.expm1(log_x)

    def terms(lam):
        c = mp.sqrt((1 - lam) * (1 + lam))
        return mp.log1p(-2 * lam * lam / (3 * (1 + c))), mp.log((1 + c) / 3)

    return _iterate(numerator, scale, terms, p.max_bobs)


@_in_working_precision
def gamma_sequence(p: ProtocolParams) -> SharpnessSequence:
    """Upper-bounding companion of :func:`lambda_sequence`.

    gamma_k = (1 + eps) 3^(k-1) (1 - (1 - t^2/2) Q_k) / (alpha t D_k) with
    Q_k = prod_{i<k} (1 - 2 gamma_i^2/3) and D_k = prod_{i<k} (2 - gamma_i^2).
    The 3^(k-1) is folded into D_k as prod (2 - gamma_i^2)/3.
    """
    theta = p.theta
    quad = theta * theta / 2
    scale = p.mean_weight * theta / (1 + p.epsilon)

    def numerator(log_q):
        return quad - (1 - quad) * mp.expm1(log_q)

    def terms(g):
        return mp.log1p(-2 * g * g / 3), mp.log((2 - g * g) / 3)

    return _iterate(numerator, scale, terms, p.max_bobs)


@dataclass(frozen=True)
class ExactBellState:
    """Bell-diagonal state in working precision, with 1 + t_x stored apart.

    The x correlation sits within ~theta^2 of -1 throughout the protocol, so
    keeping its complement is what lets the trajectory resolve witness
    values for arbitrarily small angles.
    """

    one_plus_tx: object
    ty: object
    tz: object

    @classmethod
    def initial(cls, p: ProtocolParams):
        s = mp.sin(p.theta)
        return cls(2 * mp.sin(p.theta / 2) ** 2, -p.alpha * s, -p.z_weight * s)

    @property
    def tx(self):
        return self.one_plus_tx - 1

    def spectrum(self):
        d, ty, tz = self.one_plus_tx, self.ty, self.tz
        return sorted([(2 - d - ty - tz) / 4, (2 - d + ty + tz) / 4, (d - ty + tz) / 4, (d + ty - tz) / 4])

    def pt_spectrum(self):
        # transpose on Bob flips t_y
        return ExactBellState(self.one_plus_tx, -self.ty, self.tz).spectrum()

    def ppt_min(self):
        return self.pt_spectrum()[0]

    def chsh(self):
        sq = sorted([self.tx**2, self.ty**2, self.tz**2], reverse=True)
        return sq[0] + sq[1]

    def witness(self, lam):
        """<W> for sharpness (1, lam, lam)."""
        return (self.one_plus_tx + lam * (self.ty + self.tz)) / 4

    def detection_threshold(self):
        """Sharpness at which the witness expectation crosses zero."""
        return self.one_plus_tx / -(self.ty + self.tz)

    def after_bob(self, lam):
        c = mp.sqrt((1 - lam) * (1 + lam))
        fx = (1 + 2 * c) / 3
        fyz = (1 + c) / 3
        lost_x = 2 * lam * lam / (3 * (1 + c))
        return ExactBellState(self.one_plus_tx * fx + lost_x, self.ty * fyz, self.tz * fyz)

    def to_state(self):
        return TwoQubitState.bell_diagonal(float(self.tx), float(self.ty), float(self.tz))


@dataclass(frozen=True)
class BobStep:
    """What Bob k sees: sharpness used, witness value and state diagnostics."""

    k: int
    lam: object
    threshold: object
    witness: object
    ppt_min: object
    chsh: object
    state: ExactBellState = field(repr=False)


@_in_working_precision
def simulate_protocol(p: ProtocolParams, lambdas=None):
    """Evolve the shared state Bob by Bob.

    Without ``lambdas`` each Bob reads his sharpness off the current state,
    ``(1 + epsilon)`` times the zero crossing of the witness, independently
    of the closed-form recursion.  The run stops at the first sharpness
    outside (0, 1) or after ``max_bobs`` Bobs.
    """
    state = ExactBellState.initial(p)
    steps = []
    for k in range(1, p.max_bobs + 1):
        threshold = state.detection_threshold()
        if lambdas is None:
            lam = (1 + p.epsilon) * threshold
        elif k <= len(lambdas):
            lam = to_mpf(lambdas[k - 1])
        else:
            break
        if not 0 < lam < 1:
            break
        steps.append(BobStep(k, lam, threshold, state.witness(lam), state.ppt_min(), state.chsh(), state))
        state = state.after_bob(lam)
    return steps


def dense_trajectory(p: ProtocolParams, lambdas):
    """Float64 run on explicit matrices: Lüders Kraus maps, W matrix, Jacobi PT spectrum.

    Returns ``(witness, ppt_min, rho)`` per Bob, before his measurement.
    """
    rho = reconstruct(initial_state(p))
    out = []
    for lam in lambdas:
        w = criteria.witness_matrix(criteria.Witness.for_bob(float(lam)))
        value = float(np.trace(w @ rho).real)
        ppt = float(eigenvalues_hermitian4(partial_transpose_bob_matrix(rho))[0])
        out.append((value, ppt, rho))
        rho = apply_bob_channel_matrix(rho, float(lam))
    return out


def _float_resolvable(p: ProtocolParams):
    return float(p.epsilon * 2 * mp.sin(p.theta / 2) ** 2 / 4) > FLOAT_MARGIN


@_in_working_precision
def count_bobs(p: ProtocolParams) -> int:
    """Number of Bobs that detect entanglement, checked along two paths.

    The closed-form recursion gives the count; :func:`simulate_protocol`
    recomputes it from the evolving state.  The counts must agree exactly,
    the sharpnesses to ``PATH_RTOL``, and every Bob in range must see a
    negative witness and a negative partial-transpose eigenvalue.  When
    double precision can resolve the witness margin the float64 library path
    (tensor channel, witness expectation, PPT test) is replayed as well and
    must track the exact state to ``FLOAT_STATE_ATOL``.

    Raises:
        InvalidParams: for ``epsilon == 0``, where detection is not strict.
        InternalInconsistency: if any of the paths disagree.
    """
    if not p.epsilon > 0:
        raise InvalidParams("counting Bobs needs epsilon > 0")
    seq = lambda_sequence(p)
    steps = simulate_protocol(p)
    n = seq.valid_length
    if len(steps) != n:
        raise InternalInconsistency(f"recursion counts {n} Bobs, state evolution counts {len(steps)}")
    for step, lam in zip(steps, seq.valid_values):
        if abs(step.lam - lam) > PATH_RTOL * abs(lam):
            raise InternalInconsistency(
                f"Bob {step.k}: recursion gives sharpness {mp.nstr(lam, 17)}, "
                f"state evolution {mp.nstr(step.lam, 17)}"
            )
        if not (step.witness < 0 and step.state.witness(lam) < 0):
            raise InternalInconsistency(f"Bob {step.k}: witness does not detect")
        if not step.ppt_min < 0:
            raise InternalInconsistency(f"Bob {step.k}: witness fires on a PPT state")
    if _float_resolvable(p):
        state = initial_state(p)
        for step in steps:
            if not state.allclose(step.state.to_state(), atol=FLOAT_STATE_ATOL):
                raise InternalInconsistency(f"Bob {step.k}: float64 replay drifted from the exact state")
            value = criteria.witness_expectation(criteria.Witness.for_bob(float(step.lam)), state)
            if not (value < 0 and criteria.ppt_min_eigenvalue(state) < -PSD_TOL):
                raise InternalInconsistency(f"Bob {step.k}: float64 replay does not detect")
            state = apply_bob_channel(state, float(step.lam))
    return n


def find_theta_for_n(n, alpha=1.0, epsilon=0.01, max_iter=60, loglog_max=LOGLOG_MAX):
    """An angle at which at least ``n`` Bobs detect entanglement.

    Bisects on ``u = log(log(1/theta))`` between the largest admissible angle
    and ``theta = exp(-exp(loglog_max))``; counts are nonincreasing in theta
    and that is checked at every probe.  The returned angle is confirmed
    with :func:`count_bobs`.

    Raises:
        NotFound: if even the smallest angle gives fewer than ``n`` Bobs;
            ``best`` carries the count reached there.
    """
    n = int(n)
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    alpha = to_mpf(alpha)
    top = mp.pi / 4
    if not entanglement_bound(top) < alpha:
        # keep strictly inside alpha > tan(theta/2)/2
        top = 2 * mp.atan(2 * alpha) * (1 - mp.mpf("1e-12"))

    def params(u):
        return ProtocolParams(mp.exp(-mp.exp(u)), alpha, epsilon, max_bobs=n)

    def count(u):
        return lambda_sequence(params(u)).valid_length

    u_hi = mp.log(-mp.log(top))
    c_hi = count(u_hi)
    if c_hi < n:
        u_lo = to_mpf(loglog_max)
        c_lo = count(u_lo)
        if c_lo < n:
            raise NotFound(
                f"fewer than {n} Bobs even at theta = exp(-exp({loglog_max})); best count {c_lo}",
                best=c_lo,
            )
        # u_lo: small theta, count >= n; u_hi: large theta, count < n
        for _ in range(max_iter):
            u_mid = (u_lo + u_hi) / 2
            c_mid = count(u_mid)
            if not c_hi <= c_mid <= c_lo:
                raise InternalInconsistency(
                    f"count not monotone in theta: {c_mid} between {c_hi} and {c_lo}"
                )
            if c_mid >= n:
                u_lo, c_lo = u_mid, c_mid
            else:
                u_hi, c_hi = u_mid, c_mid
        p = params(u_lo)
    else:
        p = ProtocolParams(top, alpha, epsilon, max_bobs=n)
    if count_bobs(p) < n:
        raise InternalInconsistency(f"verified count at the returned angle is below {n}")
    return p.theta


@dataclass(frozen=True)
class LemmaReport:
    lemma: str
    passed: bool
    checked: int
    first_violation: Optional[int] = None
    detail: str = ""


def verify_lemma1(p: ProtocolParams) -> LemmaReport:
    """gamma_k strictly increasing with gamma_{k+1}/gamma_k > 3/2 on its valid range."""
    seq = gamma_sequence(p)
    g = seq.valid_values
    for k in range(1, len(g)):
        ratio = g[k] / g[k - 1]
        if not (g[k] > g[k - 1] and ratio > mp.mpf(3) / 2):
            return LemmaReport("lemma1", False, k, k, f"gamma_{k + 1}/gamma_{k} = {mp.nstr(ratio, 17)}")
    return LemmaReport("lemma1", True, max(len(g) - 1, 0))


def verify_lemma2(p: ProtocolParams) -> LemmaReport:
    """gamma_k >= lambda_k wherever both are in (0, 1)."""
    lam = lambda_sequence(p).valid_values
    gam = gamma_sequence(p).valid_values
    overlap = min(len(lam), len(gam))
    for k in range(overlap):
        if not gam[k] >= lam[k]:
            return LemmaReport(
                "lemma2",
                False,
                k + 1,
                k + 1,
                f"gamma_{k + 1} = {mp.nstr(gam[k], 17)} < lambda_{k + 1} = {mp.nstr(lam[k], 17)}",
            )
    return LemmaReport("lemma2", True, overlap)
