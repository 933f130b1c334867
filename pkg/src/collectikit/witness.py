"""Collective entanglement witness from single-copy projection probabilities.

Party A projects its two qubits (Ap, As) onto a local product setting while
party B's pair (Bp, Bs) is projected onto the singlet. The five measured
settings are the four computational products plus (+, +). The witness W is
negative only if the encoded two-qubit state is entangled; for product test
states it evaluates from the normalized probability quartet
(p00, p01, p11, p_plus_plus) and the splitting parameter P.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .exceptions import InvariantViolation
from .qmat import DensityMatrix, expectation
from .states import CANONICAL_LAYOUT

COMPLETENESS_TOL = 1e-10
ZERO_COINCIDENCE_EPS = 1e-12
QUARTET_TOL = 1e-9

Setting = tuple  # (i, j) with i, j in {0, 1, "+"}

COMPUTATIONAL_SETTINGS: tuple[Setting, ...] = ((0, 0), (0, 1), (1, 0), (1, 1))
PLUS_SETTING: Setting = ("+", "+")
SETTINGS: tuple[Setting, ...] = COMPUTATIONAL_SETTINGS + (PLUS_SETTING,)

_KETS = {
    0: np.array([1.0, 0.0], dtype=complex),
    1: np.array([0.0, 1.0], dtype=complex),
    "+": np.array([1.0, 1.0], dtype=complex) / np.sqrt(2.0),
}


def local_projector(setting: Setting) -> np.ndarray:
    """Rank-1 projector |i j><i j| on party A's (Ap, As) pair."""
    i, j = setting
    if i not in _KETS or j not in _KETS:
        raise ValueError(f"setting components must be 0, 1 or '+', got {setting}")
    v = np.kron(_KETS[i], _KETS[j])
    return np.outer(v, v.conj())


def singlet_projector() -> np.ndarray:
    """Projector onto (|01> - |10>)/sqrt(2) on party B's (Bp, Bs) pair."""
    v = np.zeros(4, dtype=complex)
    v[1] = 1.0 / np.sqrt(2.0)
    v[2] = -1.0 / np.sqrt(2.0)
    return np.outer(v, v.conj())


@dataclass(frozen=True)
class ProbTable:
    """Joint probabilities of the five settings plus the singlet success rate.

    Completeness ties the fields together: the four computational entries sum
    to singlet_success (both sides count "B lands in the singlet"), and
    p_plus_plus can never exceed it.
    """

    p00: float
    p01: float
    p10: float
    p11: float
    ppp: float
    singlet_success: float

    def __post_init__(self):
        vals = (self.p00, self.p01, self.p10, self.p11, self.ppp, self.singlet_success)
        for v in vals:
            if not 0.0 <= v <= 1.0:
                raise InvariantViolation(f"probability {v} outside [0, 1]")
        total = self.p00 + self.p01 + self.p10 + self.p11
        if abs(total - self.singlet_success) > COMPLETENESS_TOL:
            raise InvariantViolation(
                f"computational settings sum {total} != singlet success {self.singlet_success}"
            )
        if self.ppp > self.singlet_success + COMPLETENESS_TOL:
            raise InvariantViolation(
                f"p++ {self.ppp} exceeds singlet success {self.singlet_success}"
            )

    def as_dict(self) -> dict:
        return {
            "p00": self.p00,
            "p01": self.p01,
            "p10": self.p10,
            "p11": self.p11,
            "ppp": self.ppp,
            "singlet_success": self.singlet_success,
        }


def prob_table(rho: DensityMatrix) -> ProbTable:
    """Measure the five settings on a canonical-layout hyper-entangled state."""
    if rho.layout != CANONICAL_LAYOUT:
        raise ValueError(f"prob_table needs the canonical layout {CANONICAL_LAYOUT.labels}")
    sing = singlet_projector()
    ps = {s: expectation(np.kron(local_projector(s), sing), rho) for s in SETTINGS}
    success = expectation(np.kron(np.eye(4, dtype=complex), sing), rho)
    return ProbTable(
        p00=ps[(0, 0)],
        p01=ps[(0, 1)],
        p10=ps[(1, 0)],
        p11=ps[(1, 1)],
        ppp=ps[PLUS_SETTING],
        singlet_success=success,
    )


class NormalizationPolicy(enum.Enum):
    """How raw joint probabilities become the witness quartet."""

    JOINT = "joint"
    CONDITIONAL = "cond"
    CONDITIONAL_SYMMETRIZED = "cond-sym"
    BASIS = "basis"


DEFAULT_POLICY = NormalizationPolicy.CONDITIONAL_SYMMETRIZED


def normalize_values(
    p00: float,
    p01: float,
    p10: float,
    p11: float,
    ppp: float,
    singlet_success: float,
    policy: NormalizationPolicy = DEFAULT_POLICY,
) -> tuple:
    """Reduce raw setting values to the (p00, p01, p11, ppp) quartet.

    JOINT keeps raw probabilities. CONDITIONAL divides by singlet_success.
    CONDITIONAL_SYMMETRIZED additionally replaces the p01 slot with
    (p01 + p10) / singlet_success, treating the two cross settings as one.
    BASIS divides by the computational-settings sum. Whenever the divisor is
    below 1e-12 the quartet is all zeros (the zero-coincidence convention).

    Takes bare numbers, not a ProbTable, so that empirical frequencies (which
    need not satisfy the exact completeness invariant) can use the same path.
    """
    if policy is NormalizationPolicy.JOINT:
        return (p00, p01, p11, ppp)
    if policy in (NormalizationPolicy.CONDITIONAL, NormalizationPolicy.CONDITIONAL_SYMMETRIZED):
        den = singlet_success
    else:
        den = p00 + p01 + p10 + p11
    if den < ZERO_COINCIDENCE_EPS:
        return (0.0, 0.0, 0.0, 0.0)
    cross = p01 + p10 if policy is NormalizationPolicy.CONDITIONAL_SYMMETRIZED else p01
    return (p00 / den, cross / den, p11 / den, ppp / den)


def normalize(table: ProbTable, policy: NormalizationPolicy = DEFAULT_POLICY) -> tuple:
    """normalize_values applied to a validated ProbTable."""
    return normalize_values(
        table.p00, table.p01, table.p10, table.p11, table.ppp, table.singlet_success, policy
    )


@dataclass(frozen=True)
class WitnessResult:
    """Witness value with the inputs that produced it."""

    w: float
    P: float
    quartet: tuple
    eta: float
    policy: NormalizationPolicy | None = None


def witness_formula(P: float, quartet: tuple, policy: NormalizationPolicy | None = None) -> WitnessResult:
    """Evaluate the witness from a normalized quartet.

    W = ( eta + P^2 (1 - p00) + (1 - P)^2 (1 - p11) + 2 P (1 - P)(1 - p01) - 1 ) / 2
    with eta = 16 P (1 - P) sqrt(p00 p11) + 4 ppp. Exact-pipeline quartets
    stay in [0, 1] (ProbTable enforces that upstream), but conditional
    empirical frequencies can exceed 1 at low statistics because the five
    settings are sampled independently; the formula accepts any finite
    nonnegative entries, clamping only negative rounding dust.
    """
    if not 0.0 <= P <= 1.0:
        raise ValueError(f"P {P} outside [0, 1]")
    if len(quartet) != 4:
        raise ValueError("quartet must have four entries")
    clean = []
    for v in quartet:
        if not -QUARTET_TOL <= v < math.inf:
            raise ValueError(f"quartet entry {v} not a finite nonnegative value")
        clean.append(max(v, 0.0))
    p00, p01, p11, ppp = clean
    eta = 16.0 * P * (1.0 - P) * math.sqrt(p00 * p11) + 4.0 * ppp
    w = 0.5 * (
        eta
        + P**2 * (1.0 - p00)
        + (1.0 - P) ** 2 * (1.0 - p11)
        + 2.0 * P * (1.0 - P) * (1.0 - p01)
        - 1.0
    )
    return WitnessResult(w=w, P=P, quartet=(p00, p01, p11, ppp), eta=eta, policy=policy)


def witness_of_state(
    rho: DensityMatrix, P: float, policy: NormalizationPolicy = DEFAULT_POLICY
) -> WitnessResult:
    """Full pipeline: projection probabilities, normalization, witness formula."""
    return witness_formula(P, normalize(prob_table(rho), policy), policy)


def werner_interpolate(w_bell: float, w_mixed: float, p: float) -> float:
    """Witness of the Werner family from its endpoints: p^2 w_bell + (1 - p^2) w_mixed.

    Exact because the five probabilities are bilinear in the two copies and
    the cross terms of the Werner mixture reproduce the fully mixed table.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"werner weight {p} outside [0, 1]")
    return p**2 * w_bell + (1.0 - p**2) * w_mixed


def detection_threshold(w_bell: float, w_mixed: float) -> float:
    """Werner weight above which the interpolated witness turns negative.

    Requires w_bell < 0 < w_mixed; the zero crossing is
    sqrt(w_mixed / (w_mixed - w_bell)).
    """
    if not (w_bell < 0.0 < w_mixed):
        raise ValueError(f"need w_bell < 0 < w_mixed, got {w_bell}, {w_mixed}")
    return math.sqrt(w_mixed / (w_mixed - w_bell))
