"""Finite-statistics layer: sampled coincidence counts and bootstrap errors.

Each of the five settings gets its own trial budget of n_pairs photon pairs
(equal integration time per setting), so counts are independent binomials.
The witness estimate feeds empirical frequencies through the same
normalization and formula as the exact pipeline; its uncertainty is the
bootstrap standard deviation, labeled as such everywhere.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import InvariantViolation
from .states import MIXED, hes_state
from .witness import (
    DEFAULT_POLICY,
    NormalizationPolicy,
    ProbTable,
    normalize_values,
    prob_table,
    witness_formula,
)

DEFAULT_RESAMPLES = 1000
SIGMA_TARGET = 0.03
CALIBRATION_SEED = 97
# fixed stream offset separating bootstrap draws from the sampling stream
_BOOTSTRAP_STREAM = 0xB00


@dataclass(frozen=True)
class CountRecord:
    """Per-setting coincidence counts out of n_pairs trials each."""

    n00: int
    n01: int
    n10: int
    n11: int
    npp: int
    n_pairs: int
    seed: int

    def __post_init__(self):
        if self.n_pairs < 0:
            raise ValueError(f"n_pairs {self.n_pairs} negative")
        for name in ("n00", "n01", "n10", "n11", "npp"):
            n = getattr(self, name)
            if not 0 <= n <= self.n_pairs:
                raise InvariantViolation(f"{name} = {n} outside 0..{self.n_pairs}")

    def counts(self) -> tuple:
        return (self.n00, self.n01, self.n10, self.n11, self.npp)


@dataclass(frozen=True)
class WitnessEstimate:
    """Witness point estimate with its bootstrap standard deviation."""

    value: float
    std_error: float
    n_pairs: int
    policy: NormalizationPolicy
    P: float
    bootstrap_resamples: int

    def __post_init__(self):
        if self.std_error < 0.0:
            raise InvariantViolation(f"negative std_error {self.std_error}")


def sample_counts(table: ProbTable, n_pairs: int, seed: int) -> CountRecord:
    """Draw one count record; identical inputs give identical records."""
    if n_pairs < 0:
        raise ValueError(f"n_pairs {n_pairs} negative")
    rng = np.random.default_rng(seed)
    draws = [
        int(rng.binomial(n_pairs, p))
        for p in (table.p00, table.p01, table.p10, table.p11, table.ppp)
    ]
    return CountRecord(*draws, n_pairs=n_pairs, seed=seed)


def _witness_from_counts(counts: tuple, n_pairs: int, P: float, policy: NormalizationPolicy) -> float:
    freqs = [n / n_pairs for n in counts]
    success = freqs[0] + freqs[1] + freqs[2] + freqs[3]
    quartet = normalize_values(*freqs, success, policy)
    return witness_formula(P, quartet, policy).w


def bootstrap_std(
    record: CountRecord,
    P: float,
    policy: NormalizationPolicy = DEFAULT_POLICY,
    resamples: int = DEFAULT_RESAMPLES,
) -> float:
    """Standard deviation of the witness over binomial resamples.

    Each setting is resampled from its empirical frequency; the generator is
    derived from the record's seed, so the result is a pure function of the
    record and the arguments.
    """
    if resamples < 2:
        raise ValueError(f"resamples {resamples} below 2")
    if record.n_pairs == 0:
        return 0.0
    rng = np.random.default_rng([record.seed, _BOOTSTRAP_STREAM])
    n = record.n_pairs
    redraws = [rng.binomial(n, count / n, size=resamples) for count in record.counts()]
    values = [
        _witness_from_counts(tuple(int(r[b]) for r in redraws), n, P, policy)
        for b in range(resamples)
    ]
    return float(np.std(values))


def estimate_witness(
    record: CountRecord,
    P: float,
    policy: NormalizationPolicy = DEFAULT_POLICY,
    resamples: int = DEFAULT_RESAMPLES,
) -> WitnessEstimate | None:
    """Empirical witness with bootstrap error; None when there is no data."""
    if record.n_pairs == 0:
        return None
    value = _witness_from_counts(record.counts(), record.n_pairs, P, policy)
    std = bootstrap_std(record, P, policy, resamples)
    return WitnessEstimate(
        value=value,
        std_error=std,
        n_pairs=record.n_pairs,
        policy=policy,
        P=P,
        bootstrap_resamples=resamples,
    )


def calibrate_default_pairs(
    target_sigma: float = SIGMA_TARGET,
    policy: NormalizationPolicy = DEFAULT_POLICY,
    P: float = 0.5,
    max_exponent: int = 6,
) -> int:
    """Smallest power of ten whose bootstrap sigma stays at or below target.

    Calibrated on the fully mixed state: it has the largest bootstrap sigma
    of the canonical states, while degenerate records (all-or-nothing counts
    at tiny n_pairs) report a spurious sigma of zero. Taking ten times the
    largest violating power therefore anchors the default on the monotone
    large-n regime.
    """
    if target_sigma <= 0.0:
        raise ValueError(f"target_sigma {target_sigma} must be positive")
    table = prob_table(hes_state(MIXED))
    worst = -1
    for exponent in range(max_exponent + 1):
        n_pairs = 10**exponent
        record = sample_counts(table, n_pairs, seed=CALIBRATION_SEED + exponent)
        if bootstrap_std(record, P, policy) > target_sigma:
            worst = exponent
    if worst == max_exponent:
        raise InvariantViolation(f"sigma target {target_sigma} unreachable within 10^{max_exponent}")
    return 10 ** (worst + 1)
