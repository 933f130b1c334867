"""Collective entanglement witness simulator for hyper-entangled photon pairs."""

from .counts import (
    CountRecord,
    WitnessEstimate,
    bootstrap_std,
    calibrate_default_pairs,
    estimate_witness,
    sample_counts,
)
from .exceptions import InvariantViolation
from .optics import (
    TwoPhotonState,
    coincidence_probability,
    encode_logical,
    evolve,
    phase_scan,
    prepare_canonical,
    ratio_R,
    simulate_settings,
)
from .qmat import DensityMatrix, QubitLayout, partial_trace, permute, purity, tensor
from .states import (
    BELL,
    CANONICAL_LAYOUT,
    MIXED,
    SEPARABLE,
    CanonicalState,
    dephase_polarization,
    dephase_spatial,
    hes_product,
    hes_state,
    single_copy,
    werner,
)
from .witness import (
    DEFAULT_POLICY,
    NormalizationPolicy,
    ProbTable,
    WitnessResult,
    detection_threshold,
    normalize,
    prob_table,
    werner_interpolate,
    witness_formula,
    witness_of_state,
)

__version__ = "0.1.0"

__all__ = [
    "BELL",
    "CANONICAL_LAYOUT",
    "CanonicalState",
    "CountRecord",
    "DEFAULT_POLICY",
    "DensityMatrix",
    "InvariantViolation",
    "MIXED",
    "NormalizationPolicy",
    "ProbTable",
    "QubitLayout",
    "SEPARABLE",
    "TwoPhotonState",
    "WitnessEstimate",
    "WitnessResult",
    "bootstrap_std",
    "calibrate_default_pairs",
    "coincidence_probability",
    "dephase_polarization",
    "dephase_spatial",
    "detection_threshold",
    "encode_logical",
    "estimate_witness",
    "evolve",
    "hes_product",
    "hes_state",
    "normalize",
    "partial_trace",
    "permute",
    "phase_scan",
    "prepare_canonical",
    "prob_table",
    "purity",
    "ratio_R",
    "sample_counts",
    "simulate_settings",
    "single_copy",
    "tensor",
    "werner",
    "werner_interpolate",
    "witness_formula",
    "witness_of_state",
]
