"""Canonical two-qubit test states and their two-copy hyper-entangled products.

A hyper-entangled pair carries the same two-qubit state twice, once in the
polarization degree of freedom (qubits Ap, Bp) and once in the spatial one
(qubits As, Bs). The canonical register order is (Ap, As, Bp, Bs): party A's
two qubits first, then party B's.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .qmat import DensityMatrix, QubitLayout, permute, tensor

POLARIZATION_PAIR = QubitLayout(("Ap", "Bp"))
SPATIAL_PAIR = QubitLayout(("As", "Bs"))
CANONICAL_LAYOUT = QubitLayout(("Ap", "As", "Bp", "Bs"))

_KINDS = ("bell", "separable", "mixed", "werner")


@dataclass(frozen=True)
class CanonicalState:
    """One of the test states: bell, separable, mixed, or werner with weight p."""

    kind: str
    weight: float | None = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown state kind {self.kind!r}, expected one of {_KINDS}")
        if self.kind == "werner":
            if self.weight is None:
                raise ValueError("werner state needs a weight")
            if not 0.0 <= self.weight <= 1.0:
                raise ValueError(f"werner weight {self.weight} outside [0, 1]")
        elif self.weight is not None:
            raise ValueError(f"{self.kind} state takes no weight")

    @classmethod
    def parse(cls, text: str) -> "CanonicalState":
        """Parse CLI syntax: 'bell', 'separable', 'mixed', or 'werner:p'."""
        if text.startswith("werner:"):
            try:
                p = float(text.split(":", 1)[1])
            except ValueError:
                raise ValueError(f"bad werner weight in {text!r}") from None
            return cls("werner", p)
        return cls(text)

    def label(self) -> str:
        if self.kind == "werner":
            return f"werner:{self.weight!r}"
        return self.kind


BELL = CanonicalState("bell")
SEPARABLE = CanonicalState("separable")
MIXED = CanonicalState("mixed")


def werner(p: float) -> CanonicalState:
    return CanonicalState("werner", p)


def _bell_matrix() -> np.ndarray:
    # (|00> + |11>) / sqrt(2), big-endian indices 0 and 3
    v = np.zeros(4, dtype=complex)
    v[0] = v[3] = 1.0 / np.sqrt(2.0)
    return np.outer(v, v.conj())


def single_copy(state: CanonicalState, layout: QubitLayout) -> DensityMatrix:
    """The two-qubit state on a (party A qubit, party B qubit) layout.

    bell is (|00> + |11>)/sqrt(2); separable is |10> (A carries 1, B carries
    0); mixed is I/4; werner with weight p is p bell + (1 - p) I/4.
    """
    if layout.n_qubits != 2:
        raise ValueError("single_copy needs a two-qubit layout")
    if state.kind == "bell":
        m = _bell_matrix()
    elif state.kind == "separable":
        m = np.zeros((4, 4), dtype=complex)
        m[2, 2] = 1.0
    elif state.kind == "mixed":
        m = np.eye(4, dtype=complex) / 4.0
    else:
        m = state.weight * _bell_matrix() + (1.0 - state.weight) * np.eye(4) / 4.0
    return DensityMatrix(m, layout)


def hes_product(rho_p: DensityMatrix, rho_s: DensityMatrix) -> DensityMatrix:
    """Tensor a polarization copy with a spatial copy, in canonical order.

    rho_p must live on (Ap, Bp) and rho_s on (As, Bs); the product is
    reordered to (Ap, As, Bp, Bs).
    """
    if rho_p.layout != POLARIZATION_PAIR:
        raise ValueError(f"polarization copy must use layout {POLARIZATION_PAIR.labels}")
    if rho_s.layout != SPATIAL_PAIR:
        raise ValueError(f"spatial copy must use layout {SPATIAL_PAIR.labels}")
    return permute(tensor(rho_p, rho_s), CANONICAL_LAYOUT)


def hes_state(state: CanonicalState) -> DensityMatrix:
    """Hyper-entangled product carrying ``state`` in both degrees of freedom."""
    return hes_product(
        single_copy(state, POLARIZATION_PAIR), single_copy(state, SPATIAL_PAIR)
    )


def _sector_dephase(rho: DensityMatrix, visibility: float, bit_hi: int, bit_lo: int) -> DensityMatrix:
    if rho.layout != CANONICAL_LAYOUT:
        raise ValueError(f"dephasing needs the canonical layout {CANONICAL_LAYOUT.labels}")
    if not 0.0 <= visibility <= 1.0:
        raise ValueError(f"visibility {visibility} outside [0, 1]")
    idx = np.arange(16)
    sector = 2 * ((idx >> bit_hi) & 1) + ((idx >> bit_lo) & 1)
    mask = np.where(sector[:, None] == sector[None, :], 1.0, visibility)
    return DensityMatrix(rho.matrix * mask, CANONICAL_LAYOUT)


def dephase_spatial(rho: DensityMatrix, visibility: float) -> DensityMatrix:
    """Scale coherences between different (As, Bs) sectors by ``visibility``.

    visibility 1 is the identity; 0 removes all spatial-sector coherence.
    Applying v1 then v2 equals applying v1 * v2.
    """
    # canonical order (Ap, As, Bp, Bs): As is bit 2, Bs is bit 0
    return _sector_dephase(rho, visibility, 2, 0)


def dephase_polarization(rho: DensityMatrix, visibility: float) -> DensityMatrix:
    """Polarization analogue of :func:`dephase_spatial`, over (Ap, Bp) sectors."""
    return _sector_dephase(rho, visibility, 3, 1)
