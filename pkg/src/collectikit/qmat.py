"""Dense density matrices over small labeled qubit registers.

Everything in scope lives on at most four qubits (16 x 16), so operations are
plain dense numpy with full validation at construction time. Registers are
ordered big-endian: for labels (q0, q1, ..., qn-1) the basis index of
|b0 b1 ... bn-1> is sum(b_k * 2**(n-1-k)), with b0 the qubit named first.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import InvariantViolation

# Validation tolerances. PSD uses a looser floor than hermiticity/trace
# because eigenvalues of nearly degenerate matrices carry more float noise.
HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = 1e-10
IMAG_TOL = 1e-10

ComplexMatrix = np.ndarray


@dataclass(frozen=True)
class QubitLayout:
    """Ordered, uniquely labeled qubits of a register."""

    labels: tuple[str, ...]

    def __post_init__(self):
        if len(self.labels) == 0:
            raise ValueError("layout needs at least one qubit")
        if len(set(self.labels)) != len(self.labels):
            raise ValueError(f"duplicate qubit labels: {self.labels}")

    @property
    def n_qubits(self) -> int:
        return len(self.labels)

    @property
    def dim(self) -> int:
        return 2 ** len(self.labels)


class DensityMatrix:
    """A validated density matrix bound to a :class:`QubitLayout`.

    Parameters
    ----------
    matrix : array_like
        Square complex matrix of dimension ``layout.dim``.
    layout : QubitLayout
        Qubit labels in register order.

    Raises
    ------
    InvariantViolation
        If the matrix is not Hermitian within 1e-12 entrywise, its trace
        deviates from 1 by more than 1e-12, or its smallest eigenvalue is
        below -1e-10. Negative eigenvalues are rejected, never clipped.
    """

    __slots__ = ("matrix", "layout")

    def __init__(self, matrix, layout: QubitLayout):
        m = np.array(matrix, dtype=complex)
        if m.shape != (layout.dim, layout.dim):
            raise ValueError(
                f"matrix shape {m.shape} does not match layout dim {layout.dim}"
            )
        if np.max(np.abs(m - m.conj().T)) > HERMITIAN_TOL:
            raise InvariantViolation("density matrix is not Hermitian")
        if abs(np.trace(m).real - 1.0) > TRACE_TOL or abs(np.trace(m).imag) > TRACE_TOL:
            raise InvariantViolation(f"trace {np.trace(m)} is not 1")
        lo = float(np.linalg.eigvalsh(m)[0])
        if lo < -PSD_TOL:
            raise InvariantViolation(f"negative eigenvalue {lo}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "layout", layout)

    def __setattr__(self, name, value):
        raise AttributeError("DensityMatrix is immutable")

    def __repr__(self):
        return f"DensityMatrix(labels={self.layout.labels})"


def tensor(a: DensityMatrix, b: DensityMatrix) -> DensityMatrix:
    """Kronecker product; the result register is a's qubits then b's.

    Label sets must be disjoint.
    """
    overlap = set(a.layout.labels) & set(b.layout.labels)
    if overlap:
        raise ValueError(f"overlapping qubit labels: {sorted(overlap)}")
    layout = QubitLayout(a.layout.labels + b.layout.labels)
    return DensityMatrix(np.kron(a.matrix, b.matrix), layout)


def permute(rho: DensityMatrix, target: QubitLayout) -> DensityMatrix:
    """Reorder register qubits to ``target`` (a permutation of rho's labels).

    Pure data movement: reshape + transpose, bit-exact, so
    ``permute(permute(rho, t), rho.layout)`` returns the original entries.
    """
    src = rho.layout.labels
    if sorted(target.labels) != sorted(src):
        raise ValueError(f"{target.labels} is not a permutation of {src}")
    axes = [src.index(lbl) for lbl in target.labels]
    n = len(src)
    t = rho.matrix.reshape([2] * (2 * n))
    t = np.transpose(t, axes + [a + n for a in axes])
    return DensityMatrix(t.reshape(rho.layout.dim, rho.layout.dim), target)


def partial_trace(rho: DensityMatrix, keep: QubitLayout) -> DensityMatrix:
    """Trace out every qubit not named in ``keep``; result order follows ``keep``."""
    src = rho.layout.labels
    missing = [lbl for lbl in keep.labels if lbl not in src]
    if missing:
        raise ValueError(f"labels {missing} not in register {src}")
    rest = tuple(lbl for lbl in src if lbl not in keep.labels)
    ordered = permute(rho, QubitLayout(keep.labels + rest)) if rest else permute(rho, keep)
    if not rest:
        return ordered
    dk, dr = 2 ** len(keep.labels), 2 ** len(rest)
    t = ordered.matrix.reshape(dk, dr, dk, dr)
    return DensityMatrix(np.einsum("arbr->ab", t), keep)


def expectation(op: ComplexMatrix, rho: DensityMatrix) -> float:
    """Real expectation value tr(op rho) of a Hermitian operator.

    The imaginary residue must vanish within 1e-10. Boundary dust is clamped
    so projector expectations are exact probabilities: values in [-1e-10, 0)
    become 0 and values in (1, 1 + 1e-10] become 1; anything further out is
    returned untouched.
    """
    op = np.asarray(op, dtype=complex)
    if op.shape != rho.matrix.shape:
        raise ValueError(f"operator shape {op.shape} does not match {rho.matrix.shape}")
    if np.max(np.abs(op - op.conj().T)) > HERMITIAN_TOL:
        raise ValueError("operator is not Hermitian")
    val = complex(np.trace(op @ rho.matrix))
    if abs(val.imag) > IMAG_TOL:
        raise InvariantViolation(f"imaginary residue {val.imag} in expectation")
    v = val.real
    if -PSD_TOL <= v < 0.0:
        return 0.0
    if 1.0 < v <= 1.0 + PSD_TOL:
        return 1.0
    return v


def purity(rho: DensityMatrix) -> float:
    """tr(rho^2), 1 for pure states, 1/dim for the maximally mixed state."""
    val = complex(np.trace(rho.matrix @ rho.matrix))
    if abs(val.imag) > IMAG_TOL:
        raise InvariantViolation(f"imaginary residue {val.imag} in purity")
    return val.real
