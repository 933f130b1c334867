"""Two-photon linear-optics model of the tabletop witness measurement.

Eight optical modes carry the four-qubit state: mode index = 2*(path - 1) +
(0 for H, 1 for V), paths 1 and 2 belong to photon A, paths 3 and 4 to
photon B. The logical encoding puts the polarization qubit in H/V and the
spatial qubit in the path choice, so logical |m n>_A sits in mode 2n + m and
|k l>_B in mode 4 + 2l + k.

A two-photon state is a symmetric 8x8 amplitude matrix; optical elements act
as single-photon 8x8 transfer matrices applied to both photons. Partial
temporal overlap tau mixes coherent and incoherent coincidence values, which
is enough to reproduce the phase-scan interference contrast.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .exceptions import InvariantViolation
from .states import CanonicalState
from .witness import PLUS_SETTING, SETTINGS, Setting

N_MODES = 8
A_MODES = (0, 1, 2, 3)
B_MODES = (4, 5, 6, 7)

UNITARY_TOL = 1e-12
SYMMETRY_TOL = 1e-12
NORM_TOL = 1e-10
KET_NORM_TOL = 1e-10
MIN_COINCIDENCE = 1e-12

SETUP_NAMES = ("fig2",)

# analysis chain on photon B that maps the singlet component onto this mode
SINGLET_DETECTION_MODE = 6


def mode_index(path: int, polarization: int) -> int:
    """Flat mode index for a path in 1..4 and polarization 0 (H) or 1 (V)."""
    if path not in (1, 2, 3, 4):
        raise ValueError(f"path {path} outside 1..4")
    if polarization not in (0, 1):
        raise ValueError(f"polarization {polarization} must be 0 (H) or 1 (V)")
    return 2 * (path - 1) + polarization


def encode_logical(m: int, n: int, k: int, l: int) -> tuple[np.ndarray, np.ndarray]:
    """Mode kets of the photon pair carrying logical |m n>_A |k l>_B.

    Photon A: polarization m in path 1 + n. Photon B: polarization k in
    path 3 + l.
    """
    for bit in (m, n, k, l):
        if bit not in (0, 1):
            raise ValueError(f"logical bits must be 0 or 1, got {(m, n, k, l)}")
    ket_a = np.zeros(N_MODES, dtype=complex)
    ket_a[mode_index(1 + n, m)] = 1.0
    ket_b = np.zeros(N_MODES, dtype=complex)
    ket_b[mode_index(3 + l, k)] = 1.0
    return ket_a, ket_b


def _embed_path_block(path: int, block: np.ndarray) -> np.ndarray:
    u = np.eye(N_MODES, dtype=complex)
    base = 2 * (path - 1)
    u[base : base + 2, base : base + 2] = block
    return u


@dataclass(frozen=True)
class HalfWavePlate:
    """Half-wave plate at angle theta in one path."""

    theta: float
    path: int

    def matrix(self) -> np.ndarray:
        c, s = math.cos(2.0 * self.theta), math.sin(2.0 * self.theta)
        return _embed_path_block(self.path, np.array([[c, s], [s, -c]], dtype=complex))


@dataclass(frozen=True)
class QuarterWavePlate:
    """Quarter-wave plate at angle theta in one path."""

    theta: float
    path: int

    def matrix(self) -> np.ndarray:
        c, s = math.cos(self.theta), math.sin(self.theta)
        rot = np.array([[c, -s], [s, c]], dtype=complex)
        return _embed_path_block(self.path, rot @ np.diag([1.0, 1.0j]) @ rot.T)


@dataclass(frozen=True)
class PhaseShift:
    """Phase factor e^{i phi} on a set of modes."""

    phi: float
    modes: tuple

    def matrix(self) -> np.ndarray:
        if len(set(self.modes)) != len(self.modes):
            raise ValueError(f"duplicate modes in {self.modes}")
        u = np.eye(N_MODES, dtype=complex)
        for mode in self.modes:
            if not 0 <= mode < N_MODES:
                raise ValueError(f"mode {mode} outside 0..{N_MODES - 1}")
            u[mode, mode] = cmath.exp(1j * self.phi)
        return u


@dataclass(frozen=True)
class BeamDisplacer:
    """Permutation routing of modes; unlisted modes pass through.

    The routed modes must be permuted among themselves, otherwise two inputs
    would land in one output and the routing is rejected.
    """

    routing: dict

    def matrix(self) -> np.ndarray:
        keys = list(self.routing)
        values = list(self.routing.values())
        for mode in keys + values:
            if not 0 <= mode < N_MODES:
                raise ValueError(f"mode {mode} outside 0..{N_MODES - 1}")
        if len(set(values)) != len(values) or set(keys) != set(values):
            raise ValueError(f"routing {self.routing} collides with pass-through modes")
        u = np.zeros((N_MODES, N_MODES), dtype=complex)
        for mode in range(N_MODES):
            u[self.routing.get(mode, mode), mode] = 1.0
        return u


@dataclass(frozen=True)
class PolarizingBeamSplitter:
    """PBS joining two paths: H transmits, V reflects with a unit phase.

    (a, V) -> phase * (b, V) and vice versa. The phase convention is a
    parameter because post-selected coincidences do not depend on it.
    """

    path_a: int
    path_b: int
    reflection_phase: complex = 1.0j

    def matrix(self) -> np.ndarray:
        if self.path_a == self.path_b:
            raise ValueError("PBS needs two distinct paths")
        if abs(abs(self.reflection_phase) - 1.0) > UNITARY_TOL:
            raise ValueError(f"reflection phase {self.reflection_phase} not unit modulus")
        va = mode_index(self.path_a, 1)
        vb = mode_index(self.path_b, 1)
        u = np.eye(N_MODES, dtype=complex)
        u[va, va] = u[vb, vb] = 0.0
        u[vb, va] = u[va, vb] = self.reflection_phase
        return u


@dataclass(frozen=True)
class Polarizer:
    """Projective polarizer along cos(theta) H + sin(theta) V in one path.

    The only non-unitary element: transmitted norm drops and the deficit is
    booked as loss.
    """

    theta: float
    path: int

    def matrix(self) -> np.ndarray:
        c, s = math.cos(self.theta), math.sin(self.theta)
        block = np.array([[c * c, c * s], [c * s, s * s]], dtype=complex)
        return _embed_path_block(self.path, block)


Element = HalfWavePlate | QuarterWavePlate | PhaseShift | BeamDisplacer | PolarizingBeamSplitter | Polarizer


def transfer_matrix(element: Element) -> np.ndarray:
    """Single-photon 8x8 matrix of one element, unitarity-checked.

    Polarizer is exempt: it is a projector with deliberate loss.
    """
    u = element.matrix()
    if not isinstance(element, Polarizer):
        if np.max(np.abs(u.conj().T @ u - np.eye(N_MODES))) > UNITARY_TOL:
            raise InvariantViolation(f"element {element!r} produced a non-unitary matrix")
    return u


@dataclass(frozen=True)
class TwoPhotonState:
    """Symmetric two-photon amplitude matrix with overlap tau and loss budget.

    amplitude[m, n] is the (symmetrized) amplitude of one photon in mode m
    and one in mode n; the squared norm plus recorded post-selection loss
    must be 1. tau in [0, 1] is the temporal overlap entering coincidence
    probabilities.
    """

    amplitude: np.ndarray
    tau: float = 1.0
    loss: float = 0.0

    def __post_init__(self):
        amp = np.asarray(self.amplitude, dtype=complex)
        amp.setflags(write=False)
        object.__setattr__(self, "amplitude", amp)
        if amp.shape != (N_MODES, N_MODES):
            raise ValueError(f"amplitude shape {amp.shape}, expected (8, 8)")
        if not 0.0 <= self.tau <= 1.0:
            raise ValueError(f"tau {self.tau} outside [0, 1]")
        if np.max(np.abs(amp - amp.T)) > SYMMETRY_TOL:
            raise InvariantViolation("two-photon amplitude must be symmetric")
        if self.loss < -NORM_TOL:
            raise InvariantViolation(f"negative loss {self.loss}")
        budget = float(np.sum(np.abs(amp) ** 2)) + self.loss
        if abs(budget - 1.0) > NORM_TOL:
            raise InvariantViolation(f"norm + loss = {budget}, expected 1")

    def norm_squared(self) -> float:
        return float(np.sum(np.abs(self.amplitude) ** 2))


def from_bipartite(psi: np.ndarray, tau: float = 1.0) -> TwoPhotonState:
    """Symmetrize a 4x4 photon-A x photon-B amplitude into a TwoPhotonState.

    psi[a, b] is the amplitude for photon A in mode a and photon B in mode
    4 + b; it must have unit norm.
    """
    psi = np.asarray(psi, dtype=complex)
    if psi.shape != (4, 4):
        raise ValueError(f"bipartite amplitude shape {psi.shape}, expected (4, 4)")
    if abs(float(np.sum(np.abs(psi) ** 2)) - 1.0) > NORM_TOL:
        raise ValueError("bipartite amplitude must have unit norm")
    amp = np.zeros((N_MODES, N_MODES), dtype=complex)
    amp[:4, 4:] = psi / math.sqrt(2.0)
    amp[4:, :4] = psi.T / math.sqrt(2.0)
    return TwoPhotonState(amp, tau=tau)


def from_logical(components: dict, tau: float = 1.0) -> TwoPhotonState:
    """Two-photon state of a logical superposition {(m, n, k, l): amplitude}."""
    psi = np.zeros((4, 4), dtype=complex)
    for (m, n, k, l), coeff in components.items():
        ka, kb = encode_logical(m, n, k, l)
        psi[np.argmax(np.abs(ka)), np.argmax(np.abs(kb)) - 4] = coeff
    return from_bipartite(psi, tau=tau)


def evolve(state: TwoPhotonState, elements: tuple | list) -> TwoPhotonState:
    """Apply elements in order to both photons; loss absorbs any norm drop."""
    u = np.eye(N_MODES, dtype=complex)
    for element in elements:
        u = transfer_matrix(element) @ u
    amp = u @ state.amplitude @ u.T
    loss = 1.0 - float(np.sum(np.abs(amp) ** 2))
    return TwoPhotonState(amp, tau=state.tau, loss=loss)


def postselect_cross_arm(state: TwoPhotonState) -> TwoPhotonState:
    """Keep only one-photon-per-arm components; the rest becomes loss."""
    amp = np.array(state.amplitude)
    amp[:4, :4] = 0.0
    amp[4:, 4:] = 0.0
    return TwoPhotonState(amp, tau=state.tau, loss=1.0 - float(np.sum(np.abs(amp) ** 2)))


def renormalize(state: TwoPhotonState) -> TwoPhotonState:
    """Rescale to unit norm after post-selection, clearing the loss budget."""
    norm = state.norm_squared()
    if norm < MIN_COINCIDENCE:
        raise InvariantViolation("cannot renormalize a fully post-selected state")
    return TwoPhotonState(state.amplitude / math.sqrt(norm), tau=state.tau, loss=0.0)


def _check_projection(ket: np.ndarray, arm: tuple) -> np.ndarray:
    ket = np.asarray(ket, dtype=complex)
    if ket.shape != (N_MODES,):
        raise ValueError(f"projection ket shape {ket.shape}, expected ({N_MODES},)")
    if abs(float(np.sum(np.abs(ket) ** 2)) - 1.0) > KET_NORM_TOL:
        raise ValueError("projection ket must be normalized")
    outside = [m for m in range(N_MODES) if m not in arm and abs(ket[m]) > 0.0]
    if outside:
        raise ValueError(f"projection ket leaks outside its arm at modes {outside}")
    return ket


def coincidence_probability(state: TwoPhotonState, proj_a: np.ndarray, proj_b: np.ndarray) -> float:
    """Coincidence probability for projecting photon A on proj_a, B on proj_b.

    The coherent value interferes all amplitude entries; the incoherent value
    sums their squared moduli instead. The state's tau mixes the two.
    """
    u = _check_projection(proj_a, A_MODES)
    w = _check_projection(proj_b, B_MODES)
    amp = state.amplitude
    coherent = 2.0 * abs(u.conj() @ amp @ w.conj()) ** 2
    weights = np.abs(np.outer(u, w)) ** 2
    incoherent = 2.0 * float(np.sum(np.abs(amp) ** 2 * weights))
    p = float(state.tau * coherent + (1.0 - state.tau) * incoherent)
    if p > 1.0 + NORM_TOL:
        raise InvariantViolation(f"coincidence probability {p} above 1")
    return min(p, 1.0)


def singlet_ket() -> np.ndarray:
    """Photon-B mode ket of (|0 1> - |1 0>)/sqrt(2) in logical (k, l)."""
    ket = np.zeros(N_MODES, dtype=complex)
    _, k01 = encode_logical(0, 0, 0, 1)
    _, k10 = encode_logical(0, 0, 1, 0)
    ket += (k01 - k10) / math.sqrt(2.0)
    return ket


def setting_ket(setting: Setting) -> np.ndarray:
    """Photon-A mode ket for one of the five witness settings."""
    if setting == PLUS_SETTING:
        ket = np.zeros(N_MODES, dtype=complex)
        ket[list(A_MODES)] = 0.5
        return ket
    i, j = setting
    ket_a, _ = encode_logical(i, j, 0, 0)
    return ket_a


def singlet_analysis_elements() -> tuple:
    """Photon-B chain equivalent to the singlet projection up to global phase.

    After it, detecting mode SINGLET_DETECTION_MODE reproduces the singlet
    coincidence: the chain maps the singlet component onto path 4 H.
    """
    return (
        BeamDisplacer({5: 7, 7: 5}),
        QuarterWavePlate(math.pi / 4.0, 4),
        HalfWavePlate(-math.pi / 8.0, 4),
        Polarizer(0.0, 4),
    )


# preparation chains: every ensemble component starts from a two-mode source
# pair in paths 1 and 3 and is shaped by displacers and wave plates only


def _pair_source(pol_a: int, pol_b: int, tau: float) -> TwoPhotonState:
    psi = np.zeros((4, 4), dtype=complex)
    psi[pol_a, pol_b] = 1.0
    return from_bipartite(psi, tau=tau)


def _entangled_source(tau: float) -> TwoPhotonState:
    # (|HH> + |VV>)/sqrt(2) emitted into paths 1 and 3
    psi = np.zeros((4, 4), dtype=complex)
    psi[0, 0] = psi[1, 1] = 1.0 / math.sqrt(2.0)
    return from_bipartite(psi, tau=tau)


_BD_SPLIT_A = BeamDisplacer({1: 3, 3: 1})
_BD_SPLIT_B = BeamDisplacer({5: 7, 7: 5})
_BD_SHIFT_A = BeamDisplacer({0: 2, 2: 0, 1: 3, 3: 1})
_BD_SHIFT_B = BeamDisplacer({4: 6, 6: 4, 5: 7, 7: 5})


def prepare_bell(tau: float = 1.0) -> TwoPhotonState:
    """Both-DOF entangled pair via displacers and a post-selected PBS pair.

    The PBS parity check keeps the path-correlated half of the amplitude;
    conditioning on one photon per arm and undoing the V-V sign leaves the
    four logical components with equal weight 1/2.
    """
    chain = (
        _BD_SPLIT_A,
        _BD_SPLIT_B,
        HalfWavePlate(math.pi / 4.0, 2),
        HalfWavePlate(math.pi / 4.0, 4),
        HalfWavePlate(math.pi / 8.0, 1),
        HalfWavePlate(math.pi / 8.0, 2),
        HalfWavePlate(math.pi / 8.0, 3),
        HalfWavePlate(math.pi / 8.0, 4),
        PolarizingBeamSplitter(1, 3),
        PolarizingBeamSplitter(2, 4),
    )
    state = evolve(_entangled_source(tau), chain)
    state = postselect_cross_arm(state)
    state = evolve(state, (PhaseShift(math.pi, (1, 3)),))
    return renormalize(state)


def prepare_separable(tau: float = 1.0) -> TwoPhotonState:
    """Product pair: V in path 2 for photon A, H in path 3 for photon B."""
    chain = (HalfWavePlate(math.pi / 4.0, 3), _BD_SPLIT_A, _BD_SPLIT_B)
    return evolve(_pair_source(1, 1, tau), chain)


# HWP angle turning definite input polarization c into output t
_HWP_TO = {(0, 0): 0.0, (0, 1): math.pi / 4.0, (1, 0): math.pi / 4.0, (1, 1): math.pi / 2.0}


def _polarization_bell_at(spatial_a: int, spatial_b: int, tau: float) -> TwoPhotonState:
    chain = []
    if spatial_a:
        chain.append(_BD_SHIFT_A)
    if spatial_b:
        chain.append(_BD_SHIFT_B)
    return evolve(_entangled_source(tau), chain)


def _spatial_bell_with_polarization(pol_a: int, pol_b: int, tau: float) -> TwoPhotonState:
    chain = (
        _BD_SPLIT_A,
        _BD_SPLIT_B,
        HalfWavePlate(_HWP_TO[(0, pol_a)], 1),
        HalfWavePlate(_HWP_TO[(1, pol_a)], 2),
        HalfWavePlate(_HWP_TO[(0, pol_b)], 3),
        HalfWavePlate(_HWP_TO[(1, pol_b)], 4),
    )
    return evolve(_entangled_source(tau), chain)


def _product_component(m: int, n: int, k: int, l: int, tau: float) -> TwoPhotonState:
    # source polarization doubles as the path selector, then HWPs fix it up
    chain = (
        _BD_SPLIT_A,
        _BD_SPLIT_B,
        HalfWavePlate(_HWP_TO[(n, m)], 1 + n),
        HalfWavePlate(_HWP_TO[(l, k)], 3 + l),
    )
    return evolve(_pair_source(n, l, tau), chain)


Ensemble = tuple  # of (weight, TwoPhotonState) pairs


def prepare_mixed(tau: float = 1.0) -> Ensemble:
    """Uniform ensemble over all sixteen logical product components."""
    weight = 1.0 / 16.0
    return tuple(
        (weight, _product_component(m, n, k, l, tau))
        for m in (0, 1)
        for n in (0, 1)
        for k in (0, 1)
        for l in (0, 1)
    )


def prepare_hybrid(polarization_mixed: bool, spatial_mixed: bool, tau: float = 1.0) -> Ensemble:
    """Pure or fully mixed per DOF: the four purity combinations."""
    if polarization_mixed and spatial_mixed:
        return prepare_mixed(tau)
    if polarization_mixed:
        return tuple(
            (0.25, _spatial_bell_with_polarization(pa, pb, tau)) for pa in (0, 1) for pb in (0, 1)
        )
    if spatial_mixed:
        return tuple(
            (0.25, _polarization_bell_at(sa, sb, tau)) for sa in (0, 1) for sb in (0, 1)
        )
    return ((1.0, prepare_bell(tau)),)


def prepare_canonical(state: CanonicalState, tau: float = 1.0) -> Ensemble:
    """Optical ensemble realizing one of the canonical states."""
    if state.kind == "bell":
        return ((1.0, prepare_bell(tau)),)
    if state.kind == "separable":
        return ((1.0, prepare_separable(tau)),)
    if state.kind == "mixed":
        return prepare_mixed(tau)
    p = state.weight
    components = [(p * p, prepare_bell(tau))]
    components += [(w * p * (1.0 - p), s) for w, s in prepare_hybrid(False, True, tau)]
    components += [(w * p * (1.0 - p), s) for w, s in prepare_hybrid(True, False, tau)]
    components += [(w * (1.0 - p) ** 2, s) for w, s in prepare_mixed(tau)]
    return tuple(components)


def prepare_setup(name: str, state: CanonicalState, tau: float = 1.0) -> Ensemble:
    """Ensemble for a registered setup layout; only "fig2" is shipped."""
    if name not in SETUP_NAMES:
        raise ValueError(f"unknown setup {name!r}, available: {SETUP_NAMES}")
    return prepare_canonical(state, tau)


def simulate_settings(ensemble: Ensemble) -> dict:
    """Coincidence probability of each witness setting for an ensemble."""
    sing = singlet_ket()
    return {
        s: sum(w * coincidence_probability(st, setting_ket(s), sing) for w, st in ensemble)
        for s in SETTINGS
    }


def default_phase_grid(n_points: int = 64) -> np.ndarray:
    """Uniform phase grid on [0, 2*pi); 64 points resolve the extrema."""
    if n_points < 1:
        raise ValueError("phase grid needs at least one point")
    return np.arange(n_points) * (2.0 * math.pi / n_points)


def phase_scan_mixture(ensemble: Ensemble, phis) -> list:
    """(phi, cc) pairs for the plus-plus setting with a phase in path 2."""
    phis = list(phis)
    if not phis:
        raise ValueError("phase scan needs a nonempty grid")
    plus = setting_ket(PLUS_SETTING)
    sing = singlet_ket()
    scan = []
    for phi in phis:
        shifted = [(w, evolve(st, (PhaseShift(phi, (2, 3)),))) for w, st in ensemble]
        scan.append((float(phi), sum(w * coincidence_probability(st, plus, sing) for w, st in shifted)))
    return scan


def phase_scan(state: TwoPhotonState, phis) -> list:
    """Single-state version of phase_scan_mixture."""
    return phase_scan_mixture(((1.0, state),), phis)


def ratio_R(scan) -> float:
    """Max/min coincidence over a phase scan; inf when the minimum vanishes."""
    ccs = [cc for _, cc in scan]
    if not ccs:
        raise ValueError("ratio needs a nonempty scan")
    cc_min, cc_max = min(ccs), max(ccs)
    if cc_min < MIN_COINCIDENCE:
        return math.inf
    return cc_max / cc_min


def quality_ratio(ensemble: Ensemble, n_points: int = 64) -> float:
    """ratio_R over the default phase grid for a prepared ensemble."""
    return ratio_R(phase_scan_mixture(ensemble, default_phase_grid(n_points)))
