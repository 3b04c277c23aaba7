"""Hamiltonian assembly for the linear, three-wave and four-wave processes.

Sign table for the linear inhomogeneous Hamiltonian. Writing
eps^-1 = 1 - eta, the field energy is H_free - (1/2) int D.eta.D and with
P_k = i sqrt(hbar w/2) (a_k^dag - a_-k) this becomes, after relabelling,

    H_int = sum_ij [ c_pp[i,j] a_i^dag a_j^dag + c_pm[i,j] a_i^dag a_j ] + h.c.
    c_pp[i,j] = +(hbar/4) sqrt(w_i w_j) conj(V(k_i, k_j))
    c_pm[i,j] = -(hbar/4) sqrt(w_i w_j) conj(V(k_i, -k_j))

where the -k_j partner carries the conjugated polarization. For a homogeneous
medium and a {k, -k} pair this gives A = hbar w (1 - eta/2),
B = hbar w eta / 2 and a normal-mode frequency w sqrt(1 - eta) = w / sqrt(eps).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DimensionMismatchError, InvalidGeometryError, ProcessMismatchError
from .fock import FockBasis, ModeOperators, OperatorMatrix, zero
from .media import Box, Chi2Tensor, Chi3Tensor, DielectricSpec, frequencies_match
from .modes import (
    CouplingBundle,
    Mode,
    TransverseProfile,
    beta3,
    beta4,
    mismatch_factor,
    transverse_overlap,
    v_coupling,
)

KINDS = ("linear", "parametric3", "fwm4")


# --------------------------------------------------------------------------- #
# coupling constants


def _check_process_frequencies(modes: Sequence[Mode], tensor_freqs: Sequence[float]) -> None:
    for i, (m, w) in enumerate(zip(modes, tensor_freqs)):
        if not frequencies_match(m.omega, w):
            raise ProcessMismatchError(
                f"mode {i + 1} has omega = {m.omega!r} but the susceptibility is tabulated at {w!r}"
            )


def chi2_contraction(chi2: np.ndarray, modes: Sequence[Mode]) -> complex:
    """sum_ijk chi_ijk conj(e3)_i (e2)_j (e1)_k."""
    m1, m2, m3 = modes
    return complex(np.einsum("ijk,i,j,k->", chi2, np.conj(m3.pol), m2.pol, m1.pol))


def chi3_contraction(chi3: np.ndarray, modes: Sequence[Mode]) -> complex:
    """sum_ijkl chi_ijkl conj(e4)_i conj(e3)_j (e2)_k (e1)_l."""
    m1, m2, m3, m4 = modes
    return complex(
        np.einsum("ijkl,i,j,k,l->", chi3, np.conj(m4.pol), np.conj(m3.pol), m2.pol, m1.pol)
    )


def alpha2_from_contraction(contraction: complex, modes: Sequence[Mode], box_volume: float, hbar: float = 1.0) -> complex:
    if not box_volume > 0:
        raise InvalidGeometryError("box volume must be > 0")
    w = np.prod([m.omega for m in modes])
    n2 = np.prod([m.n**2 for m in modes])
    return -1j * np.sqrt(hbar**3 * w / (8 * box_volume * n2)) * contraction


def alpha3_from_contraction(contraction: complex, modes: Sequence[Mode], box_volume: float, hbar: float = 1.0) -> complex:
    if not box_volume > 0:
        raise InvalidGeometryError("box volume must be > 0")
    w = np.prod([m.omega for m in modes])
    n2 = np.prod([m.n**2 for m in modes])
    return -1j * np.sqrt(hbar**4 * w / (16 * box_volume**2 * n2)) * contraction


def alpha2(chi2: Chi2Tensor, modes: Sequence[Mode], box_volume: float, hbar: float = 1.0) -> complex:
    """Three-wave coupling constant for modes (1, 2, 3) with omega3 = omega1 + omega2."""
    if len(modes) != 3:
        raise ValueError("alpha2 needs three modes")
    _check_process_frequencies(modes, chi2.frequencies)
    return alpha2_from_contraction(chi2_contraction(chi2.components, modes), modes, box_volume, hbar)


def alpha3(chi3: Chi3Tensor, modes: Sequence[Mode], box_volume: float, hbar: float = 1.0) -> complex:
    """Four-wave coupling constant for modes (1, 2, 3, 4) with omega3 + omega4 = omega1 + omega2."""
    if len(modes) != 4:
        raise ValueError("alpha3 needs four modes")
    _check_process_frequencies(modes, chi3.frequencies)
    return alpha3_from_contraction(chi3_contraction(chi3.components, modes), modes, box_volume, hbar)


def collinear_alpha(alpha: complex, overlap: complex, box_volume: float, length: float) -> complex:
    """Effective collinear coupling alpha * sqrt(V/L) * int S3* S2 S1 dx dy."""
    return alpha * np.sqrt(box_volume / length) * overlap


# --------------------------------------------------------------------------- #
# process description


@dataclass(frozen=True, eq=False)
class ProcessSpec:
    """Everything a builder needs for one process.

    ``susceptibility`` may be a tensor, a dielectric spec (linear kind), or a
    plain number giving the already-contracted tensor value. ``coupling``
    overrides g entirely. ``delta_k`` overrides the collinear mismatch.
    """

    kind: str
    modes: tuple[Mode, ...]
    susceptibility: Chi2Tensor | Chi3Tensor | DielectricSpec | complex | None
    box: Box
    length: float | None = None
    geometry: str = "general"
    profiles: tuple[TransverseProfile, ...] | None = None
    delta_k: float | None = None
    coupling: complex | None = None

    def __post_init__(self):
        object.__setattr__(self, "modes", tuple(self.modes))
        if self.kind not in KINDS:
            raise ProcessMismatchError(f"unknown process kind {self.kind!r}")
        if self.geometry not in ("general", "collinear"):
            raise InvalidGeometryError(f"geometry must be 'general' or 'collinear', got {self.geometry!r}")
        if self.length is None:
            object.__setattr__(self, "length", self.box.lengths[2])
        if not self.length > 0:
            raise InvalidGeometryError("interaction length must be > 0")
        w = [m.omega for m in self.modes]
        if self.kind == "parametric3":
            if len(w) != 3:
                raise ProcessMismatchError(f"parametric3 needs 3 modes, got {len(w)}")
            if not frequencies_match(w[2], w[0] + w[1]):
                raise ProcessMismatchError(f"w3 = {w[2]!r} differs from w1 + w2 = {w[0] + w[1]!r}")
        elif self.kind == "fwm4":
            if len(w) != 4:
                raise ProcessMismatchError(f"fwm4 needs 4 modes, got {len(w)}")
            if not frequencies_match(w[2] + w[3], w[0] + w[1]):
                raise ProcessMismatchError(f"w3 + w4 = {w[2] + w[3]!r} differs from w1 + w2 = {w[0] + w[1]!r}")
        if self.kind == "parametric3" and isinstance(self.susceptibility, Chi3Tensor):
            raise ProcessMismatchError("parametric3 needs a chi2 susceptibility")
        if self.kind == "fwm4" and isinstance(self.susceptibility, Chi2Tensor):
            raise ProcessMismatchError("fwm4 needs a chi3 susceptibility")
        if self.kind == "linear" and not isinstance(self.susceptibility, DielectricSpec):
            raise ProcessMismatchError("linear process needs a DielectricSpec")


@dataclass(frozen=True, eq=False)
class HamiltonianBundle:
    kind: str
    basis: FockBasis
    h: OperatorMatrix
    free_part: OperatorMatrix
    interaction_part: OperatorMatrix
    couplings: CouplingBundle
    omegas: tuple[float, ...]
    hbar: float = 1.0
    terms: dict = field(default_factory=dict)


def _bundle(kind, basis, free, inter, couplings, omegas, hbar, terms=None) -> HamiltonianBundle:
    h = OperatorMatrix((free + inter).entries, hermitian_hint=True)
    return HamiltonianBundle(kind, basis, h, free, inter, couplings, tuple(omegas), hbar, terms or {})


def free_hamiltonian(omegas: Sequence[float], basis: FockBasis, hbar: float = 1.0, ops: ModeOperators | None = None) -> OperatorMatrix:
    if len(omegas) != basis.mode_count:
        raise DimensionMismatchError(f"{len(omegas)} frequencies for a {basis.mode_count}-mode basis")
    ops = ops or ModeOperators(basis)
    out = zero(basis.dim)
    for w, n in zip(omegas, ops.n):
        out = out + (hbar * w) * n
    return out


def _with_hc(term: OperatorMatrix) -> OperatorMatrix:
    return OperatorMatrix((term + term.dag()).entries, hermitian_hint=True)


def parametric_interaction(g: complex, basis: FockBasis, ops: ModeOperators | None = None) -> OperatorMatrix:
    """g a3^dag a2 a1 + h.c."""
    if basis.mode_count != 3:
        raise DimensionMismatchError(f"parametric process needs a 3-mode basis, got {basis.mode_count}")
    ops = ops or ModeOperators(basis)
    return _with_hc(complex(g) * (ops.a_dag[2] @ ops.a[1] @ ops.a[0]))


def fwm_interaction(g: complex, basis: FockBasis, ops: ModeOperators | None = None) -> OperatorMatrix:
    """g a3^dag a4^dag a2 a1 + h.c."""
    if basis.mode_count != 4:
        raise DimensionMismatchError(f"four-wave mixing needs a 4-mode basis, got {basis.mode_count}")
    ops = ops or ModeOperators(basis)
    return _with_hc(complex(g) * (ops.a_dag[2] @ ops.a_dag[3] @ ops.a[1] @ ops.a[0]))


def parametric_hamiltonian(omegas, g, basis: FockBasis, hbar: float = 1.0) -> HamiltonianBundle:
    ops = ModeOperators(basis)
    free = free_hamiltonian(omegas, basis, hbar, ops)
    inter = parametric_interaction(g, basis, ops)
    return _bundle("parametric3", basis, free, inter, CouplingBundle(g=complex(g)), omegas, hbar)


def fwm_hamiltonian(omegas, g, basis: FockBasis, hbar: float = 1.0) -> HamiltonianBundle:
    ops = ModeOperators(basis)
    free = free_hamiltonian(omegas, basis, hbar, ops)
    inter = fwm_interaction(g, basis, ops)
    return _bundle("fwm4", basis, free, inter, CouplingBundle(g=complex(g)), omegas, hbar)


# --------------------------------------------------------------------------- #
# builders


def _contraction_alpha(spec: ProcessSpec, hbar: float) -> complex:
    chi = spec.susceptibility
    V = spec.box.volume
    if spec.kind == "parametric3":
        if isinstance(chi, Chi2Tensor):
            return alpha2(chi, spec.modes, V, hbar)
        return alpha2_from_contraction(complex(chi), spec.modes, V, hbar)
    if isinstance(chi, Chi3Tensor):
        return alpha3(chi, spec.modes, V, hbar)
    return alpha3_from_contraction(complex(chi), spec.modes, V, hbar)


def _axis_delta_k(spec: ProcessSpec) -> float:
    """Mismatch along z for collinear geometry; override wins."""
    if spec.delta_k is not None:
        return float(spec.delta_k)
    signs = (1, 1, -1) if spec.kind == "parametric3" else (1, 1, -1, -1)
    dk = sum(s * m.k for s, m in zip(signs, spec.modes))
    transverse = max(abs(m.k[0]) + abs(m.k[1]) for m in spec.modes)
    if transverse > 1e-12 * max(1.0, max(np.linalg.norm(m.k) for m in spec.modes)):
        raise InvalidGeometryError("collinear geometry needs every wavevector along z")
    return float(dk[2])


def process_couplings(spec: ProcessSpec, hbar: float = 1.0) -> CouplingBundle:
    """alpha, beta, mismatch and the operator coefficient g for a nonlinear process."""
    if spec.kind == "linear":
        raise ProcessMismatchError("linear processes have no three/four-wave coupling")
    if spec.coupling is not None and spec.susceptibility is None:
        return CouplingBundle(g=complex(spec.coupling))
    alpha = _contraction_alpha(spec, hbar)
    if spec.geometry == "collinear":
        dk = _axis_delta_k(spec)
        mm = mismatch_factor(dk, spec.length)
        if spec.kind == "parametric3":
            overlap = (
                transverse_overlap(spec.profiles)
                if spec.profiles is not None
                else np.sqrt(spec.length / spec.box.volume)
            )
            alpha = collinear_alpha(alpha, overlap, spec.box.volume, spec.length)
        g = alpha * mm
        beta = mm
    else:
        beta = beta3(spec.modes, spec.box) if spec.kind == "parametric3" else beta4(spec.modes, spec.box)
        signs = (1, 1, -1) if spec.kind == "parametric3" else (1, 1, -1, -1)
        dk = float(sum(s * m.k for s, m in zip(signs, spec.modes))[2])
        mm = mismatch_factor(dk, spec.length)
        g = alpha * beta
    if spec.coupling is not None:
        g = complex(spec.coupling)
    return CouplingBundle(alpha=complex(alpha), beta=complex(beta), mismatch=complex(mm), delta_k=dk, g=complex(g))


def build_parametric(spec: ProcessSpec, basis: FockBasis, hbar: float = 1.0) -> HamiltonianBundle:
    """sum hbar w_i N_i + (g a3^dag a2 a1 + h.c.) with g = alpha * beta (or alpha * mismatch when collinear)."""
    if spec.kind != "parametric3":
        raise ProcessMismatchError(f"build_parametric got a {spec.kind!r} process")
    if basis.mode_count != 3:
        raise DimensionMismatchError(f"parametric process needs a 3-mode basis, got {basis.mode_count}")
    couplings = process_couplings(spec, hbar)
    ops = ModeOperators(basis)
    omegas = [m.omega for m in spec.modes]
    free = free_hamiltonian(omegas, basis, hbar, ops)
    inter = parametric_interaction(couplings.g, basis, ops)
    return _bundle("parametric3", basis, free, inter, couplings, omegas, hbar)


def build_fwm(spec: ProcessSpec, basis: FockBasis, hbar: float = 1.0) -> HamiltonianBundle:
    """sum hbar w_i N_i + (g a3^dag a4^dag a2 a1 + h.c.) with g = alpha * beta."""
    if spec.kind != "fwm4":
        raise ProcessMismatchError(f"build_fwm got a {spec.kind!r} process")
    if basis.mode_count != 4:
        raise DimensionMismatchError(f"four-wave mixing needs a 4-mode basis, got {basis.mode_count}")
    couplings = process_couplings(spec, hbar)
    ops = ModeOperators(basis)
    omegas = [m.omega for m in spec.modes]
    free = free_hamiltonian(omegas, basis, hbar, ops)
    inter = fwm_interaction(couplings.g, basis, ops)
    return _bundle("fwm4", basis, free, inter, couplings, omegas, hbar)


def linear_coefficients(modes: Sequence[Mode], spec: DielectricSpec, hbar: float = 1.0, box: Box | None = None):
    """(c_pp, c_pm) coefficient matrices of the interaction (see module docstring)."""
    n = len(modes)
    c_pp = np.zeros((n, n), dtype=complex)
    c_pm = np.zeros((n, n), dtype=complex)
    for i, mi in enumerate(modes):
        for j, mj in enumerate(modes):
            pref = hbar / 4 * np.sqrt(mi.omega * mj.omega)
            c_pp[i, j] = pref * np.conj(v_coupling(mi, mj, spec, box))
            c_pm[i, j] = -pref * np.conj(v_coupling(mi, mj.reversed(), spec, box))
    return c_pp, c_pm


def build_linear_inhomogeneous(
    modes: Sequence[Mode],
    spec: DielectricSpec,
    basis: FockBasis,
    hbar: float = 1.0,
    c: float = 1.0,
    box: Box | None = None,
) -> HamiltonianBundle:
    """Free field plus the quadratic dielectric interaction, assembled term by term."""
    modes = tuple(modes)
    if basis.mode_count != len(modes):
        raise DimensionMismatchError(f"{len(modes)} modes for a {basis.mode_count}-mode basis")
    box = box or spec.box
    for m in modes:
        kmag = np.linalg.norm(m.k)
        if not frequencies_match(m.omega, kmag * c):
            raise ProcessMismatchError(f"mode {m.label}: omega = {m.omega!r} but |k|c = {kmag * c!r}")
        if box is not None and box.reciprocal_index(m.k) is None:
            raise InvalidGeometryError(f"mode {m.label}: k = {m.k} is off the reciprocal lattice of the box")
    missing = [m.label for m in modes if not any(np.allclose(-m.k, o.k, atol=1e-12) for o in modes)]
    if missing and not spec.is_homogeneous:
        warnings.warn(f"modes {missing} have no -k partner in the basis; anomalous couplings to them are dropped")

    c_pp, c_pm = linear_coefficients(modes, spec, hbar, box)
    ops = ModeOperators(basis)
    omegas = [m.omega for m in modes]
    free = free_hamiltonian(omegas, basis, hbar, ops)
    term = zero(basis.dim)
    for i in range(len(modes)):
        for j in range(len(modes)):
            if c_pp[i, j] != 0:
                term = term + c_pp[i, j] * (ops.a_dag[i] @ ops.a_dag[j])
            if c_pm[i, j] != 0:
                term = term + c_pm[i, j] * (ops.a_dag[i] @ ops.a[j])
    inter = _with_hc(term)
    terms = {"c_pp": c_pp, "c_pm": c_pm, "labels": tuple(m.label for m in modes)}
    return _bundle("linear", basis, free, inter, CouplingBundle(), omegas, hbar, terms)


def classical_pump_reduce(spec: ProcessSpec, pump_amplitude: complex, basis: FockBasis | None = None, hbar: float = 1.0) -> HamiltonianBundle:
    """Two-mode squeezing Hamiltonian kappa a1^dag a2^dag + h.c. with mode 3 a c-number pump.

    Replacing a3 by the amplitude A in the h.c. term g* a1^dag a2^dag a3 gives
    kappa = conj(g) * A. Works in the frame rotating at w1 and w2, so the free
    part is dropped (w3 = w1 + w2 makes the result time independent).
    """
    if spec.kind != "parametric3":
        raise ProcessMismatchError("classical pump reduction needs a parametric3 process")
    couplings = process_couplings(spec, hbar)
    return squeezing_hamiltonian(np.conj(couplings.g) * complex(pump_amplitude), basis, hbar, couplings)


def squeezing_hamiltonian(kappa: complex, basis: FockBasis, hbar: float = 1.0, couplings: CouplingBundle | None = None) -> HamiltonianBundle:
    """kappa a1^dag a2^dag + conj(kappa) a2 a1 on a 2-mode basis."""
    if basis is None or basis.mode_count != 2:
        raise DimensionMismatchError("classical-pump Hamiltonian needs a 2-mode basis")
    ops = ModeOperators(basis)
    inter = _with_hc(complex(kappa) * (ops.a_dag[0] @ ops.a_dag[1]))
    return _bundle(
        "classical_pump", basis, zero(basis.dim), inter, couplings or CouplingBundle(),
        (0.0, 0.0), hbar, {"kappa": complex(kappa)},
    )
