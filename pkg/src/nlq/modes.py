"""Plane-wave modes, phase-matching factors and overlap integrals.

Mode functions are box-normalized plane waves ``e * exp(i k.r) / sqrt(V)`` on a
periodic box, so all spatial integrals of products of mode functions reduce to
products of one-dimensional mismatch factors.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import InvalidGeometryError, InvalidModeError
from .media import Box, DielectricSpec, contrast_coefficient

MODE_TOL = 1e-12
SMALL_PHASE = 1e-12


@dataclass(frozen=True, eq=False)
class Mode:
    omega: float
    k: np.ndarray
    pol: np.ndarray
    n: float = 1.0
    label: int = 0
    c: float = 1.0

    def __post_init__(self):
        k = np.array(self.k, dtype=float).reshape(3)
        pol = np.array(self.pol, dtype=complex).reshape(3)
        omega, n = float(self.omega), float(self.n)
        if not omega > 0:
            raise InvalidModeError(f"mode {self.label}: omega must be > 0")
        if not n > 0:
            raise InvalidModeError(f"mode {self.label}: refractive index must be > 0")
        if abs(np.linalg.norm(pol) - 1.0) > MODE_TOL:
            raise InvalidModeError(f"mode {self.label}: |pol| = {np.linalg.norm(pol)!r}, expected 1")
        kmag = np.linalg.norm(k)
        if abs(k @ pol) > MODE_TOL * max(1.0, kmag):
            raise InvalidModeError(f"mode {self.label}: polarization not transverse, k.pol = {k @ pol}")
        expected = n * omega / self.c
        if abs(kmag - expected) > MODE_TOL * max(1.0, expected):
            raise InvalidModeError(f"mode {self.label}: |k| = {kmag!r} but n*omega/c = {expected!r}")
        k.setflags(write=False)
        pol.setflags(write=False)
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "pol", pol)
        object.__setattr__(self, "omega", omega)
        object.__setattr__(self, "n", n)

    @classmethod
    def plane_wave(cls, omega, direction, pol, n=1.0, label=0, c=1.0) -> "Mode":
        """Mode with |k| = n*omega/c along ``direction``; ``pol`` is normalized."""
        d = np.asarray(direction, dtype=float)
        d = d / np.linalg.norm(d)
        p = np.asarray(pol, dtype=complex)
        p = p / np.linalg.norm(p)
        return cls(omega, n * omega / c * d, p, n, label, c)

    @classmethod
    def from_wavevector(cls, k, pol, n=1.0, label=0, c=1.0) -> "Mode":
        """Mode whose frequency follows from its wavevector, omega = c|k|/n."""
        k = np.asarray(k, dtype=float)
        p = np.asarray(pol, dtype=complex)
        return cls(c * np.linalg.norm(k) / n, k, p / np.linalg.norm(p), n, label, c)

    def reversed(self, label=None) -> "Mode":
        """The partner mode at -k with conjugated polarization (f*_k = f_-k)."""
        return Mode(self.omega, -self.k, np.conj(self.pol), self.n, self.label if label is None else label, self.c)


def mismatch_factor(delta_k: float, length: float) -> complex:
    """(exp(i dk L) - 1) / (i dk L), the box average of exp(i dk z) over [0, L]."""
    if not length > 0:
        raise InvalidGeometryError(f"interaction length must be > 0, got {length!r}")
    x = delta_k * length
    if abs(x) < SMALL_PHASE:
        return 1.0 + 0.0j
    return complex(np.expm1(1j * x) / (1j * x))


def _box_average(q, box: Box) -> complex:
    """(1/V) * integral over the box of exp(i q.r)."""
    out = 1.0 + 0.0j
    for qa, la in zip(np.asarray(q, dtype=float), box.lengths):
        out *= mismatch_factor(qa, la)
    return out


def beta3(modes: Sequence[Mode], box: Box) -> complex:
    """Phase-matching factor sqrt(V) * int f3* f2 f1 for normalized plane waves."""
    if len(modes) != 3:
        raise ValueError("beta3 needs exactly three modes")
    m1, m2, m3 = modes
    return _box_average(m1.k + m2.k - m3.k, box)


def beta4(modes: Sequence[Mode], box: Box) -> complex:
    """Phase-matching factor V * int f4* f3* f2 f1 for normalized plane waves."""
    if len(modes) != 4:
        raise ValueError("beta4 needs exactly four modes")
    m1, m2, m3, m4 = modes
    return _box_average(m1.k + m2.k - m3.k - m4.k, box)


@dataclass(frozen=True, eq=False)
class TransverseProfile:
    """Complex scalar S(x, y) sampled on a periodic 2D grid, unit L2 norm."""

    samples: np.ndarray
    lengths: tuple[float, float]
    origin: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        s = np.array(self.samples, dtype=complex)
        if s.ndim != 2:
            raise ValueError("profile samples must be a 2D array")
        object.__setattr__(self, "samples", s)
        object.__setattr__(self, "lengths", tuple(float(v) for v in self.lengths))
        object.__setattr__(self, "origin", tuple(float(v) for v in self.origin))
        norm = np.sum(np.abs(s) ** 2) * self.cell_area
        if abs(norm - 1.0) > 1e-10:
            raise ValueError(f"profile norm {norm!r} differs from 1; use TransverseProfile.normalized")
        s.setflags(write=False)

    @property
    def cell_area(self) -> float:
        nx, ny = self.samples.shape
        return self.lengths[0] / nx * self.lengths[1] / ny

    def coordinates(self) -> tuple[np.ndarray, np.ndarray]:
        nx, ny = self.samples.shape
        x = self.origin[0] + np.arange(nx) * self.lengths[0] / nx
        y = self.origin[1] + np.arange(ny) * self.lengths[1] / ny
        return np.meshgrid(x, y, indexing="ij")

    @classmethod
    def normalized(cls, samples, lengths, origin=(0.0, 0.0)) -> "TransverseProfile":
        s = np.asarray(samples, dtype=complex)
        area = lengths[0] / s.shape[0] * lengths[1] / s.shape[1]
        return cls(s / np.sqrt(np.sum(np.abs(s) ** 2) * area), lengths, origin)

    @classmethod
    def gaussian(cls, width, shape, lengths) -> "TransverseProfile":
        """exp(-(x^2 + y^2)/w^2) centred in the window, normalized on the grid."""
        origin = (-lengths[0] / 2, -lengths[1] / 2)
        nx, ny = shape
        x = origin[0] + np.arange(nx) * lengths[0] / nx
        y = origin[1] + np.arange(ny) * lengths[1] / ny
        xx, yy = np.meshgrid(x, y, indexing="ij")
        return cls.normalized(np.exp(-(xx**2 + yy**2) / width**2), lengths, origin)

    @classmethod
    def uniform(cls, shape, lengths) -> "TransverseProfile":
        return cls.normalized(np.ones(shape), lengths)

    def same_grid(self, other: "TransverseProfile") -> bool:
        return (
            self.samples.shape == other.samples.shape
            and np.allclose(self.lengths, other.lengths, rtol=1e-12, atol=0)
            and np.allclose(self.origin, other.origin, rtol=1e-12, atol=1e-15)
        )


def transverse_overlap(profiles: Sequence[TransverseProfile]) -> complex:
    """Quadrature of S3* S2 S1 over the shared transverse grid."""
    p1, p2, p3 = profiles
    if not (p1.same_grid(p2) and p1.same_grid(p3)):
        raise InvalidGeometryError("transverse profiles live on different grids")
    return complex(np.sum(np.conj(p3.samples) * p2.samples * p1.samples) * p1.cell_area)


def overlap_convergence(profiles: Sequence[TransverseProfile]) -> tuple[complex, float]:
    """Overlap on the full grid and its relative change against the grid with doubled spacing."""
    fine = transverse_overlap(profiles)
    coarse = [
        TransverseProfile.normalized(p.samples[::2, ::2], p.lengths, p.origin) for p in profiles
    ]
    rough = transverse_overlap(coarse)
    return fine, abs(fine - rough) / max(abs(fine), 1e-300)


def load_profile(path) -> TransverseProfile:
    from .media import read_grid_file

    samples, lengths, ncomp = read_grid_file(path)
    if samples.shape[2] != 1:
        raise InvalidGeometryError(f"{path}: transverse profiles need nz = 1")
    s = samples[:, :, 0, 0] if ncomp == 1 else samples[:, :, 0, 0] + 1j * samples[:, :, 0, 1]
    return TransverseProfile.normalized(s, lengths[:2])


def v_coupling(mode: Mode, mode2: Mode, spec: DielectricSpec, box: Box | None = None) -> complex:
    """Linear coupling (1/V) int e . (1 - eps^-1) . e' exp(i(k + k').r).

    Uses the bilinear product e . M . e' (no conjugation); the conjugation
    pattern of the Hamiltonian is carried by the -k partner polarizations.
    """
    q = mode.k + mode2.k
    if spec.is_homogeneous:
        scale = max(1.0, np.linalg.norm(mode.k), np.linalg.norm(mode2.k))
        if np.linalg.norm(q) > 1e-9 * scale:
            return 0.0 + 0.0j
        return complex((1.0 - 1.0 / spec.epsilon) * (mode.pol @ mode2.pol))
    if box is not None and not np.allclose(box.lengths, spec.box.lengths, rtol=1e-12, atol=0):
        raise InvalidGeometryError("modes and dielectric grid use different boxes")
    coeff = contrast_coefficient(spec, q)
    return complex(mode.pol @ coeff @ mode2.pol)


@dataclass
class OrthonormalityReport:
    gram: np.ndarray
    max_deviation: float
    violations: list[tuple[int, int, float]] = field(default_factory=list)
    transversality: float = 0.0
    tol: float = 1e-10

    @property
    def ok(self) -> bool:
        return not self.violations and self.transversality <= MODE_TOL


def check_mode_orthonormality(modes: Sequence[Mode], box: Box, tol: float = 1e-10) -> OrthonormalityReport:
    """Pairwise box inner products int f_i^* . f_j, compared against the identity."""
    n = len(modes)
    gram = np.zeros((n, n), dtype=complex)
    for i, mi in enumerate(modes):
        for j, mj in enumerate(modes):
            gram[i, j] = np.vdot(mi.pol, mj.pol) * _box_average(mj.k - mi.k, box)
    dev = np.abs(gram - np.eye(n))
    violations = [(i, j, float(dev[i, j])) for i in range(n) for j in range(n) if dev[i, j] > tol]
    transv = max((abs(m.k @ m.pol) for m in modes), default=0.0)
    return OrthonormalityReport(gram, float(dev.max(initial=0.0)), violations, float(transv), tol)


@dataclass(frozen=True)
class CouplingBundle:
    """Numbers feeding one Hamiltonian build.

    ``g`` is the operator coefficient actually placed in front of the
    interaction term (alpha * beta, or alpha * mismatch in collinear form).
    """

    alpha: complex = 0j
    beta: complex = 1 + 0j
    mismatch: complex = 1 + 0j
    delta_k: float = 0.0
    g: complex = 0j

    def __post_init__(self):
        if abs(self.mismatch) > 1 + 1e-12:
            raise ValueError(f"|mismatch| = {abs(self.mismatch)!r} exceeds 1")

    def as_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "beta": self.beta,
            "mismatch": self.mismatch,
            "delta_k": self.delta_k,
            "g": self.g,
        }
