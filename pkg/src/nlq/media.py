"""Medium description: dielectric function and nonlinear susceptibilities.

Grid file format (``.grid``, plain text)::

    NLQGRID 1
    nx ny nz Lx Ly Lz ncomp
    <nx*ny*nz lines, row-major with z fastest, ncomp numbers per line>

Sample (ix, iy, iz) sits at r = (ix*Lx/nx, iy*Ly/ny, iz*Lz/nz); the grid is
periodic. For dielectric grids ``ncomp`` is 1 (scalar), 6 (xx yy zz xy xz yz)
or 9 (full row-major 3x3). For 2D transverse profiles use nz = 1, Lz = 1 and
``ncomp`` 1 (real) or 2 (re im).

Lines starting with ``#`` are ignored.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .errors import (
    ConfigError,
    FrequencyLookupError,
    InvalidGeometryError,
    NonPositiveDielectricError,
    ProcessMismatchError,
    SingularDielectricError,
)

SYMMETRY_TOL = 1e-14
FREQ_RTOL = 1e-9
_SINGULAR_TOL = 1e-12


def frequencies_match(w1: float, w2: float, rtol: float = FREQ_RTOL) -> bool:
    return abs(w1 - w2) <= rtol * max(abs(w1), abs(w2), 1e-300)


# --------------------------------------------------------------------------- #
# dielectric function


@dataclass(frozen=True)
class Box:
    """Periodic quantization box with edge lengths (Lx, Ly, Lz)."""

    lengths: tuple[float, float, float]

    def __post_init__(self):
        lengths = tuple(float(v) for v in self.lengths)
        if len(lengths) != 3 or any(not np.isfinite(v) or v <= 0 for v in lengths):
            raise InvalidGeometryError(f"box lengths must be three positive numbers, got {self.lengths!r}")
        object.__setattr__(self, "lengths", lengths)

    @property
    def volume(self) -> float:
        return self.lengths[0] * self.lengths[1] * self.lengths[2]

    def reciprocal_index(self, k, atol: float = 1e-9) -> tuple[int, int, int] | None:
        """Integer lattice index m with k = 2*pi*m/L, or None when k is off-lattice."""
        m = np.asarray(k, dtype=float) * np.asarray(self.lengths) / (2 * np.pi)
        r = np.rint(m)
        if np.all(np.abs(m - r) <= atol * np.maximum(1.0, np.abs(m))):
            return tuple(int(v) for v in r)
        return None


def _point(flat_index, shape) -> tuple[int, ...]:
    return tuple(int(v) for v in np.unravel_index(flat_index, shape))


def _check_samples(eps: np.ndarray) -> None:
    """Raise unless every 3x3 sample is real symmetric positive definite."""
    flat = eps.reshape(-1, 3, 3)
    if not np.all(np.isfinite(flat)):
        raise NonPositiveDielectricError("dielectric samples must be finite")
    asym = np.abs(flat - np.swapaxes(flat, 1, 2)).max(axis=(1, 2))
    scale = np.abs(flat).max(axis=(1, 2))
    bad = np.nonzero(asym > 1e-12 * np.maximum(scale, 1.0))[0]
    if bad.size:
        idx = _point(bad[0], eps.shape[:-2])
        raise NonPositiveDielectricError(f"dielectric sample at grid point {idx} is not symmetric")
    evals = np.linalg.eigvalsh(flat)
    lo = evals[:, 0]
    singular = np.nonzero(np.abs(lo) <= _SINGULAR_TOL * np.maximum(evals[:, -1], 1.0))[0]
    if singular.size:
        idx = _point(singular[0], eps.shape[:-2])
        raise SingularDielectricError(f"dielectric sample at grid point {idx} is singular (eigenvalue {lo[singular[0]]:.3g})")
    neg = np.nonzero(lo <= 0)[0]
    if neg.size:
        idx = _point(neg[0], eps.shape[:-2])
        raise NonPositiveDielectricError(
            f"dielectric sample at grid point {idx} is not positive definite (eigenvalue {lo[neg[0]]:.3g})"
        )


@dataclass(frozen=True, eq=False)
class DielectricSpec:
    """Either a homogeneous scalar ``epsilon`` or a periodic grid of 3x3 tensors.

    ``grid`` has shape (nx, ny, nz, 3, 3); ``box`` gives the periodic cell.
    """

    epsilon: float | None = None
    grid: np.ndarray | None = None
    box: Box | None = None

    def __post_init__(self):
        if (self.epsilon is None) == (self.grid is None):
            raise ConfigError("DielectricSpec needs exactly one of epsilon or grid")
        if self.epsilon is not None:
            eps = float(self.epsilon)
            if eps == 0.0:
                raise SingularDielectricError("homogeneous epsilon = 0 is singular")
            if not np.isfinite(eps) or eps < 0:
                raise NonPositiveDielectricError(f"homogeneous epsilon must be > 0, got {self.epsilon!r}")
            object.__setattr__(self, "epsilon", eps)
            return
        grid = np.array(self.grid, dtype=float)
        if grid.ndim == 3:
            grid = grid[..., None, None] * np.eye(3)
        if grid.ndim != 5 or grid.shape[-2:] != (3, 3):
            raise ConfigError(f"dielectric grid must have shape (nx, ny, nz, 3, 3), got {grid.shape}")
        if self.box is None:
            raise ConfigError("grid dielectric needs a box")
        _check_samples(grid)
        grid.setflags(write=False)
        object.__setattr__(self, "grid", grid)

    @classmethod
    def homogeneous(cls, epsilon: float) -> "DielectricSpec":
        return cls(epsilon=epsilon)

    @classmethod
    def from_grid(cls, grid, lengths) -> "DielectricSpec":
        return cls(grid=grid, box=Box(tuple(lengths)))

    @property
    def is_homogeneous(self) -> bool:
        return self.epsilon is not None

    @property
    def shape(self) -> tuple[int, int, int]:
        return tuple(self.grid.shape[:3]) if self.grid is not None else (1, 1, 1)

    @cached_property
    def contrast(self) -> np.ndarray:
        """Fourier table of (1 - eps^-1); see :func:`contrast_transform`."""
        return contrast_transform(self)


def contrast_transform(spec: DielectricSpec) -> np.ndarray:
    """Per-component discrete Fourier coefficients of (1 - eps(r)^-1).

    Returns an array of shape (nx, ny, nz, 3, 3) with
    ``C[m] = mean_r (1 - eps^-1)(r) exp(-i G_m . r)``, G_m = 2 pi m / L, so that
    ``C[0]`` is the volume average. Homogeneous specs give a (1, 1, 1, 3, 3)
    table holding only the zero-frequency coefficient.
    """
    if spec.is_homogeneous:
        out = np.zeros((1, 1, 1, 3, 3), dtype=complex)
        out[0, 0, 0] = (1.0 - 1.0 / spec.epsilon) * np.eye(3)
        return out
    try:
        inv = np.linalg.inv(spec.grid)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - _check_samples rejects these first
        raise SingularDielectricError(str(exc)) from exc
    eta = np.eye(3) - inv
    n_points = np.prod(spec.shape)
    return np.fft.fftn(eta, axes=(0, 1, 2)) / n_points


def contrast_coefficient(spec: DielectricSpec, q) -> np.ndarray:
    """The 3x3 box average of (1 - eps^-1) exp(+i q.r) for a lattice vector q."""
    q = np.asarray(q, dtype=float)
    if spec.is_homogeneous:
        if np.all(np.abs(q) <= 1e-9 * max(1.0, float(np.abs(q).max(initial=0.0)))):
            return spec.contrast[0, 0, 0]
        return np.zeros((3, 3), dtype=complex)
    m = spec.box.reciprocal_index(q)
    if m is None:
        raise InvalidGeometryError(f"wavevector sum {q} is not on the reciprocal lattice of the dielectric box")
    nx, ny, nz = spec.shape
    # exp(+i q r) picks the coefficient at -m
    return spec.contrast[(-m[0]) % nx, (-m[1]) % ny, (-m[2]) % nz]


def read_grid_file(path) -> tuple[np.ndarray, tuple[float, float, float], int]:
    """Parse a ``.grid`` file into (samples, lengths, ncomp); samples shape (nx, ny, nz, ncomp)."""
    path = Path(path)
    lines = [ln for ln in path.read_text().splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines or lines[0].split()[:2] != ["NLQGRID", "1"]:
        raise ConfigError(f"{path}: missing 'NLQGRID 1' magic line")
    try:
        head = lines[1].split()
        nx, ny, nz = (int(v) for v in head[:3])
        lengths = tuple(float(v) for v in head[3:6])
        ncomp = int(head[6])
        data = np.array([[float(v) for v in ln.split()] for ln in lines[2:]], dtype=float)
    except (IndexError, ValueError) as exc:
        raise ConfigError(f"{path}: malformed grid file ({exc})") from exc
    if data.shape != (nx * ny * nz, ncomp):
        raise ConfigError(f"{path}: expected {nx * ny * nz} rows of {ncomp} values, got {data.shape}")
    return data.reshape(nx, ny, nz, ncomp), lengths, ncomp


def write_grid_file(path, samples: np.ndarray, lengths: Sequence[float]) -> None:
    samples = np.asarray(samples, dtype=float)
    if samples.ndim == 3:
        samples = samples[..., None]
    nx, ny, nz, ncomp = samples.shape
    rows = samples.reshape(-1, ncomp)
    with open(path, "w") as fh:
        fh.write("NLQGRID 1\n")
        fh.write(f"{nx} {ny} {nz} {' '.join(repr(float(v)) for v in lengths)} {ncomp}\n")
        for row in rows:
            fh.write(" ".join(repr(float(v)) for v in row) + "\n")


def load_dielectric(path) -> DielectricSpec:
    samples, lengths, ncomp = read_grid_file(path)
    if ncomp == 1:
        grid = samples[..., 0]
    elif ncomp == 6:
        xx, yy, zz, xy, xz, yz = np.moveaxis(samples, -1, 0)
        grid = np.stack(
            [np.stack([xx, xy, xz], -1), np.stack([xy, yy, yz], -1), np.stack([xz, yz, zz], -1)], -2
        )
    elif ncomp == 9:
        grid = samples.reshape(samples.shape[:3] + (3, 3))
    else:
        raise ConfigError(f"{path}: dielectric grids need ncomp in (1, 6, 9), got {ncomp}")
    return DielectricSpec.from_grid(grid, lengths)


# --------------------------------------------------------------------------- #
# nonlinear susceptibilities


def _permutation_residual(t: np.ndarray) -> float:
    resid = 0.0
    for perm in itertools.permutations(range(t.ndim)):
        resid = max(resid, float(np.abs(t - np.transpose(t, perm)).max()))
    return resid


def _symmetrize(raw, rank: int) -> np.ndarray:
    t = np.asarray(raw, dtype=complex).reshape((3,) * rank)
    perms = list(itertools.permutations(range(rank)))
    return sum(np.transpose(t, p) for p in perms) / len(perms)


def _check_symmetric(t: np.ndarray, name: str) -> None:
    resid = _permutation_residual(t)
    if resid > SYMMETRY_TOL * max(1.0, float(np.abs(t).max())):
        raise ValueError(f"{name} lacks full permutation symmetry (residual {resid:.3e}); use symmetrize")


@dataclass(frozen=True, eq=False)
class Chi2Tensor:
    """Fully permutation-symmetric chi(2) for omega3 = omega1 + omega2."""

    components: np.ndarray
    frequencies: tuple[float, float, float]

    def __post_init__(self):
        t = np.array(self.components, dtype=complex).reshape(3, 3, 3)
        _check_symmetric(t, "chi2")
        w1, w2, w3 = (float(w) for w in self.frequencies)
        if not frequencies_match(w3, w1 + w2):
            raise ProcessMismatchError(f"chi2 frequencies violate w3 = w1 + w2: {(w1, w2, w3)}")
        t.setflags(write=False)
        object.__setattr__(self, "components", t)
        object.__setattr__(self, "frequencies", (w1, w2, w3))


@dataclass(frozen=True, eq=False)
class Chi3Tensor:
    """Fully permutation-symmetric chi(3) for omega4 = omega1 + omega2 - omega3."""

    components: np.ndarray
    frequencies: tuple[float, float, float, float]

    def __post_init__(self):
        t = np.array(self.components, dtype=complex).reshape(3, 3, 3, 3)
        _check_symmetric(t, "chi3")
        w1, w2, w3, w4 = (float(w) for w in self.frequencies)
        if not frequencies_match(w3 + w4, w1 + w2):
            raise ProcessMismatchError(f"chi3 frequencies violate w3 + w4 = w1 + w2: {(w1, w2, w3, w4)}")
        t.setflags(write=False)
        object.__setattr__(self, "components", t)
        object.__setattr__(self, "frequencies", (w1, w2, w3, w4))


def symmetrize_chi2(raw, frequencies) -> Chi2Tensor:
    """Average the 27 raw components over all 6 index permutations."""
    return Chi2Tensor(_symmetrize(raw, 3), tuple(frequencies))


def symmetrize_chi3(raw, frequencies) -> Chi3Tensor:
    return Chi3Tensor(_symmetrize(raw, 4), tuple(frequencies))


def symmetrization_correction(raw, rank: int) -> float:
    """max|raw - symmetrized raw|: how far an input was from full permutation symmetry."""
    raw = np.asarray(raw, dtype=complex).reshape((3,) * rank)
    return float(np.abs(raw - _symmetrize(raw, rank)).max())


@dataclass(frozen=True)
class RefractiveIndexTable:
    entries: tuple[tuple[float, float], ...]

    def __post_init__(self):
        entries = tuple((float(w), float(n)) for w, n in self.entries)
        for w, n in entries:
            if not n > 0:
                raise ValueError(f"refractive index must be > 0, got n({w}) = {n}")
        object.__setattr__(self, "entries", entries)

    @classmethod
    def from_mapping(cls, table: Mapping[float, float]) -> "RefractiveIndexTable":
        return cls(tuple(table.items()))

    def __call__(self, omega: float) -> float:
        for w, n in self.entries:
            if frequencies_match(w, omega):
                return n
        raise FrequencyLookupError(f"no refractive index for omega = {omega!r}")


def gamma2(chi2: Chi2Tensor, n: RefractiveIndexTable) -> np.ndarray:
    """Inverse-susceptibility tensor chi / (n1^2 n2^2 n3^2) used when E is written in terms of D."""
    n1, n2, n3 = (n(w) for w in chi2.frequencies)
    return chi2.components / (n1**2 * n2**2 * n3**2)
