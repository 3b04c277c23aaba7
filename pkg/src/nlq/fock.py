"""Truncated bosonic Fock spaces: ladder operators, embeddings, states.

Operators are scipy CSR matrices wrapped in :class:`OperatorMatrix`; states are
dense complex vectors. Composite bases are ordered lexicographically in the
occupation tuple with mode 0 varying slowest, so ``embed`` is a plain
Kronecker product in mode order.

Truncation policy is a hard cutoff: ``a_dag |n_max> = 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.sparse as sp
from scipy.special import gammaln

from .errors import (
    DimensionMismatchError,
    InvalidTruncationError,
    NotHermitianError,
    OutOfRangeError,
)

HERMITIAN_RTOL = 1e-12


@dataclass(frozen=True)
class FockBasis:
    truncations: tuple[int, ...]

    def __post_init__(self):
        truncs = tuple(int(n) for n in self.truncations)
        if not truncs:
            raise InvalidTruncationError("basis needs at least one mode")
        for n, raw in zip(truncs, self.truncations):
            if n < 1 or n != raw:
                raise InvalidTruncationError(f"truncation must be an integer >= 1, got {raw!r}")
        object.__setattr__(self, "truncations", truncs)

    @property
    def mode_count(self) -> int:
        return len(self.truncations)

    @property
    def local_dims(self) -> tuple[int, ...]:
        return tuple(n + 1 for n in self.truncations)

    @property
    def dim(self) -> int:
        return math.prod(self.local_dims)

    def index(self, occupations: Sequence[int]) -> int:
        """Lexicographic index of an occupation tuple (mode 0 slowest)."""
        if len(occupations) != self.mode_count:
            raise DimensionMismatchError(
                f"expected {self.mode_count} occupations, got {len(occupations)}"
            )
        idx = 0
        for n, n_max in zip(occupations, self.truncations):
            if not 0 <= n <= n_max:
                raise OutOfRangeError(f"occupation {n} outside [0, {n_max}]")
            idx = idx * (n_max + 1) + int(n)
        return idx

    def occupations(self, index: int) -> tuple[int, ...]:
        if not 0 <= index < self.dim:
            raise OutOfRangeError(f"basis index {index} outside [0, {self.dim})")
        return tuple(int(v) for v in np.unravel_index(index, self.local_dims))

    def occupation_table(self) -> np.ndarray:
        """(dim, mode_count) integer array; row r is the occupation tuple of index r."""
        grids = np.indices(self.local_dims).reshape(self.mode_count, -1)
        return grids.T.copy()

    def below_cutoff(self) -> np.ndarray:
        """Boolean mask of basis states with every occupation strictly below its cutoff."""
        occ = self.occupation_table()
        return np.all(occ < np.asarray(self.truncations), axis=1)


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    entries: sp.csr_matrix
    hermitian_hint: bool = False

    def __post_init__(self):
        m = sp.csr_matrix(self.entries, dtype=complex)
        if m.shape[0] != m.shape[1]:
            raise DimensionMismatchError(f"operator must be square, got {m.shape}")
        m.sum_duplicates()
        object.__setattr__(self, "entries", m)
        if self.hermitian_hint:
            res = hermiticity_residual(m)
            scale = max_abs(m)
            if res > HERMITIAN_RTOL * scale:
                raise NotHermitianError(
                    f"hermitian_hint set but max|M - M^dag| = {res:.3e} (max|M| = {scale:.3e})"
                )

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def dag(self) -> "OperatorMatrix":
        return OperatorMatrix(self.entries.conj().T.tocsr(), self.hermitian_hint)

    def toarray(self) -> np.ndarray:
        return self.entries.toarray()

    def _check(self, other: "OperatorMatrix"):
        if other.dim != self.dim:
            raise DimensionMismatchError(f"dimensions differ: {self.dim} vs {other.dim}")

    def __add__(self, other):
        self._check(other)
        return OperatorMatrix(self.entries + other.entries, self.hermitian_hint and other.hermitian_hint)

    def __sub__(self, other):
        self._check(other)
        return OperatorMatrix(self.entries - other.entries, self.hermitian_hint and other.hermitian_hint)

    def __matmul__(self, other):
        self._check(other)
        return OperatorMatrix(self.entries @ other.entries)

    def __mul__(self, scalar):
        scalar = complex(scalar)
        return OperatorMatrix(self.entries * scalar, self.hermitian_hint and scalar.imag == 0.0)

    __rmul__ = __mul__

    def __neg__(self):
        return OperatorMatrix(-self.entries, self.hermitian_hint)


def max_abs(m) -> float:
    m = sp.csr_matrix(m)
    return float(np.abs(m.data).max()) if m.nnz else 0.0


def hermiticity_residual(m) -> float:
    """max|M - M^dag| over all entries."""
    m = sp.csr_matrix(m)
    return max_abs(m - m.conj().T)


def commutator(a: OperatorMatrix, b: OperatorMatrix) -> OperatorMatrix:
    return a @ b - b @ a


def identity(dim: int) -> OperatorMatrix:
    return OperatorMatrix(sp.identity(dim, dtype=complex, format="csr"), hermitian_hint=True)


def zero(dim: int) -> OperatorMatrix:
    return OperatorMatrix(sp.csr_matrix((dim, dim), dtype=complex), hermitian_hint=True)


def make_ladder(n_max: int) -> tuple[OperatorMatrix, OperatorMatrix]:
    """Annihilation and creation matrices on occupations 0..n_max.

    ``a[n-1, n] = sqrt(n)``; the cutoff row of ``a_dag`` is empty.
    """
    if int(n_max) != n_max or n_max < 1:
        raise InvalidTruncationError(f"n_max must be an integer >= 1, got {n_max!r}")
    n_max = int(n_max)
    diag = np.sqrt(np.arange(1, n_max + 1, dtype=float))
    a = sp.diags(diag, offsets=1, shape=(n_max + 1, n_max + 1), format="csr", dtype=complex)
    a_op = OperatorMatrix(a)
    return a_op, a_op.dag()


def number_operator(n_max: int) -> OperatorMatrix:
    n = np.arange(n_max + 1, dtype=float)
    return OperatorMatrix(sp.diags(n, format="csr", dtype=complex), hermitian_hint=True)


def embed(op: OperatorMatrix, mode_index: int, basis: FockBasis) -> OperatorMatrix:
    """Lift a single-mode operator to the composite space: I x ... x op x ... x I."""
    if not 0 <= mode_index < basis.mode_count:
        raise OutOfRangeError(f"mode index {mode_index} outside [0, {basis.mode_count})")
    local = basis.local_dims[mode_index]
    if op.dim != local:
        raise DimensionMismatchError(
            f"operator has dim {op.dim}, mode {mode_index} needs {local}"
        )
    before = math.prod(basis.local_dims[:mode_index])
    after = math.prod(basis.local_dims[mode_index + 1:])
    m = op.entries
    if before > 1:
        m = sp.kron(sp.identity(before, format="csr"), m, format="csr")
    if after > 1:
        m = sp.kron(m, sp.identity(after, format="csr"), format="csr")
    return OperatorMatrix(m, op.hermitian_hint)


@dataclass(frozen=True)
class ModeOperators:
    """Embedded a, a_dag and N for every mode of a basis."""

    basis: FockBasis
    a: tuple[OperatorMatrix, ...] = field(init=False)
    a_dag: tuple[OperatorMatrix, ...] = field(init=False)
    n: tuple[OperatorMatrix, ...] = field(init=False)

    def __post_init__(self):
        a_list, ad_list, n_list = [], [], []
        for i, n_max in enumerate(self.basis.truncations):
            a, ad = make_ladder(n_max)
            a_list.append(embed(a, i, self.basis))
            ad_list.append(embed(ad, i, self.basis))
            n_list.append(embed(number_operator(n_max), i, self.basis))
        object.__setattr__(self, "a", tuple(a_list))
        object.__setattr__(self, "a_dag", tuple(ad_list))
        object.__setattr__(self, "n", tuple(n_list))

    def total_number(self) -> OperatorMatrix:
        out = zero(self.basis.dim)
        for n in self.n:
            out = out + n
        return out


@dataclass(frozen=True, eq=False)
class QuantumState:
    amplitudes: np.ndarray
    basis: FockBasis

    def __post_init__(self):
        psi = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if psi.shape[0] != self.basis.dim:
            raise DimensionMismatchError(
                f"state has {psi.shape[0]} amplitudes, basis dim is {self.basis.dim}"
            )
        norm = np.linalg.norm(psi)
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(f"state norm {norm!r} differs from 1")
        psi.setflags(write=False)
        object.__setattr__(self, "amplitudes", psi)

    @property
    def dim(self) -> int:
        return self.basis.dim


def number_state(occupations: Sequence[int], basis: FockBasis) -> QuantumState:
    psi = np.zeros(basis.dim, dtype=complex)
    psi[basis.index(occupations)] = 1.0
    return QuantumState(psi, basis)


def coherent_state(alpha: complex, n_max: int) -> tuple[QuantumState, float]:
    """Truncated coherent state renormalized to unit norm.

    Returns ``(state, tail_mass)`` where ``tail_mass`` is the Poisson weight
    lost above ``n_max``; callers decide whether it is acceptable.
    """
    basis = FockBasis((n_max,))
    if alpha == 0:
        return number_state((0,), basis), 0.0
    n = np.arange(n_max + 1)
    # log-space keeps n! finite for large cutoffs
    log_mag = -0.5 * abs(alpha) ** 2 + n * np.log(abs(alpha)) - 0.5 * gammaln(n + 1)
    coeffs = np.exp(log_mag) * np.exp(1j * np.angle(alpha) * n)
    kept = float(np.sum(np.abs(coeffs) ** 2))
    tail = max(0.0, 1.0 - kept)
    psi = coeffs / np.linalg.norm(coeffs)
    return QuantumState(psi, basis), tail


def product_state(states: Sequence[QuantumState]) -> QuantumState:
    """Tensor product of single-mode states in the given mode order."""
    truncs: list[int] = []
    psi = np.ones(1, dtype=complex)
    for s in states:
        truncs.extend(s.basis.truncations)
        psi = np.kron(psi, s.amplitudes)
    return QuantumState(psi / np.linalg.norm(psi), FockBasis(tuple(truncs)))


def expectation(state: QuantumState, op: OperatorMatrix) -> complex:
    if state.dim != op.dim:
        raise DimensionMismatchError(f"state dim {state.dim} vs operator dim {op.dim}")
    psi = state.amplitudes
    value = complex(np.vdot(psi, op.entries @ psi))
    if op.hermitian_hint:
        value = complex(value.real, 0.0)
    return value
