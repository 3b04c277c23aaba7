"""Bogoliubov diagonalization of quadratic bosonic Hamiltonians.

Convention::

    H = sum_ij A_ij a_i^dag a_j + 1/2 sum_ij (B_ij a_i^dag a_j^dag + conj(B_ij) a_j a_i)

with A hermitian and B symmetric. The Heisenberg equations for x = (a, a^dag)
read  i hbar dx/dt = D x  with the dynamical matrix D = [[A, B], [-B*, -A*]].
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ProcessMismatchError, UnstableMediumError
from .hamiltonians import HamiltonianBundle

STRUCTURE_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class QuadraticForm:
    A: np.ndarray
    B: np.ndarray
    labels: tuple[int, ...] = ()

    def __post_init__(self):
        A = np.array(self.A, dtype=complex)
        B = np.array(self.B, dtype=complex)
        n = A.shape[0]
        if A.shape != (n, n) or B.shape != (n, n):
            raise ValueError(f"A and B must be square and equal-sized, got {A.shape}, {B.shape}")
        scale = max(1.0, np.abs(A).max(initial=0.0), np.abs(B).max(initial=0.0))
        if np.abs(A - A.conj().T).max(initial=0.0) > STRUCTURE_TOL * scale:
            raise ValueError("A must be hermitian")
        if np.abs(B - B.T).max(initial=0.0) > STRUCTURE_TOL * scale:
            raise ValueError("B must be symmetric")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "labels", tuple(self.labels) or tuple(range(n)))

    @property
    def n_modes(self) -> int:
        return self.A.shape[0]

    def dynamical_matrix(self) -> np.ndarray:
        A, B = self.A, self.B
        return np.block([[A, B], [-B.conj(), -A.conj()]])

    def energy_matrix(self) -> np.ndarray:
        """M = J D = [[A, B], [B*, A*]]; H = x^dag M x / 2 + const."""
        A, B = self.A, self.B
        return np.block([[A, B], [B.conj(), A.conj()]])


def symplectic_form(n: int) -> np.ndarray:
    return np.diag(np.concatenate([np.ones(n), -np.ones(n)])).astype(complex)


def extract_quadratic(bundle: HamiltonianBundle) -> QuadraticForm:
    """Read A and B off the stored coefficient tables of a linear bundle."""
    if bundle.kind != "linear" or "c_pp" not in bundle.terms:
        raise ProcessMismatchError(f"extract_quadratic needs a linear bundle, got {bundle.kind!r}")
    c_pp, c_pm = bundle.terms["c_pp"], bundle.terms["c_pm"]
    A = np.diag(bundle.hbar * np.asarray(bundle.omegas, dtype=complex)) + c_pm + c_pm.conj().T
    B = c_pp + c_pp.T
    return QuadraticForm(A, B, bundle.terms.get("labels", ()))


def _cluster(values: np.ndarray, tol: float) -> list[list[int]]:
    order = np.argsort(values)
    groups: list[list[int]] = []
    for idx in order:
        if groups and abs(values[idx] - values[groups[-1][-1]]) <= tol:
            groups[-1].append(int(idx))
        else:
            groups.append([int(idx)])
    return groups


def bogoliubov_diagonalize(q: QuadraticForm, tol: float = 1e-9) -> tuple[np.ndarray, np.ndarray]:
    """Normal-mode energies (ascending) and the symplectic transform T.

    T maps (a, a^dag) to quasiparticle operators (b, b^dag) = T (a, a^dag) with
    ``T J T^dag = J``. Eigenvectors of the dynamical matrix with positive
    symplectic norm are kept; degenerate clusters are re-orthonormalized with
    the indefinite inner product x^dag J y (symplectic Gram-Schmidt).

    Raises UnstableMediumError when any eigenvalue is complex, zero, or when a
    positive-norm mode has negative energy (Hamiltonian not bounded below).
    """
    n = q.n_modes
    J = symplectic_form(n)
    D = q.dynamical_matrix()
    scale = max(1.0, float(np.abs(D).max()))
    evals, evecs = np.linalg.eig(D)
    bad = np.abs(evals.imag) > tol * scale
    if np.any(bad):
        raise UnstableMediumError(f"dynamical matrix has complex eigenvalue {evals[bad][0]!r}")
    evals = evals.real
    tiny = np.abs(evals) <= tol * scale
    if np.any(tiny):
        raise UnstableMediumError(f"zero-frequency normal mode (eigenvalue {evals[tiny][0]!r})")

    vecs: list[np.ndarray] = []
    energies: list[float] = []
    for group in _cluster(evals, 1e-8 * scale):
        sub = evecs[:, group]
        # orthonormalize within the cluster w.r.t. x^dag J y via eigendecomposition of the Gram matrix
        gram = sub.conj().T @ J @ sub
        gram = (gram + gram.conj().T) / 2
        g_vals, g_vecs = np.linalg.eigh(gram)
        if np.any(np.abs(g_vals) <= tol):
            raise UnstableMediumError(f"null symplectic norm at eigenvalue {evals[group[0]]!r}")
        for gv, gw in zip(g_vals, g_vecs.T):
            if gv > 0:
                w = sub @ gw / np.sqrt(gv)
                vecs.append(w)
                energies.append(float(np.mean(evals[group])))
    if len(vecs) != n:
        raise UnstableMediumError(f"found {len(vecs)} positive-norm modes, expected {n}")
    energies_arr = np.array(energies)
    if np.any(energies_arr <= 0):
        raise UnstableMediumError(f"positive-norm mode with non-positive energy {energies_arr.min()!r}")

    def dominant_label(w):
        return q.labels[int(np.argmax(np.abs(w[:n]) ** 2 + np.abs(w[n:]) ** 2))]

    order = sorted(range(n), key=lambda i: (round(energies[i] / (1e-8 * scale)), dominant_label(vecs[i])))
    energies_arr = energies_arr[order]
    W = np.column_stack([vecs[i] for i in order])
    U = W[:n].conj().T
    V = -W[n:].conj().T
    T = np.block([[U, V], [V.conj(), U.conj()]])
    return energies_arr, T


def symplectic_residual(T: np.ndarray) -> float:
    n = T.shape[0] // 2
    J = symplectic_form(n)
    return float(np.abs(T @ J @ T.conj().T - J).max())


def transformed_energy_matrix(q: QuadraticForm, T: np.ndarray) -> np.ndarray:
    """Energy matrix in quasiparticle variables; diagonal blocks diag(w), zero anomalous blocks."""
    n = q.n_modes
    J = symplectic_form(n)
    T_inv = J @ T.conj().T @ J
    return T_inv.conj().T @ q.energy_matrix() @ T_inv
