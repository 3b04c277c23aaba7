"""Schrodinger evolution, Heisenberg generators and conservation checks."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np
import scipy.sparse.linalg as spla

from .errors import DimensionMismatchError, NotHermitianError, ProcessMismatchError
from .fock import (
    HERMITIAN_RTOL,
    FockBasis,
    ModeOperators,
    OperatorMatrix,
    QuantumState,
    commutator,
    hermiticity_residual,
    max_abs,
    zero,
)
from .hamiltonians import HamiltonianBundle
from .modes import Mode

DENSE_DIM_THRESHOLD = 4096
TRUNCATION_THRESHOLD = 1e-6


class TruncationWarning(UserWarning):
    pass


@dataclass
class Trajectory:
    times: np.ndarray
    amplitudes: np.ndarray  # (n_times, dim)
    basis: FockBasis
    observables: dict[str, np.ndarray] = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)

    @property
    def states(self) -> list[QuantumState]:
        return [QuantumState(psi / np.linalg.norm(psi), self.basis) for psi in self.amplitudes]

    @property
    def norms(self) -> np.ndarray:
        return np.linalg.norm(self.amplitudes, axis=1)


def mode_observables(basis: FockBasis, ops: ModeOperators | None = None) -> dict[str, OperatorMatrix]:
    """``N_j`` and ``a_j`` for every mode j."""
    ops = ops or ModeOperators(basis)
    out: dict[str, OperatorMatrix] = {}
    for j in range(basis.mode_count):
        out[f"N_{j}"] = ops.n[j]
        out[f"a_{j}"] = ops.a[j]
    return out


def _expect_series(amps: np.ndarray, op: OperatorMatrix) -> np.ndarray:
    applied = (op.entries @ amps.T).T
    vals = np.einsum("ti,ti->t", amps.conj(), applied)
    return vals.real.astype(complex) if op.hermitian_hint else vals


def cutoff_population(amps: np.ndarray, basis: FockBasis) -> np.ndarray:
    """Per time sample, sum over modes of P(n_i = n_max_i)."""
    occ = basis.occupation_table()
    probs = np.abs(amps) ** 2
    total = np.zeros(amps.shape[0])
    for i, n_max in enumerate(basis.truncations):
        total += probs[:, occ[:, i] == n_max].sum(axis=1)
    return total


def evolve(
    h: OperatorMatrix,
    psi0: QuantumState,
    times: Sequence[float],
    observables: Mapping[str, OperatorMatrix] | None = None,
    hbar: float = 1.0,
    dense_threshold: int = DENSE_DIM_THRESHOLD,
    truncation_threshold: float = TRUNCATION_THRESHOLD,
) -> Trajectory:
    """Propagate psi0 under exp(-i h t / hbar) to each requested time.

    Dense eigendecomposition below ``dense_threshold``; above it, scipy's
    ``expm_multiply`` steps between consecutive samples. The energy ``<h>`` is
    always recorded as the ``energy`` observable. A truncation warning is
    attached when the population at any cutoff exceeds
    ``truncation_threshold``.
    """
    if h.dim != psi0.dim:
        raise DimensionMismatchError(f"h has dim {h.dim}, state has dim {psi0.dim}")
    res = hermiticity_residual(h.entries)
    if res > HERMITIAN_RTOL * max(max_abs(h.entries), 1e-300):
        raise NotHermitianError(f"evolve needs a hermitian h (residual {res:.3e})")
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.size == 0 or times[0] != 0 or np.any(np.diff(times) < 0):
        raise ValueError("times must be a non-empty ascending sequence starting at 0")
    psi = psi0.amplitudes
    if h.dim <= dense_threshold:
        evals, evecs = np.linalg.eigh(h.toarray())
        coeff = evecs.conj().T @ psi
        phases = np.exp(-1j * np.outer(times, evals) / hbar)
        amps = (phases * coeff) @ evecs.T
    else:
        gen = (-1j / hbar) * h.entries.tocsc()
        amps = np.empty((times.size, h.dim), dtype=complex)
        amps[0] = psi
        for i in range(1, times.size):
            dt = times[i] - times[i - 1]
            amps[i] = spla.expm_multiply(gen * dt, amps[i - 1]) if dt > 0 else amps[i - 1]
    obs = dict(observables or {})
    traj = Trajectory(times, amps, psi0.basis)
    traj.observables["energy"] = _expect_series(amps, h)
    for name, op in obs.items():
        traj.observables[name] = _expect_series(amps, op)
    top = cutoff_population(amps, psi0.basis)
    if top.max() > truncation_threshold:
        msg = f"truncation: cutoff population reached {top.max():.3e} (threshold {truncation_threshold:.1e})"
        traj.warnings.append(msg)
        warnings.warn(msg, TruncationWarning, stacklevel=2)
    return traj


def heisenberg_rhs(h: OperatorMatrix, op: OperatorMatrix, hbar: float = 1.0) -> OperatorMatrix:
    """(i/hbar)[h, op]."""
    if h.dim != op.dim:
        raise DimensionMismatchError(f"h has dim {h.dim}, op has dim {op.dim}")
    return (1j / hbar) * commutator(h, op)


def conserved_residual(h: OperatorMatrix, op: OperatorMatrix) -> float:
    """max-entry norm of [h, op]."""
    return max_abs(commutator(h, op).entries)


def coupled_mode_generator(bundle: HamiltonianBundle, j: int, ops: ModeOperators | None = None) -> OperatorMatrix:
    """Hand-derived right-hand side of d a_j / dt for the three- and four-wave Hamiltonians.

    Parametric, H = sum hbar w N + g a3^dag a2 a1 + h.c.:
        a1: -i w1 a1 - (i/hbar) g* a2^dag a3
        a2: -i w2 a2 - (i/hbar) g* a1^dag a3
        a3: -i w3 a3 - (i/hbar) g  a2 a1
    Four-wave, H = sum hbar w N + g a3^dag a4^dag a2 a1 + h.c.:
        a1: -i w1 a1 - (i/hbar) g* a2^dag a3 a4
        a2: -i w2 a2 - (i/hbar) g* a1^dag a3 a4
        a3: -i w3 a3 - (i/hbar) g  a4^dag a2 a1
        a4: -i w4 a4 - (i/hbar) g  a3^dag a2 a1
    Valid on rows whose occupations are all below the cutoff.
    """
    ops = ops or ModeOperators(bundle.basis)
    a, ad = ops.a, ops.a_dag
    g, hbar = bundle.couplings.g, bundle.hbar
    gc = np.conj(g)
    free = (-1j * bundle.omegas[j]) * a[j]
    k = -1j / hbar
    if bundle.kind == "parametric3":
        coupling = {
            0: gc * (ad[1] @ a[2]),
            1: gc * (ad[0] @ a[2]),
            2: g * (a[1] @ a[0]),
        }[j]
    elif bundle.kind == "fwm4":
        coupling = {
            0: gc * (ad[1] @ a[2] @ a[3]),
            1: gc * (ad[0] @ a[2] @ a[3]),
            2: g * (ad[3] @ a[1] @ a[0]),
            3: g * (ad[2] @ a[1] @ a[0]),
        }[j]
    else:
        raise ProcessMismatchError(f"no coupled-mode generator for {bundle.kind!r}")
    return free + k * coupling


def heisenberg_witness(bundle: HamiltonianBundle, j: int) -> float:
    """max |(i/hbar)[h, a_j] - generator| over below-cutoff rows."""
    ops = ModeOperators(bundle.basis)
    numeric = heisenberg_rhs(bundle.h, ops.a[j], bundle.hbar).toarray()
    hand = coupled_mode_generator(bundle, j, ops).toarray()
    rows = bundle.basis.below_cutoff()
    return float(np.abs(numeric[rows] - hand[rows]).max(initial=0.0))


def conserved_set(bundle: HamiltonianBundle) -> dict[str, OperatorMatrix]:
    """Operators that commute exactly with the Hamiltonian of a given kind."""
    ops = ModeOperators(bundle.basis)
    N = ops.n
    out: dict[str, OperatorMatrix] = {"h": bundle.h}
    if bundle.kind == "parametric3":
        out["N1+N3"] = N[0] + N[2]
        out["N2+N3"] = N[1] + N[2]
    elif bundle.kind == "fwm4":
        out["N1+N3"] = N[0] + N[2]
        out["N1-N2"] = N[0] - N[1]
        out["N3-N4"] = N[2] - N[3]
        out["N_total"] = ops.total_number()
    elif bundle.kind == "classical_pump":
        out["N1-N2"] = N[0] - N[1]
    elif bundle.kind == "linear" and np.all(bundle.terms.get("c_pp", 0) == 0):
        out["N_total"] = ops.total_number()
    return out


def conserved_report(bundle: HamiltonianBundle) -> dict[str, float]:
    return {name: conserved_residual(bundle.h, op) for name, op in conserved_set(bundle).items()}


def reconstruct_amplitudes(traj: Trajectory, modes: Sequence[Mode], box_volume: float, hbar: float = 1.0) -> dict[str, np.ndarray]:
    """Slowly varying D amplitudes i sqrt(hbar w n^2 / 2) <a_j(t)> / sqrt(V).

    The plane-wave spatial factor exp(i k.r) is left out.
    """
    out = {}
    for j, m in enumerate(modes):
        key = f"a_{j}"
        if key not in traj.observables:
            raise KeyError(f"trajectory lacks observable {key!r}")
        pref = 1j * np.sqrt(hbar * m.omega * m.n**2 / 2) / np.sqrt(box_volume)
        out[f"D_{j}"] = pref * traj.observables[key]
    return out


def energy_drift(traj: Trajectory) -> float:
    e = traj.observables["energy"].real
    return float(np.abs(e - e[0]).max())


def norm_drift(traj: Trajectory) -> float:
    return float(np.abs(traj.norms - 1.0).max())
