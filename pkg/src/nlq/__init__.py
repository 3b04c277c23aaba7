"""Quantized-field Hamiltonians for linear inhomogeneous and nonlinear media."""

from .bogoliubov import QuadraticForm, bogoliubov_diagonalize, extract_quadratic
from .dynamics import (
    Trajectory,
    conserved_residual,
    evolve,
    heisenberg_rhs,
    reconstruct_amplitudes,
)
from .fock import (
    FockBasis,
    OperatorMatrix,
    QuantumState,
    coherent_state,
    embed,
    expectation,
    make_ladder,
    number_state,
)
from .hamiltonians import (
    HamiltonianBundle,
    ProcessSpec,
    alpha2,
    alpha3,
    build_fwm,
    build_linear_inhomogeneous,
    build_parametric,
    classical_pump_reduce,
    squeezing_hamiltonian,
)
from .media import (
    Box,
    Chi2Tensor,
    Chi3Tensor,
    DielectricSpec,
    RefractiveIndexTable,
    contrast_transform,
    gamma2,
    symmetrize_chi2,
    symmetrize_chi3,
)
from .modes import (
    CouplingBundle,
    Mode,
    TransverseProfile,
    beta3,
    beta4,
    check_mode_orthonormality,
    mismatch_factor,
    overlap_convergence,
    transverse_overlap,
    v_coupling,
)

__version__ = "0.1.0"
