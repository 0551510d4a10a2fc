"""Quasi-exactly solvable polynomial potentials from nilpotent group representations."""
from .em import EmProblem, em_fields, em_residual, lift_to_3d, plane_wave_eigenfunction, reduce_to_1d
from .group import (
    BetaVector,
    CasimirSet,
    GroupElement,
    antiderivative_XN,
    betas_from_casimirs,
    casimir,
    casimirs,
    generator_coeffs,
    generator_poly,
    group_inverse,
    group_product,
    matrix_A,
    reexpress_Xk,
    representation_apply,
    scale_betas,
)
from .oracle import (
    OracleReport,
    PotentialSpec,
    count_nodes,
    count_nodes_solution,
    fd_eigensolve,
    potential_eval,
    schrodinger_residual,
    verify_solution,
    wavefunction_eval,
)
from .recursion import QesProblem, alpha_for, derive_alpha_and_topcoeff, residual_vector, scaled_residual
from .solver import (
    QesSolution,
    Solutions,
    harmonic_solution,
    solve_betas,
    solve_catalogued,
    solve_fixed_casimirs,
    solve_generic,
    solve_zero_energy,
)
from .symmetric import (
    ParitySolution,
    continuity_even_residual,
    continuity_odd_residual,
    solve_symmetrized,
    solve_symmetrized_betas,
    tilde_betas,
)

__version__ = "0.1.0"
