"""Bound-state spectra of the potential family V(r) = -f(beta/r)/r.

The library solves the radial eigenproblem for screened and truncated
Coulomb potentials, realizes the beta-scaling transformation, and checks
the derivative identity that forces beta^2 E_k(beta) to decrease and
every level to stay negative for all beta >= 0.
"""

from .hellmann_feynman import (
    HftReport,
    hft_check,
    residual_ladder,
    scaled_eigenvalue,
    scaling_consistency,
)
from .potentials import (
    DimensionfulInputs,
    Family,
    PotentialSpec,
    UnitReduction,
    potential_value,
    reduce_units,
    scaled_potential_value,
    screening_factor,
)
from .scans import (
    BetaScan,
    CountReport,
    SandwichReport,
    ScanCheck,
    ScanFailure,
    check_monotone_decrease,
    check_negativity,
    coulomb_sandwich,
    count_growth,
    fixed_step_ladder,
    run_beta_scan,
)
from .shooting import shooting_energy
from .solver import (
    ConvergenceError,
    EigenResult,
    GridSpec,
    RadialProblem,
    SolverError,
    build_tridiagonal,
    count_eigenvalues_below,
    count_sign_changes,
    expectation_value,
    lowest_eigenpairs,
    refine_by_extrapolation,
)
from .verify import Verdict, run_all_checks

__version__ = "0.1.0"

__all__ = [
    "BetaScan",
    "ConvergenceError",
    "CountReport",
    "DimensionfulInputs",
    "EigenResult",
    "Family",
    "GridSpec",
    "HftReport",
    "PotentialSpec",
    "RadialProblem",
    "SandwichReport",
    "ScanCheck",
    "ScanFailure",
    "SolverError",
    "UnitReduction",
    "Verdict",
    "build_tridiagonal",
    "check_monotone_decrease",
    "check_negativity",
    "coulomb_sandwich",
    "count_eigenvalues_below",
    "count_growth",
    "count_sign_changes",
    "expectation_value",
    "fixed_step_ladder",
    "hft_check",
    "lowest_eigenpairs",
    "potential_value",
    "reduce_units",
    "refine_by_extrapolation",
    "residual_ladder",
    "run_all_checks",
    "run_beta_scan",
    "scaled_eigenvalue",
    "scaled_potential_value",
    "scaling_consistency",
    "screening_factor",
    "shooting_energy",
    "__version__",
]
