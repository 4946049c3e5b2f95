"""Restarted AA(1) on symmetric linear fixed-point problems: solvers and 2x2 theory."""

from .convergence import (
    Comparison,
    ConvergenceReport,
    WorstCase2x2,
    analyze_run,
    compare_aa_vs_picard,
    eigen_ratio_2x2,
    estimate_rho,
    rho_closed_form_2x2,
    rho_worst_aa,
    worst_case_2x2,
)
from .iterations import (
    IterationTrace,
    RankDeficiencyError,
    SolverConfig,
    SymmetricSystem,
    Termination,
    beta_rayleigh,
    run,
    run_picard,
    run_restarted_aa1,
    run_windowed_aa,
)
from .linalg import DegenerateVectorError, SpectralDecomposition, eig_sym, rayleigh_quotient, scalar_lsq
from .propagator import (
    EigenPairSelection,
    R_closed_form,
    apply_R,
    eps_max,
    lambda_max,
    lambda_of_eps,
    verify_four_periodicity,
)
from .sweep import SweepConfig, SweepGrid, emit_csv, read_csv, run_sweep

__version__ = "0.1.0"
