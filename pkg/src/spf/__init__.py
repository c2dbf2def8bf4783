"""Sparse power factorization: recovery of sparse rank-one matrices from
linear measurements, with initialization schemes, convex baselines, theory
constants, and a Monte-Carlo experiment harness."""

from .exceptions import (
    CombinatorialBudgetError,
    DegenerateInputError,
    DegenerateIterateError,
)
from .linalg import (
    coord_project,
    hard_threshold,
    leading_pair,
    sparse_norm,
    subspace_sin,
)
from .operators import (
    BilinearProblem,
    GaussianSpec,
    MeasurementOperator,
    gaussian_operator,
    lift_bilinear,
    load_operator,
    make_convolution_lifting,
    save_operator,
)
from .htp import HtpConfig, HtpResult, htp, htp_iteration_budget, least_squares
from .core import (
    RecoveryTrace,
    SpfConfig,
    noise_amplification,
    pf_run,
    reconstruction_snr,
    spf_run,
)
from .init import (
    InitResult,
    init_optimal,
    init_pf_proxy,
    init_rowsparse,
    init_thresholding,
    sparse_row_project,
)
from .theory import (
    OmegaBounds,
    TheoryConstants,
    dof_bound,
    empirical_rip,
    htp_constants,
    measurement_lower_bound,
    noise_amp_constant,
    omega_bounds,
    rate_distortion_lower,
)
from .baselines import (
    AdmmConfig,
    BpProblem,
    bp_solve,
    project_affine,
    prox_nuclear,
    prox_row_l12,
)
from .bench import (
    ExperimentSpec,
    SparseRankOneModel,
    TrialResult,
    noise_sweep,
    phase_transition,
    random_sparse_rank_one,
    run_trial,
)

__version__ = "0.1.0"
