"""Eigenvalues of beta-Wishart matrices with diagonal covariance.

Sampling through a recursion of broken-arrow singular value problems,
Jack polynomials and hypergeometric functions of matrix argument, and
the analytic extreme-eigenvalue distributions they feed.
"""

from .densities import (
    CdfResult,
    DensityQuery,
    cdf_lambda_max,
    cdf_lambda_min,
    log_joint_eigen_density,
    normalization_logK,
)
from .errors import ConvergenceError, InvalidArgumentError
from .hypergeom import SeriesTruncation, hyp0f0, hyp1f1, shift_regularize
from .jack import (
    Partition,
    gamma_n,
    jack_C,
    jack_C_identity,
    jack_J_one_var,
    jack_values,
    partitions_of,
    pochhammer_general,
    rho,
    sphere_projection_average,
    stanley_det_pullout_check,
)
from .montecarlo import (
    EmpiricalCdf,
    ExperimentReport,
    empirical_cdf,
    ks_distance,
    run_extreme_experiment,
    run_free_probability_experiment,
    semicircle_sample,
)
from .rng import RngStream
from .sampler import (
    WishartParams,
    chi_sample,
    laguerre_bidiagonal_sample,
    sample_eigenvalues,
    sample_singular_values,
)
from .secular import (
    ArrowMatrix,
    BrokenArrowMatrix,
    SpectralFactorization,
    WorkspaceTrace,
    arrow_eigen,
    broken_arrow_svd,
    deflate,
    last_row_q,
    secular_root,
)

__version__ = "0.1.0"
