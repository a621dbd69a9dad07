"""Sparse precision-matrix toolkit for irregularly sampled Gaussian AR(1) processes."""

from .banded import (
    back_substitute,
    band_cholesky,
    forward_substitute,
    log_det_from_chol,
    quadratic_form,
    tridiag_matvec,
)
from .core import (
    DEFAULT_DENSE_CAP,
    Ar1Params,
    BandLowerBi,
    MeanSpec,
    NotPositiveDefiniteError,
    TimeGrid,
    TridiagSym,
    ValidationError,
    build_covariance,
    build_cross_covariance,
    build_precision,
    mean_vector,
    rho_pow,
)
from .density import (
    Ar1Factor,
    full_conditional_mean,
    full_conditional_precision,
    log_density,
    log_density_factored,
    log_density_from_noise,
)
from .oracle import dense_cholesky, dense_conditional, dense_inverse, dense_log_pdf, dense_sample
from .sampling import (
    ConditionalProblem,
    make_rng,
    merge_grids,
    sample_conditional,
    sample_unconditional,
)

__version__ = "0.1.0"
