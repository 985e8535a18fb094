"""permlab: permanents of PSD Hermitian matrices, the Bapat-Sunder style
inequality checks, counterexample lifting, and seeded counterexample search.
"""

from .matrices import (
    ComplexMatrix,
    ComplexVector,
    ExactMatrix,
    PsdReport,
    content_digest,
    correlation_matrix,
    gram,
    hadamard,
    has_nonnegative_entries,
    is_psd,
    load_matrix,
    save_matrix,
)
from .permanent import (
    GaussianInteger,
    LaplaceMatrix,
    PermanentValue,
    laplace_matrix,
    minor,
    permanent_directional_derivative,
    permanent_naive,
    permanent_ryser,
)
from .spectra import (
    NonConvergenceError,
    SpectralResult,
    hermitian_eigensystem,
    lambda_max_hermitian,
    lambda_max_real_sym,
    rayleigh_quotient,
    real_symmetric_part,
)
from .conjectures import (
    EPSILON_GRID,
    REPORT_RTOL,
    CheckReport,
    LiftResult,
    NoViolatingEpsilonError,
    check_conjecture1,
    check_conjecture2,
    check_conjecture3,
    check_conjecture4,
    lift_counterexample,
    taylor_residual,
)
from .search import (
    Certificate,
    CertificateVerificationError,
    DegenerateInstanceError,
    SearchConfig,
    attach_lift,
    hill_climb,
    objective,
    random_instance,
    verify_certificate,
)
from . import datasets

__version__ = "0.1.0"
