"""Joint extreme-eigenvalue distributions of correlated complex Wishart
matrices, with the MIMO channel-dynamics metrics built on top of them.

The numerical core lives in four layers: ``specfun`` (Marcum Q, Nuttall Q,
regularized confluent hypergeometric of two variables), ``eigendist``
(single-matrix extreme-eigenvalue CDFs), ``bivariate`` (joint CDFs of the
largest / smallest eigenvalues of a correlated matrix pair), and ``metrics``
(double outage, normalized mutual information, level crossings).  The
``montecarlo`` module is an independent sampling oracle used for validation,
and ``cli`` exposes everything as subcommands.
"""

from .errors import (
    AfdUndefinedError,
    CapabilityError,
    ConvergenceError,
    DomainError,
    NumericalConsistencyError,
    PrecisionWarning,
    UnsupportedParameterError,
)
from .specfun import (
    Phi3Args,
    bessel_i_scaled,
    bessel_j0,
    lower_incomplete_gamma_int,
    marcum_q,
    nuttall_coeffs,
    nuttall_q,
    phi3_coeff_A,
    phi3_series_oracle,
    phi3_tilde,
    upper_incomplete_gamma_int,
)
from .eigendist import (
    ChannelDims,
    SignedLogDet,
    WishartEnsemble,
    ccdf_smallest,
    cdf_largest,
    signed_log_det,
)
from .bivariate import (
    CorrelationState,
    IinqParams,
    JointPoint,
    QuadratureResult,
    iinq,
    iinq_quadrature,
    integral_I,
    integral_K,
    joint_ccdf_smallest,
    joint_cdf_largest,
    joint_cdf_smallest,
)
from .montecarlo import (
    EigenPairBatch,
    EigenPairSample,
    McConfig,
    empirical_joint_ccdf,
    empirical_joint_cdf,
    estimate_corrcoef,
    estimate_mean_extremes,
    hermitian_eigenvalues,
    sample_pair,
    sample_pairs,
)
from .metrics import (
    CorrelationProfile,
    LevelCrossingResult,
    ProbTable2x2,
    afd,
    clarke_rho_sq,
    double_outage,
    invert_outage,
    lcr,
    level_crossing,
    normalized_mi,
    ofdm_rho_sq,
    outage_table,
)

__version__ = "0.1.0"

__all__ = [
    "AfdUndefinedError",
    "CapabilityError",
    "ChannelDims",
    "ConvergenceError",
    "CorrelationProfile",
    "CorrelationState",
    "DomainError",
    "EigenPairBatch",
    "EigenPairSample",
    "IinqParams",
    "JointPoint",
    "LevelCrossingResult",
    "McConfig",
    "NumericalConsistencyError",
    "Phi3Args",
    "PrecisionWarning",
    "ProbTable2x2",
    "QuadratureResult",
    "SignedLogDet",
    "UnsupportedParameterError",
    "WishartEnsemble",
    "afd",
    "bessel_i_scaled",
    "bessel_j0",
    "ccdf_smallest",
    "cdf_largest",
    "clarke_rho_sq",
    "double_outage",
    "empirical_joint_ccdf",
    "empirical_joint_cdf",
    "estimate_corrcoef",
    "estimate_mean_extremes",
    "hermitian_eigenvalues",
    "iinq",
    "iinq_quadrature",
    "integral_I",
    "integral_K",
    "invert_outage",
    "joint_ccdf_smallest",
    "joint_cdf_largest",
    "joint_cdf_smallest",
    "lcr",
    "level_crossing",
    "lower_incomplete_gamma_int",
    "marcum_q",
    "normalized_mi",
    "nuttall_coeffs",
    "nuttall_q",
    "ofdm_rho_sq",
    "outage_table",
    "phi3_coeff_A",
    "phi3_series_oracle",
    "phi3_tilde",
    "sample_pair",
    "sample_pairs",
    "signed_log_det",
    "upper_incomplete_gamma_int",
    "__version__",
]
