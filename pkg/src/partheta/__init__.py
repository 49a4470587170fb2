"""Partial theta function theta(q, x) = sum_{j>=0} q^{j(j+1)/2} x^j.

Certified evaluation, zero sets, spectral values and product structure.
"""

from .errors import (
    CertificationError,
    ContourError,
    ConvergenceError,
    DomainError,
    IncompleteZeroSet,
    InvalidBracket,
    NearSpectralAmbiguity,
    NonMonotonicPairCount,
    PartialThetaError,
    PrecisionBudgetExceeded,
    TailRegimeNotReached,
)
from .evalcore import (
    EvalResult,
    QKind,
    QParam,
    SeriesTail,
    eval_jacobi_theta_star,
    eval_theta,
    eval_theta_dq,
    eval_theta_dx,
    eval_xi,
    truncation_order,
)
from .factorization import decompose, lp_bound_check, negative_q_report, reconstruct_product
from .spectrum import (
    SpectralValue,
    SpectrumTable,
    complex_pair_count,
    locate_spectral_value,
    refine_double_zero,
    spectrum_table,
)
from .zerofinder import (
    Zero,
    ZeroSet,
    certify_tail_zero,
    classify_multiplicity,
    count_zeros_argument_principle,
    find_zeros_in_disk,
    refine_newton,
    seed_zeros_asymptotic,
)

__version__ = "0.1.0"

__all__ = [
    "CertificationError",
    "ContourError",
    "ConvergenceError",
    "DomainError",
    "EvalResult",
    "IncompleteZeroSet",
    "InvalidBracket",
    "NearSpectralAmbiguity",
    "NonMonotonicPairCount",
    "PartialThetaError",
    "PrecisionBudgetExceeded",
    "QKind",
    "QParam",
    "SeriesTail",
    "SpectralValue",
    "SpectrumTable",
    "TailRegimeNotReached",
    "Zero",
    "ZeroSet",
    "certify_tail_zero",
    "classify_multiplicity",
    "complex_pair_count",
    "count_zeros_argument_principle",
    "decompose",
    "eval_jacobi_theta_star",
    "eval_theta",
    "eval_theta_dq",
    "eval_theta_dx",
    "eval_xi",
    "find_zeros_in_disk",
    "locate_spectral_value",
    "lp_bound_check",
    "negative_q_report",
    "reconstruct_product",
    "refine_double_zero",
    "refine_newton",
    "seed_zeros_asymptotic",
    "spectrum_table",
    "truncation_order",
    "__version__",
]
