"""Total causal effects under structure uncertainty via dual likelihood."""

from ._core import (
    DegenerateQuadratic,
    DimensionTooLarge,
    Error,
    GenerationExhausted,
    InvalidArgument,
    InvalidSampleCount,
    LinearScm,
    ParseError,
    SingularBlock,
    SingularCovariance,
    chi2_quantile,
    confidence_region,
    covariance_of,
    empirical_covariance,
    estimate_effects,
    generate_benchmark_scm,
    precision,
    sample,
    true_effect,
)

__all__ = [
    "DegenerateQuadratic",
    "DimensionTooLarge",
    "Error",
    "GenerationExhausted",
    "InvalidArgument",
    "InvalidSampleCount",
    "LinearScm",
    "ParseError",
    "SingularBlock",
    "SingularCovariance",
    "chi2_quantile",
    "confidence_region",
    "covariance_of",
    "empirical_covariance",
    "estimate_effects",
    "generate_benchmark_scm",
    "precision",
    "sample",
    "true_effect",
]
