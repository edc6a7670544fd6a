"""ruinkit: ruin problems under thin- and fat-tailed uncertainty."""

__version__ = "0.1.0"

from .distributions import DistributionSpec, SampleSeries, cdf, pdf, quantile, sample, survival
from .errors import (
    AmbiguousClassificationError,
    ConfigurationError,
    DegenerateInputError,
    DivergentMomentError,
    InsufficientTailDataError,
    ParameterDomainError,
    RuinkitError,
)

__all__ = [
    "DistributionSpec",
    "SampleSeries",
    "cdf",
    "pdf",
    "quantile",
    "sample",
    "survival",
    "AmbiguousClassificationError",
    "ConfigurationError",
    "DegenerateInputError",
    "DivergentMomentError",
    "InsufficientTailDataError",
    "ParameterDomainError",
    "RuinkitError",
]
