"""Possibilistic inferential models with calibrated Monte Carlo sampling."""

from .errors import (
    CalibrationError,
    EmptyIntervalError,
    ImstitchError,
    InvalidInputError,
    ModelViolationError,
    OracleDegradedError,
)
from .possibility import (
    ContourTable,
    Ellipsoid,
    GaussianPossibility,
    PossibilityContour,
    alpha_cut,
    chi2_cdf,
    chi2_quantile,
    choquet_upper_expectation,
    gaussian_alpha_cut,
    gaussian_contour,
    hypothesis_possibility,
    necessity,
)

__version__ = "0.1.0"
