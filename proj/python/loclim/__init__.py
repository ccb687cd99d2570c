"""Smoothed local-time estimators and their fluctuation limits."""

from ._loclim import (
    AccuracyError,
    __version__,
    classify,
    constant,
    estimate,
    expected_estimate,
    heat_kernel_deriv,
    moment_formula,
    moment_simulated,
    sample_path,
)

__all__ = [
    "AccuracyError",
    "__version__",
    "classify",
    "constant",
    "estimate",
    "expected_estimate",
    "heat_kernel_deriv",
    "moment_formula",
    "moment_simulated",
    "sample_path",
]
