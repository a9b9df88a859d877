"""Bayesian two-class Gaussian graphical models (C++ core)."""

from ._core import (
    NumericalError,
    PreconditionError,
    ValidationError,
    __version__,
    admissible_interval,
    cli,
    fdr_threshold,
    fit,
    simulate,
)

__all__ = [
    "NumericalError",
    "PreconditionError",
    "ValidationError",
    "__version__",
    "admissible_interval",
    "cli",
    "fdr_threshold",
    "fit",
    "simulate",
]
