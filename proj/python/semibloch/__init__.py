"""Semiclassical Bloch-electron dynamics: band solver, geometry, flows and Egorov checks."""

from ._core import (
    ConfigError,
    Error,
    FitError,
    NondegeneracyError,
    __version__,
    bands,
    check_config,
    criteria,
    fit_order,
    free_bands,
    run,
    run_criterion,
)

__all__ = [
    "ConfigError",
    "Error",
    "FitError",
    "NondegeneracyError",
    "__version__",
    "bands",
    "check_config",
    "criteria",
    "fit_order",
    "free_bands",
    "run",
    "run_criterion",
]
