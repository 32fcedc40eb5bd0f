"""Curl-force simulation and verification."""

from ._core import (
    __version__,
    analyze_matrix,
    check,
    compare,
    curl,
    default_initial_state,
    divergence,
    linear_stability,
    list_catalog,
    simulate,
)

__all__ = [
    "__version__",
    "analyze_matrix",
    "check",
    "compare",
    "curl",
    "default_initial_state",
    "divergence",
    "linear_stability",
    "list_catalog",
    "simulate",
]
