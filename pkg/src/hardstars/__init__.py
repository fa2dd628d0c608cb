"""Numerical workbench for self-gravitating stars of the stiffest causal fluid."""

from __future__ import annotations

from .background import (
    BackgroundProfile,
    FamilyRow,
    StarParameters,
    approximate_profile,
    build_star,
    derive_metric_fields,
    family_scan,
    solve_tov_picard,
    solve_tov_shooting,
    tov_rhs,
)
from .errors import (
    CflViolationError,
    ConfigError,
    ConvergenceError,
    DomainError,
    HardStarError,
    InstabilityError,
)

__version__ = "0.1.0"

__all__ = [
    "BackgroundProfile",
    "FamilyRow",
    "StarParameters",
    "approximate_profile",
    "build_star",
    "derive_metric_fields",
    "family_scan",
    "solve_tov_picard",
    "solve_tov_shooting",
    "tov_rhs",
    "HardStarError",
    "DomainError",
    "ConvergenceError",
    "CflViolationError",
    "InstabilityError",
    "ConfigError",
    "__version__",
]
