"""Sparse coding for multitask and transfer learning."""

from ._core import (
    DomainError,
    complexity_stats,
    fit,
    generate_environment,
    lasso_predict,
    objective,
    project_l1_ball,
    project_l2_ball,
    ridge_fit,
    sc_limit_rhs,
    sweep,
    thm1_rhs,
    thm2_rhs,
    trace_norm_fit,
)

__all__ = [
    "DomainError",
    "complexity_stats",
    "fit",
    "generate_environment",
    "lasso_predict",
    "objective",
    "project_l1_ball",
    "project_l2_ball",
    "ridge_fit",
    "sc_limit_rhs",
    "sweep",
    "thm1_rhs",
    "thm2_rhs",
    "trace_norm_fit",
]
