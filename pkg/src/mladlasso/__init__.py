"""Multioutcome adaptive LAD-lasso.

Robust group-penalized regression for multivariate responses: the weighted
group penalty is folded into a plain least-absolute-deviations problem by
data augmentation, the penalty level is tuned by k-fold cross-validation,
and adaptive reweighting reduces the shrinkage bias of the selected effects.
"""

from .core import (
    FitResult,
    lad_loss,
    penalized_objective,
    row_group_norms,
    ensure_intercept,
)
from .lad_solver import SingularityError, SolverDiagnostics, SolverOptions, solve_lad
from .lasso import (
    AdaptiveFitOptions,
    AdaptiveTrace,
    AugmentedData,
    adaptive_weights,
    augment,
    default_lambda_grid,
    fit_adaptive,
    fit_lad_lasso,
    lambda_max,
    support,
)
from .model_select import CvResult, cv_score, make_folds, select_lambda
from . import sim

__all__ = [
    "FitResult",
    "lad_loss",
    "penalized_objective",
    "row_group_norms",
    "ensure_intercept",
    "SingularityError",
    "SolverDiagnostics",
    "SolverOptions",
    "solve_lad",
    "AdaptiveFitOptions",
    "AdaptiveTrace",
    "AugmentedData",
    "adaptive_weights",
    "augment",
    "default_lambda_grid",
    "fit_adaptive",
    "fit_lad_lasso",
    "lambda_max",
    "support",
    "CvResult",
    "cv_score",
    "make_folds",
    "select_lambda",
    "sim",
]
