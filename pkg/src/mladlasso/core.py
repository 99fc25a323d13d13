"""Shared matrix validation, row-group norms, and objective evaluation.

Conventions used throughout the package:

* ``Y`` is an ``n x p`` response matrix (rows = observations, columns =
  outcomes).
* ``X`` is an ``n x q`` design matrix whose *first* column is the all-ones
  intercept column.  The penalty always runs over rows ``2..q`` of the
  coefficient matrix (1-based), i.e. the intercept row is never penalized.
* ``B`` is a ``q x p`` coefficient matrix; row ``j`` holds the ``p``
  coefficients of covariate ``j`` and forms one penalty group.
* Covariate indices exposed to callers (support sets, bias rows) are
  1-based, matching the ``j = 1..q`` indexing of the model; index 1 is the
  intercept.
"""

from dataclasses import dataclass, field

import numpy as np


@dataclass
class FitResult:
    """Outcome of a (penalized) fit.

    Attributes
    ----------
    coefficients : ndarray, shape (q, p)
        Fitted coefficient matrix.
    lam : float
        Penalty value the fit was produced at (0 for unpenalized fits).
    group_norms : ndarray, shape (q,)
        Euclidean norm of each coefficient row.
    support : set of int
        1-based covariate indices declared nonzero; the intercept (index 1)
        is always included.
    iterations : int
        Inner solver iterations spent on the final solve.
    objective : float
        Penalized objective evaluated at ``coefficients`` on the original
        (unaugmented) data.
    converged : bool
        Whether the inner solver met its tolerance.
    """

    coefficients: np.ndarray
    lam: float
    group_norms: np.ndarray = field(repr=False, default=None)
    support: set = None
    iterations: int = 0
    objective: float = np.nan
    converged: bool = True


def validate_response(Y):
    """Validate and return the response matrix as a 2-d float array.

    Raises ValueError if Y is not a finite n x p matrix with n, p >= 1.
    """
    Y = np.asarray(Y, dtype=float)
    if Y.ndim != 2:
        raise ValueError(f"response matrix must be 2-dimensional, got ndim={Y.ndim}")
    n, p = Y.shape
    if n < 1 or p < 1:
        raise ValueError(f"response matrix needs n >= 1 and p >= 1, got shape {Y.shape}")
    if not np.isfinite(Y).all():
        raise ValueError("response matrix contains non-finite entries")
    return Y


def validate_design(X, require_intercept=True):
    """Validate and return the design matrix as a 2-d float array.

    When ``require_intercept`` is true the first column must be exactly the
    all-ones vector (use :func:`ensure_intercept` to prepend one).
    """
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise ValueError(f"design matrix must be 2-dimensional, got ndim={X.ndim}")
    if X.shape[0] < 1 or X.shape[1] < 1:
        raise ValueError(f"design matrix needs at least one row and column, got shape {X.shape}")
    if not np.isfinite(X).all():
        raise ValueError("design matrix contains non-finite entries")
    if require_intercept and not np.all(X[:, 0] == 1.0):
        raise ValueError("first design column must be the all-ones intercept column")
    return X


def ensure_intercept(X):
    """Prepend an all-ones intercept column to X if it is not already there.

    Returns ``(X_with_intercept, added)`` where ``added`` says whether a
    column was prepended.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise ValueError(f"design matrix must be 2-dimensional, got ndim={X.ndim}")
    if X.shape[1] >= 1 and np.all(X[:, 0] == 1.0):
        return X, False
    return np.column_stack([np.ones(X.shape[0]), X]), True


def validate_weights(w, q):
    """Validate penalty weights: length q-1, strictly positive, finite."""
    w = np.asarray(w, dtype=float)
    if w.ndim != 1 or w.shape[0] != q - 1:
        raise ValueError(
            f"penalty weights must be a vector of length q-1={q - 1}, got shape {w.shape}"
        )
    if not np.isfinite(w).all() or np.any(w <= 0):
        raise ValueError("penalty weights must be strictly positive and finite")
    return w


def _check_conformable(Y, X, B):
    if X.shape[0] != Y.shape[0]:
        raise ValueError(
            f"row mismatch: X has {X.shape[0]} observations but Y has {Y.shape[0]}"
        )
    if B.shape[0] != X.shape[1]:
        raise ValueError(
            f"coefficient rows ({B.shape[0]}) must match design columns ({X.shape[1]})"
        )
    if B.shape[1] != Y.shape[1]:
        raise ValueError(
            f"coefficient columns ({B.shape[1]}) must match response columns ({Y.shape[1]})"
        )


def row_group_norms(B):
    """Euclidean norm of each row of the coefficient matrix.

    Element ``j`` (0-based) is ``||B[j, :]||_2``, the size of covariate
    ``j+1``'s coefficient group.
    """
    B = np.asarray(B, dtype=float)
    if B.ndim != 2:
        raise ValueError(f"coefficient matrix must be 2-dimensional, got ndim={B.ndim}")
    return np.sqrt(np.sum(B * B, axis=1))


def lad_loss(Y, X, B):
    """Mean Euclidean residual norm (1/n) sum_i ||y_i - B'x_i||."""
    Y = np.asarray(Y, dtype=float)
    X = np.asarray(X, dtype=float)
    B = np.asarray(B, dtype=float)
    _check_conformable(Y, X, B)
    R = Y - X @ B
    return float(np.mean(np.sqrt(np.sum(R * R, axis=1))))


def penalized_objective(Y, X, B, lam, weights):
    """LAD loss plus weighted group penalty on the non-intercept rows.

    Evaluates ``lad_loss(Y, X, B) + lam * sum_{j=2..q} w_j ||B_j||`` where
    ``weights`` has length q-1 and indexes rows 2..q.  With all weights equal
    to one this is the plain (non-adaptive) LAD-lasso objective.
    """
    if lam < 0:
        raise ValueError(f"penalty parameter must be nonnegative, got {lam}")
    B = np.asarray(B, dtype=float)
    w = validate_weights(weights, B.shape[0])
    norms = row_group_norms(B)
    return lad_loss(Y, X, B) + lam * float(w @ norms[1:])
