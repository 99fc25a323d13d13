"""Multioutcome least-absolute-deviations regression.

Minimizes the smoothed objective

    f(B) = (1/m) sum_i sqrt(||y_i - B'x_i||^2 + eps^2)

by iteratively reweighted least squares (a Weiszfeld-type scheme): each
iteration solves a weighted least-squares problem with observation weights
1/sqrt(||r_i||^2 + eps^2).  The quadratic majorization of the square root
guarantees the objective never increases, and the smoothing floor keeps the
weights finite at exact-zero residuals.  Everything else in the package
(penalized fits included, via data augmentation) reduces to this routine.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import cho_factor, cho_solve, LinAlgError

from .core import validate_response


class SingularityError(RuntimeError):
    """Raised when the weighted normal equations are numerically singular."""


@dataclass
class SolverOptions:
    smoothing_epsilon: float = 1e-8
    max_iterations: int = 500
    tolerance: float = 1e-8
    initial_coefficients: np.ndarray = None

    def __post_init__(self):
        if self.smoothing_epsilon <= 0:
            raise ValueError("smoothing_epsilon must be positive")
        if self.tolerance <= 0:
            raise ValueError("tolerance must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")


@dataclass
class SolverDiagnostics:
    iterations: int
    converged: bool
    objective_trace: np.ndarray = field(repr=False, default=None)


def _smoothed_objective(Y, X, B, eps):
    R = Y - X @ B
    return float(np.mean(np.sqrt(np.sum(R * R, axis=1) + eps * eps)))


def _initial_guess(Y, X, opts):
    if opts.initial_coefficients is not None:
        B0 = np.array(opts.initial_coefficients, dtype=float)
        if B0.shape != (X.shape[1], Y.shape[1]):
            raise ValueError(
                f"initial coefficients have shape {B0.shape}, "
                f"expected {(X.shape[1], Y.shape[1])}"
            )
        return B0
    # Least-squares start when X'X is invertible; otherwise zeros.  The
    # problem is convex, so this only affects iteration counts.
    G = X.T @ X
    try:
        c = cho_factor(G)
    except LinAlgError:
        return np.zeros((X.shape[1], Y.shape[1]))
    return cho_solve(c, X.T @ Y)


def solve_lad(Y, X, opts=None):
    """Fit multioutcome LAD regression of Y on X.

    Parameters
    ----------
    Y : array, shape (m, p)
        Responses (possibly augmented with penalty pseudo-observations).
    X : array, shape (m, q)
        Design (no intercept requirement here; augmented rows are basis
        vectors, not observations).
    opts : SolverOptions, optional

    Returns
    -------
    (B, diagnostics) : (ndarray of shape (q, p), SolverDiagnostics)
        ``diagnostics.converged`` is False when the iteration budget ran out;
        the last iterate is still returned so callers (e.g. CV loops) can
        proceed with a best-effort solution.

    Raises
    ------
    SingularityError
        If the weighted normal equations at some iteration are not positive
        definite (rank-deficient design).
    """
    if opts is None:
        opts = SolverOptions()
    Y = validate_response(Y)
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[0] != Y.shape[0]:
        raise ValueError(
            f"design rows ({X.shape[0] if X.ndim == 2 else '?'}) must match "
            f"response rows ({Y.shape[0]})"
        )
    eps = opts.smoothing_epsilon

    B = _initial_guess(Y, X, opts)
    trace = [_smoothed_objective(Y, X, B, eps)]
    converged = False
    iterations = 0
    for k in range(1, opts.max_iterations + 1):
        iterations = k
        R = Y - X @ B
        w = 1.0 / np.sqrt(np.sum(R * R, axis=1) + eps * eps)
        sw = np.sqrt(w)[:, None]
        A = sw * X
        G = A.T @ A
        try:
            c = cho_factor(G)
        except LinAlgError as exc:
            raise SingularityError(
                f"weighted normal equations singular at iteration {k}"
            ) from exc
        B_new = cho_solve(c, A.T @ (sw * Y))
        trace.append(_smoothed_objective(Y, X, B_new, eps))
        denom = np.linalg.norm(B)
        change = np.linalg.norm(B_new - B)
        B = B_new
        if change <= opts.tolerance * max(denom, 1e-300):
            converged = True
            break
    diag = SolverDiagnostics(
        iterations=iterations, converged=converged, objective_trace=np.array(trace)
    )
    return B, diag
