"""Data generators and metrics for the two simulation studies.

* Genotype study: trivariate traits driven by four markers with known
  effects, used to measure shrinkage bias and robustness to contaminated
  responses.
* Excess-of-zeros study: zero-inflated continuous covariates, where the
  penalty can confound a zero covariate value with a zero coefficient; the
  metric is the percentage of correctly recovered zero coefficient rows.

All generators are pure functions of (scenario, seed).  Independent RNG
streams are used for structurally separate draws (e.g. the zero mask and the
covariate values), so changing one scenario knob does not reshuffle
unrelated draws.
"""

import warnings
from dataclasses import dataclass, field

import numpy as np

from .core import validate_response, row_group_norms
from .lad_solver import SolverOptions
from .lasso import AdaptiveFitOptions, fit_adaptive

DEFAULT_QTL_EFFECTS = {
    50: (100.0, 100.0, 100.0),
    75: (0.0, 50.0, 100.0),
    100: (5.0, 10.0, 15.0),
    150: (3.0, 3.0, 3.0),
}

DEFAULT_TRAIT_COVARIANCE = np.array(
    [[1.0, 0.5, 0.3],
     [0.5, 1.0, 0.2],
     [0.3, 0.2, 1.0]]
)

# genotype coding: -1 homozygote (11), 0 heterozygote, 1 homozygote (22);
# Hardy-Weinberg probabilities at allele frequency 1/2
GENOTYPE_VALUES = np.array([-1.0, 0.0, 1.0])
GENOTYPE_PROBS = np.array([0.25, 0.5, 0.25])

CONTAMINATED_ROWS = (10, 292)
CONTAMINATION_FACTOR = 100.0


@dataclass
class GenotypeScenario:
    n: int = 300
    markers: int = 200
    true_effects: dict = None  # marker index -> effect vector
    error_covariance: np.ndarray = None
    rng_seed: int = 0

    def __post_init__(self):
        if self.true_effects is None:
            self.true_effects = dict(DEFAULT_QTL_EFFECTS)
        if self.error_covariance is None:
            self.error_covariance = DEFAULT_TRAIT_COVARIANCE.copy()


@dataclass
class ZerosScenario:
    n: int = 100
    q: int = 10  # penalized covariates, intercept excluded
    p_zeros: float = 0.1
    error_kind: str = "uniform"  # or "asymmetric_laplace"
    rng_seed: int = 0
    include_intercept: bool = True

    def __post_init__(self):
        if not 0.0 <= self.p_zeros <= 1.0:
            raise ValueError(f"p_zeros must lie in [0, 1], got {self.p_zeros}")
        if self.error_kind not in ("uniform", "asymmetric_laplace"):
            raise ValueError(f"unknown error kind {self.error_kind!r}")


def _cholesky_or_zero(cov):
    cov = np.asarray(cov, dtype=float)
    if cov.ndim != 2 or cov.shape[0] != cov.shape[1]:
        raise ValueError(f"covariance must be square, got shape {cov.shape}")
    if not np.allclose(cov, cov.T):
        raise ValueError("covariance must be symmetric")
    if np.all(cov == 0.0):  # degenerate test mode: noiseless data
        return np.zeros_like(cov)
    try:
        return np.linalg.cholesky(cov)
    except np.linalg.LinAlgError as exc:
        raise ValueError("covariance is not positive definite") from exc


def gen_genotype_study(scenario=None):
    """Simulate the marker-effect study: Y = X B + E with genotype design.

    Returns ``(Y, X, B_true)`` where X is n x (markers+1) with a prepended
    intercept column, markers coded -1/0/1 and drawn i.i.d. with
    Hardy-Weinberg probabilities (1/4, 1/2, 1/4), and B_true carries the
    scenario's effect vectors on the marker rows (marker m sits in design
    column m+1, 1-based).
    """
    if scenario is None:
        scenario = GenotypeScenario()
    s = scenario
    p = len(next(iter(s.true_effects.values())))
    for m, eff in s.true_effects.items():
        if not 1 <= m <= s.markers:
            raise ValueError(f"effect marker {m} outside 1..{s.markers}")
        if len(eff) != p:
            raise ValueError("all effect vectors must have the same length")
    L = _cholesky_or_zero(s.error_covariance)
    if L.shape[0] != p:
        raise ValueError(
            f"error covariance is {L.shape[0]}x{L.shape[0]} but effects have "
            f"{p} components"
        )
    geno_rng, err_rng = [
        np.random.default_rng(ss) for ss in np.random.SeedSequence(s.rng_seed).spawn(2)
    ]
    G = geno_rng.choice(GENOTYPE_VALUES, p=GENOTYPE_PROBS, size=(s.n, s.markers))
    X = np.column_stack([np.ones(s.n), G])
    B_true = np.zeros((s.markers + 1, p))
    for m, eff in s.true_effects.items():
        B_true[m] = np.asarray(eff, dtype=float)
    E = err_rng.standard_normal((s.n, p)) @ L.T
    Y = X @ B_true + E
    return Y, X, B_true


def load_genotype_csv(path, header=False):
    """Load an externally supplied genotype matrix (values in {-1, 0, 1}),
    prepending the intercept column.  For users who have the original marker
    data and want to run the exact design instead of the simulated one."""
    G = np.loadtxt(path, delimiter=",", skiprows=1 if header else 0, ndmin=2)
    if not np.isin(G, GENOTYPE_VALUES).all():
        raise ValueError(f"{path}: genotype codes must be -1, 0 or 1")
    return np.column_stack([np.ones(G.shape[0]), G])


def sample_asymmetric_laplace(mu, sigma, count, seed):
    """Draw rows from the multivariate asymmetric Laplace distribution.

    Uses the exponential mixture construction: row = mu*W + sqrt(W)*Z with
    W ~ Exp(1) and Z ~ N(0, sigma).  The mean of the construction is mu.
    ``seed`` may be an int or a numpy Generator.
    """
    mu = np.atleast_1d(np.asarray(mu, dtype=float))
    L = _cholesky_or_zero(sigma)
    if np.all(L == 0.0):
        raise ValueError("covariance is not positive definite")
    if L.shape[0] != mu.shape[0]:
        raise ValueError(
            f"location has {mu.shape[0]} components but covariance is "
            f"{L.shape[0]}x{L.shape[0]}"
        )
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    W = rng.exponential(1.0, size=count)
    Z = rng.standard_normal((count, mu.shape[0])) @ L.T
    return mu * W[:, None] + np.sqrt(W)[:, None] * Z


ZEROS_ERROR_LOCATION = np.array([3.0, 6.0])
ZEROS_ERROR_COVARIANCE = np.diag([0.5, 0.5])


def gen_zeros_study(scenario=None):
    """Simulate the excess-of-zeros study.

    Covariates are 0 with probability p_zeros and N(3, 1) otherwise; the
    first three covariate rows of B_true are N(0, 1), the rest (and the
    intercept) are zero; p = 2 outcomes with uniform or asymmetric Laplace
    errors.  The zero mask and the covariate values come from independent
    streams, so changing p_zeros keeps the values drawn at surviving
    positions.
    """
    if scenario is None:
        scenario = ZerosScenario()
    s = scenario
    mask_rng, val_rng, coef_rng, err_rng = [
        np.random.default_rng(ss) for ss in np.random.SeedSequence(s.rng_seed).spawn(4)
    ]
    U = mask_rng.uniform(size=(s.n, s.q))
    V = val_rng.normal(3.0, 1.0, size=(s.n, s.q))
    C = np.where(U > s.p_zeros, V, 0.0)
    active = min(3, s.q)
    coeffs = coef_rng.standard_normal((active, 2))
    if s.error_kind == "uniform":
        E = err_rng.uniform(0.0, 1.0, size=(s.n, 2))
    else:
        E = sample_asymmetric_laplace(
            ZEROS_ERROR_LOCATION, ZEROS_ERROR_COVARIANCE, s.n, err_rng
        )
    if s.include_intercept:
        X = np.column_stack([np.ones(s.n), C])
        B_true = np.zeros((s.q + 1, 2))
        B_true[1:1 + active] = coeffs
    else:
        X = C
        B_true = np.zeros((s.q, 2))
        B_true[:active] = coeffs
    Y = X @ B_true + E
    return Y, X, B_true


def contaminate(Y, indices, factor):
    """Multiply the listed observation rows (1-based) of Y by factor."""
    Y = validate_response(Y)
    out = Y.copy()
    for i in indices:
        if not 1 <= i <= Y.shape[0]:
            raise ValueError(f"row index {i} outside 1..{Y.shape[0]}")
        out[i - 1] *= factor
    return out


def bias_matrix(B_hat, B_true, rows):
    """Estimation bias B_hat - B_true restricted to the listed coefficient
    rows (1-based)."""
    B_hat = np.asarray(B_hat, dtype=float)
    B_true = np.asarray(B_true, dtype=float)
    if B_hat.shape != B_true.shape:
        raise ValueError(
            f"shape mismatch: estimate {B_hat.shape} vs truth {B_true.shape}"
        )
    rows = list(rows)
    for j in rows:
        if not 1 <= j <= B_hat.shape[0]:
            raise ValueError(f"coefficient row {j} outside 1..{B_hat.shape[0]}")
    idx = np.array([j - 1 for j in rows], dtype=int)
    return B_hat[idx] - B_true[idx]


@dataclass
class StudyResult:
    """Long-format metric rows plus per-scenario aggregates.

    ``rows`` are dicts with keys scenario_id, method, replicate, metric_name,
    value.  ``marker_profiles`` (genotype study only) holds, for the first
    replicate, rows of (marker, method, effect norm) for effect-profile
    plots; ``bias_rows`` mirrors the bias entries in long format for
    box-plot style summaries.
    """

    study: str
    rows: list = field(default_factory=list)
    aggregates: list = field(default_factory=list)
    scenario_ids: list = field(default_factory=list)
    marker_profiles: list = field(default_factory=list)


ZEROS_SHAPES = ((100, 10), (25, 50))
ZEROS_ERROR_KINDS = ("uniform", "asymmetric_laplace")
ZEROS_P_GRID = (0.1, 0.2, 0.3, 0.4)

STUDY_SOLVER_DEFAULTS = SolverOptions(tolerance=1e-6, max_iterations=200)
STUDY_ZERO_TOLERANCE = 1e-3  # a declared-zero row norm, well above solver floor


def zeros_scenarios():
    """The 16 scenario combinations of the excess-of-zeros study."""
    return [
        ZerosScenario(n=n, q=q, p_zeros=pz, error_kind=kind)
        for (n, q) in ZEROS_SHAPES
        for kind in ZEROS_ERROR_KINDS
        for pz in ZEROS_P_GRID
    ]


def _scenario_id(s):
    return f"zeros_n{s.n}_q{s.q}_{s.error_kind}_pz{s.p_zeros:g}"


def _replicate_seed(seed, scenario_index, replicate):
    return int(np.random.SeedSequence([seed, scenario_index, replicate]).generate_state(1)[0])


def _both_fits(Y, X, fit_options, solver_options):
    """Adaptive fit plus the plain (non-adaptive) fit it starts from."""
    adaptive, trace = fit_adaptive(Y, X, fit_options, solver_options)
    return {"non_adaptive": trace.initial_fit, "adaptive": adaptive}


def _quartiles(values):
    v = np.asarray(values, dtype=float)
    return {
        "mean": float(v.mean()),
        "q25": float(np.percentile(v, 25)),
        "median": float(np.percentile(v, 50)),
        "q75": float(np.percentile(v, 75)),
    }


def run_study(study, replicates=None, seed=0, contaminated=False, folds=5,
              solver_options=None, tau=STUDY_ZERO_TOLERANCE, scenarios=None,
              fit_options=None):
    """Run one of the two simulation studies over replicated data sets.

    Parameters
    ----------
    study : {"genotype", "zeros"}
    replicates : int, optional
        Defaults: 20 for the genotype study, 100 for the zeros study.
    contaminated : bool
        Genotype study only: multiply responses 10 and 292 by 100 before
        fitting.
    scenarios : list, optional
        Override the scenario list (zeros study), e.g. for quick runs.
    fit_options : AdaptiveFitOptions, optional
        Template for the per-replicate fit options (the seed field is
        replaced per replicate).

    Everything is reproducible from ``seed``: replicate r of scenario s gets
    an RNG stream derived from (seed, s, r), independent of execution order.
    """
    if study not in ("genotype", "zeros"):
        raise ValueError(f"unknown study {study!r}")
    if replicates is None:
        replicates = 20 if study == "genotype" else 100
    if replicates < 1:
        raise ValueError("replicates must be at least 1")
    if solver_options is None:
        solver_options = STUDY_SOLVER_DEFAULTS
    result = StudyResult(study=study)

    def options_for(rep_seed):
        base = fit_options if fit_options is not None else AdaptiveFitOptions(folds=folds)
        return AdaptiveFitOptions(
            lambda_grid=base.lambda_grid,
            folds=base.folds,
            max_outer_iterations=base.max_outer_iterations,
            outer_tolerance=base.outer_tolerance,
            support_threshold=base.support_threshold,
            rng_seed=rep_seed,
        )

    if study == "genotype":
        scenario_id = "genotype_contaminated" if contaminated else "genotype"
        result.scenario_ids.append(scenario_id)
        qtl_rows = [m + 1 for m in sorted(DEFAULT_QTL_EFFECTS)]  # design rows
        biases = {"non_adaptive": [], "adaptive": []}
        for rep in range(1, replicates + 1):
            rep_seed = _replicate_seed(seed, 0, rep)
            Y, X, B_true = gen_genotype_study(GenotypeScenario(rng_seed=rep_seed))
            if contaminated:
                Y = contaminate(Y, CONTAMINATED_ROWS, CONTAMINATION_FACTOR)
            fits = _both_fits(Y, X, options_for(rep_seed), solver_options)
            for method, fit in fits.items():
                bias = bias_matrix(fit.coefficients, B_true, qtl_rows)
                biases[method].append(bias)
                for r, marker in enumerate(sorted(DEFAULT_QTL_EFFECTS)):
                    for k in range(bias.shape[1]):
                        result.rows.append({
                            "scenario_id": scenario_id,
                            "method": method,
                            "replicate": rep,
                            "metric_name": f"bias_marker{marker}_outcome{k + 1}",
                            "value": float(bias[r, k]),
                        })
                if rep == 1:
                    norms = fit.group_norms[1:]
                    for m in range(1, len(norms) + 1):
                        result.marker_profiles.append({
                            "scenario_id": scenario_id,
                            "marker": m,
                            "method": method,
                            "effect_norm": float(norms[m - 1]),
                        })
        for method, mats in biases.items():
            pooled = np.concatenate([m.ravel() for m in mats])
            result.aggregates.append({
                "scenario_id": scenario_id,
                "method": method,
                "metric_name": "bias",
                "mean": float(pooled.mean()),
                "mean_abs": float(np.abs(pooled).mean()),
                **{k: v for k, v in _quartiles(pooled).items() if k != "mean"},
            })
        return result

    if scenarios is None:
        scenarios = zeros_scenarios()
    for s_idx, scen in enumerate(scenarios):
        scenario_id = _scenario_id(scen)
        result.scenario_ids.append(scenario_id)
        pct = {"non_adaptive": [], "adaptive": []}
        for rep in range(1, replicates + 1):
            rep_seed = _replicate_seed(seed, s_idx, rep)
            scen_rep = ZerosScenario(
                n=scen.n, q=scen.q, p_zeros=scen.p_zeros,
                error_kind=scen.error_kind, rng_seed=rep_seed,
                include_intercept=scen.include_intercept,
            )
            Y, X, B_true = gen_zeros_study(scen_rep)
            fits = _both_fits(Y, X, options_for(rep_seed), solver_options)
            for method, fit in fits.items():
                value = pct_correct_zeros(fit.coefficients, B_true, tau)
                pct[method].append(value)
                result.rows.append({
                    "scenario_id": scenario_id,
                    "method": method,
                    "replicate": rep,
                    "metric_name": "pct_correct_zeros",
                    "value": value,
                })
        for method, values in pct.items():
            result.aggregates.append({
                "scenario_id": scenario_id,
                "method": method,
                "metric_name": "pct_correct_zeros",
                **_quartiles(values),
            })
    return result


def pct_correct_zeros(B_hat, B_true, tau):
    """Percentage of true-zero penalized rows whose estimated norm is <= tau.

    With no true-zero rows the percentage is vacuously 100 (a warning is
    emitted).
    """
    if tau <= 0:
        raise ValueError("tau must be positive")
    hat_norms = row_group_norms(B_hat)[1:]
    true_norms = row_group_norms(B_true)[1:]
    zero_rows = true_norms == 0.0
    if not zero_rows.any():
        warnings.warn("no true-zero penalized rows; percentage is vacuously 100")
        return 100.0
    return 100.0 * float(np.mean(hat_norms[zero_rows] <= tau))
