"""Lower bounds and truncated norms of the summability operators S_n on H(b), and a model-based classification of the
monomial-norm growth against the three divergence conditions:

(i) sup |gamma_nn| ||z^n|| = inf, (ii) sum 1/(|gamma_nn| ||z^n||)^2 < inf, (iii) sum 1/(|gamma_nn| ||z^n||) < inf.

For Cesaro weights |gamma_nn| behaves like n^-alpha, so each condition reduces to a statement about the growth
exponent of ||z^n|| relative to alpha.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
import pandas as pd
import scipy.linalg
import scipy.optimize

try:
    from hblab import config, space
    from hblab.pythagoras import PythagoreanPair
    from hblab.summability import SummabilityRow, TriMatrixSpec, apply_row
except ImportError:
    import config
    import space
    from pythagoras import PythagoreanPair
    from summability import SummabilityRow, TriMatrixSpec, apply_row

logger = logging.getLogger(__name__)

POLYNOMIAL = "polynomial"
STRETCHED = "stretched_exponential"
BOUNDED = "bounded"


@dataclass(frozen=True)
class DivergenceVerdict:
    """Which of the conditions (i)-(iii) the fitted growth model satisfies.

    Attributes:
        case_i (bool): sup |gamma_nn| ||z^n|| is infinite
        case_ii (bool): sum (|gamma_nn| ||z^n||)^-2 converges
        case_iii (bool): sum (|gamma_nn| ||z^n||)^-1 converges
        fitted_model (str): polynomial, stretched_exponential or bounded
        residual (float): RMS residual of the selected fit
        rho (float): log ||z^n|| ~ rho log n (polynomial model)
        scale (float): log ||z^n|| ~ scale n^delta (stretched-exponential model)
        delta (float): Exponent of the stretched-exponential model
        alternative_residual (float): RMS residual of the model that was not selected
    """

    case_i: bool
    case_ii: bool
    case_iii: bool
    fitted_model: str
    residual: float
    rho: float = math.nan
    scale: float = math.nan
    delta: float = math.nan
    alternative_residual: float = math.nan

    def __post_init__(self):
        if self.fitted_model not in (POLYNOMIAL, STRETCHED, BOUNDED):
            raise ValueError(f"Unknown growth model {self.fitted_model!r}")
        if (self.case_iii and not self.case_ii) or (self.case_ii and not self.case_i):
            raise ValueError(f"Verdict breaks the implication chain iii => ii => i: {self}")

    @property
    def label(self) -> str:
        if self.case_iii:
            return "cases i-iii"
        if self.case_ii:
            return "cases i-ii"
        if self.case_i:
            return "case i only"
        return "none"

    def as_row(self) -> dict:
        return {
            "fitted_model": self.fitted_model,
            "rho": self.rho,
            "scale": self.scale,
            "delta": self.delta,
            "residual": self.residual,
            "alternative_residual": self.alternative_residual,
            "case_i": self.case_i,
            "case_ii": self.case_ii,
            "case_iii": self.case_iii,
            "verdict": self.label,
        }


@dataclass(frozen=True)
class OpNormEstimate:
    """Truncated norm of S_n on span{1, z, ..., z^N} with the lemma lower bound a(0) |gamma_nn| ||z^n||."""

    n: int
    N: int
    value: float
    lemma_bound: float = 0.0
    iterations: int = 0
    converged: bool = True

    def __post_init__(self):
        if not self.value >= 0:
            raise ValueError(f"Operator norm estimate must be non-negative, got {self.value}")
        if not self.lemma_bound >= 0:
            raise ValueError(f"Lemma bound must be non-negative, got {self.lemma_bound}")


@dataclass(frozen=True)
class PowerIterationResult:
    eigenvalue: float
    iterations: int
    converged: bool


def lemma_lower_bound(pair: PythagoreanPair, ctx: space.HbContext, row: SummabilityRow) -> float:
    """a(0) |gamma_nn| ||z^n||, the norm of S_n applied to the witness z^n a.

    Args:
        pair (PythagoreanPair): Supplies a(0)
        ctx (space.HbContext): Space context; row.n must lie within its truncation
        row (SummabilityRow): Row n of the method

    Returns:
        float: The lower bound (0 for a vanishing diagonal)
    """

    norm_sq = space.monomial_norm_sq(ctx, row.n)
    if row.diagonal == 0:
        return 0.0
    return pair.a0 * abs(row.diagonal) * math.sqrt(norm_sq)


def lemma_witness(pair: PythagoreanPair, n: int, N: int) -> space.HbPolynomial:
    """z^n a truncated at degree N."""

    if not 0 <= n <= N:
        raise ValueError(f"Need 0 <= n <= N, got n={n}, N={N}")
    if pair.a.trunc < N - n:
        raise ValueError(f"Pair truncated at {pair.a.trunc}, witness needs {N - n}")
    coeffs = np.zeros(N + 1, dtype=complex)
    coeffs[n:] = pair.a.values()[: N - n + 1]
    return space.HbPolynomial(coeffs)


def witness_ratio(ctx: space.HbContext, pair: PythagoreanPair, row: SummabilityRow, N: int) -> float:
    """||S_n g|| / ||g|| for the truncated witness g = z^n a; a certified lower bound for the truncated norm."""

    witness = lemma_witness(pair, row.n, N)
    return space.hb_norm(ctx, apply_row(row, witness)) / space.hb_norm(ctx, witness)


def power_iteration(
    matrix: np.ndarray,
    tol: float = config.POWER_ITERATION_TOLERANCE,
    max_iterations: int = config.POWER_ITERATION_MAX_ITERATIONS,
) -> PowerIterationResult:
    """Largest eigenvalue of a Hermitian positive-semidefinite matrix.

    Starts from the normalized all-ones vector and stops once the residual ||M v - lambda v|| drops below
    tol * lambda.

    Args:
        matrix (np.ndarray): Hermitian PSD matrix
        tol (float, optional): Relative residual target. Defaults to config.POWER_ITERATION_TOLERANCE.
        max_iterations (int, optional): Iteration cap. Defaults to config.POWER_ITERATION_MAX_ITERATIONS.

    Returns:
        PowerIterationResult: Rayleigh quotient at the last iterate, iteration count and convergence flag
    """

    size = matrix.shape[0]
    vector = np.ones(size, dtype=complex) / math.sqrt(size)
    eigenvalue = 0.0
    for iteration in range(1, max_iterations + 1):
        image = matrix @ vector
        eigenvalue = float(np.vdot(vector, image).real)
        image_norm = np.linalg.norm(image)
        if image_norm == 0:
            return PowerIterationResult(0.0, iteration, True)
        if np.linalg.norm(image - eigenvalue * vector) < tol * eigenvalue:
            return PowerIterationResult(eigenvalue, iteration, True)
        vector = image / image_norm

    logger.warning(
        "Power iteration hit the %d-iteration cap; eigenvalue %.12g is not converged", max_iterations, eigenvalue
    )
    return PowerIterationResult(eigenvalue, max_iterations, False)


def truncated_opnorm(
    ctx: space.HbContext,
    row: SummabilityRow,
    N: int,
    pair: PythagoreanPair | None = None,
    tol: float = config.POWER_ITERATION_TOLERANCE,
    max_iterations: int = config.POWER_ITERATION_MAX_ITERATIONS,
) -> OpNormEstimate:
    """Norm of x -> D x on span{1, ..., z^N} in the H(b) metric, D the row weights padded with zeros past n.

    With the metric matrix Q = conj(G) = L L^H the operator is unitarily equivalent to L^H D L^-H, whose largest
    singular value comes from power iteration on its Gram product.

    Args:
        ctx (space.HbContext): Space context
        row (SummabilityRow): Row n of the method
        N (int): Truncation degree, n <= N <= ctx.trunc
        pair (PythagoreanPair | None, optional): When given, the lemma bound is recorded too. Defaults to None.
        tol (float, optional): Power-iteration tolerance. Defaults to config.POWER_ITERATION_TOLERANCE.
        max_iterations (int, optional): Power-iteration cap. Defaults to config.POWER_ITERATION_MAX_ITERATIONS.

    Raises:
        ValueError: n > N, N beyond the truncation, or a Gram matrix that is numerically not positive definite

    Returns:
        OpNormEstimate: The estimate
    """

    if not row.n <= N <= ctx.trunc:
        raise ValueError(f"Need n <= N <= T, got n={row.n}, N={N}, T={ctx.trunc}")

    metric = space.gram(ctx, N).conj()
    try:
        lower = scipy.linalg.cholesky(metric, lower=True)
    except np.linalg.LinAlgError as error:
        raise ValueError(f"Gram matrix of size {N + 1} is numerically not positive definite") from error

    upper = lower.conj().T
    weights = np.zeros(N + 1, dtype=complex)
    weights[: row.n + 1] = row.weights
    inverse_upper = scipy.linalg.solve_triangular(upper, np.eye(N + 1), lower=False)
    operator = upper @ (weights[:, None] * inverse_upper)
    result = power_iteration(operator.conj().T @ operator, tol=tol, max_iterations=max_iterations)

    return OpNormEstimate(
        n=row.n,
        N=N,
        value=math.sqrt(max(result.eigenvalue, 0.0)),
        lemma_bound=lemma_lower_bound(pair, ctx, row) if pair is not None else 0.0,
        iterations=result.iterations,
        converged=result.converged,
    )


def opnorm_profile(
    ctx: space.HbContext,
    spec: TriMatrixSpec,
    n_list,
    N: int,
    pair: PythagoreanPair | None = None,
) -> pd.DataFrame:
    """Truncated norms of S_n for each n in n_list at the common truncation N, one row per n."""

    estimates = [truncated_opnorm(ctx, spec.row(n), N, pair=pair) for n in n_list]
    return pd.DataFrame(
        {
            "n": [estimate.n for estimate in estimates],
            "lemma_bound": [estimate.lemma_bound for estimate in estimates],
            "truncated_norm": [estimate.value for estimate in estimates],
            "N": [estimate.N for estimate in estimates],
            "converged": [estimate.converged for estimate in estimates],
        }
    )


def _fit_polynomial(log_n: np.ndarray, log_norms: np.ndarray) -> tuple[float, float]:
    slope, intercept = np.polyfit(log_n, log_norms, 1)
    residual = log_norms - (slope * log_n + intercept)
    return float(slope), float(np.sqrt(np.mean(residual**2)))


def _fit_stretched(n: np.ndarray, log_norms: np.ndarray) -> tuple[float, float, float]:
    """scale * n^delta + const, least squares in (scale, const) for each delta, bounded search over delta."""

    def solve(delta):
        design = np.column_stack([n**delta, np.ones_like(n)])
        solution, *_ = np.linalg.lstsq(design, log_norms, rcond=None)
        residual = log_norms - design @ solution
        return solution, float(np.sqrt(np.mean(residual**2)))

    best = scipy.optimize.minimize_scalar(
        lambda delta: solve(delta)[1], bounds=config.STRETCHED_EXPONENT_BOUNDS, method="bounded"
    )
    delta = float(best.x)
    solution, residual = solve(delta)
    return float(solution[0]), delta, residual


def classify_log(
    log_norms,
    alpha: float,
    margin: float = config.CLASSIFY_MARGIN,
    delta_floor: float = config.STRETCHED_EXPONENT_FLOOR,
    advantage: float = config.STRETCHED_ADVANTAGE,
) -> DivergenceVerdict:
    """Classify log ||z^n||, n = 0..T, against conditions (i)-(iii) for Cesaro order alpha.

    Both growth models are fitted over n in [T/10, T]. Polynomial growth is the default. The stretched-exponential model
    replaces it only when its exponent delta reaches the floor and its residual is below the advantage fraction of the
    polynomial residual; with a small delta, scale * n^delta is a disguised multiple of log n.
    Under polynomial growth n^rho the conditions read rho - alpha > 0, > 1/2, > 1, and each must clear its
    threshold by the margin. Stretched-exponential growth with positive scale satisfies all three for every alpha.

    Args:
        log_norms: log ||z^n|| for n = 0..T
        alpha (float): Cesaro order, alpha >= 0
        margin (float, optional): Required clearance over each threshold. Defaults to config.CLASSIFY_MARGIN.
        delta_floor (float, optional): Smallest stretched exponent accepted.
            Defaults to config.STRETCHED_EXPONENT_FLOOR.
        advantage (float, optional): Residual ratio the stretched fit must beat. Defaults to config.STRETCHED_ADVANTAGE.

    Raises:
        ValueError: If T < 100, alpha < 0 or log-norms are not finite

    Returns:
        DivergenceVerdict: The verdict and fit diagnostics
    """

    log_norms = np.asarray(log_norms, dtype=float)
    trunc = log_norms.size - 1
    if trunc < config.CLASSIFY_MINIMUM_TRUNCATION:
        raise ValueError(f"Classification needs T >= {config.CLASSIFY_MINIMUM_TRUNCATION}, got T={trunc}")
    if alpha < 0:
        raise ValueError(f"Cesaro order must be non-negative, got {alpha}")

    n = np.arange(max(trunc // 10, 1), trunc + 1, dtype=float)
    window = log_norms[n.astype(int)]
    if not np.all(np.isfinite(window)):
        raise ValueError("Log-norms must be finite over the fitting window")
    if np.ptp(window) <= config.BOUNDED_SPREAD:
        return DivergenceVerdict(False, False, False, BOUNDED, residual=0.0)

    rho, polynomial_residual = _fit_polynomial(np.log(n), window)
    scale, delta, stretched_residual = _fit_stretched(n, window)
    logger.debug(
        "Growth fits: n^%.4f (rms %.3e), %.4f n^%.4f (rms %.3e)",
        rho,
        polynomial_residual,
        scale,
        delta,
        stretched_residual,
    )

    stretched_wins = delta >= delta_floor and stretched_residual < advantage * polynomial_residual
    if not stretched_wins:
        excess = rho - alpha
        return DivergenceVerdict(
            case_i=excess > margin,
            case_ii=excess > 0.5 + margin,
            case_iii=excess > 1 + margin,
            fitted_model=POLYNOMIAL,
            residual=polynomial_residual,
            rho=rho,
            alternative_residual=stretched_residual,
        )

    diverges = scale > 0 and delta > 0
    return DivergenceVerdict(
        case_i=diverges,
        case_ii=diverges,
        case_iii=diverges,
        fitted_model=STRETCHED,
        residual=stretched_residual,
        scale=scale,
        delta=delta,
        alternative_residual=polynomial_residual,
    )


def classify(norms, alpha: float, **kwargs) -> DivergenceVerdict:
    """classify_log on the logarithms of the norms ||z^n||, n = 0..T."""

    norms = np.asarray(norms, dtype=float)
    if np.any(norms <= 0):
        raise ValueError("Monomial norms must be positive")
    return classify_log(np.log(norms), alpha, **kwargs)


def hypothesis_sums(ctx: space.HbContext, spec: TriMatrixSpec, n_max: int) -> pd.DataFrame:
    """Running versions of the three conditions for an arbitrary row family, n = 0..n_max.

    Columns: n, diagonal (|gamma_nn|), norm (||z^n||), weighted_norm (|gamma_nn| ||z^n||), running_sup,
    sum_ii (partial sums of weighted_norm^-2) and sum_iii (partial sums of weighted_norm^-1). Everything is assembled
    from logarithms, so a vanishing diagonal shows up as an infinite term.
    """

    if not 0 <= n_max <= ctx.trunc:
        raise ValueError(f"n_max {n_max} outside truncation 0..{ctx.trunc}")
    diagonal = np.abs(spec.diagonals(n_max))
    log_norms = ctx.log_norms()[: n_max + 1]
    with np.errstate(divide="ignore", over="ignore"):
        log_weighted = np.log(diagonal) + log_norms
        weighted = np.exp(log_weighted)
        return pd.DataFrame(
            {
                "n": np.arange(n_max + 1),
                "diagonal": diagonal,
                "norm": np.exp(log_norms),
                "weighted_norm": weighted,
                "running_sup": np.maximum.accumulate(weighted),
                "sum_ii": np.cumsum(np.exp(-2 * log_weighted)),
                "sum_iii": np.cumsum(np.exp(-log_weighted)),
            }
        )
