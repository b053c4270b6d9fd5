"""Saddle-point asymptotics for the Taylor coefficients of phi(z) = exp(beta/(1-z)^gamma).

The auxiliary functions are
    log M(r) = beta/(1-r)^gamma,
    A(r) = beta gamma r/(1-r)^(gamma+1),
    B(r) = beta gamma r (1 + gamma r)/(1-r)^(gamma+2),
and c_n ~ M(r_n)/(r_n^n sqrt(2 pi B(r_n))) with A(r_n) = n. Solving the saddle equation in s = 1 - r gives the closed
form c_n ~ exp(C n^(gamma/(gamma+1))) / (D n^((gamma+2)/(2gamma+2))). Everything here is carried as logarithms.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
import pandas as pd
from toolz import interleave

try:
    from hblab import config, series
except ImportError:
    import config
    import series

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class HaymanModel:
    """Parameters of exp(beta/(1-z)^gamma) and the constants C, D of the closed-form asymptotic."""

    beta: float
    gamma: float
    C: float = field(init=False)
    D: float = field(init=False)

    def __post_init__(self):
        if not self.beta > 0:
            raise ValueError(f"beta must be positive, got {self.beta}")
        if not 0 < self.gamma < 1:
            raise ValueError(f"gamma must lie in (0, 1), got {self.gamma}")
        base = (self.beta * self.gamma) ** (1 / (self.gamma + 1))
        object.__setattr__(self, "C", base * (1 + 1 / self.gamma))
        object.__setattr__(self, "D", math.sqrt(2 * math.pi * (self.gamma + 1) / base))
        assert math.isclose(self.C, (self.beta * self.gamma) ** (1 / (self.gamma + 1)) * (1 + 1 / self.gamma))
        assert math.isclose(self.D**2 * base, 2 * math.pi * (self.gamma + 1))

    @property
    def growth_exponent(self) -> float:
        """gamma/(gamma+1), the power of n inside the exponential."""
        return self.gamma / (self.gamma + 1)

    def as_spec(self) -> series.ExpSingular:
        return series.ExpSingular(self.beta, self.gamma)


class Auxiliary(NamedTuple):
    log_m: float
    a: float
    b: float


@dataclass(frozen=True)
class SaddleSolution:
    """Root r_n of A(r) = n, with s_n = 1 - r_n and the residual A(r_n) - n.

    first_order is the leading approximation (beta gamma / n)^(1/(gamma+1)) of s_n.
    """

    n: int
    r_n: float
    s_n: float
    residual: float
    iterations: int
    first_order: float

    def __post_init__(self):
        if not 0 < self.s_n < 1:
            raise ValueError(f"s_n must lie in (0, 1), got {self.s_n}")


def _a_of_s(model: HaymanModel, s: float) -> float:
    return model.beta * model.gamma * (1 - s) / s ** (model.gamma + 1)


def _log_b_of_s(model: HaymanModel, s: float) -> float:
    r = 1 - s
    return (
        math.log(model.beta * model.gamma) + math.log(r) + math.log1p(model.gamma * r) - (model.gamma + 2) * math.log(s)
    )


def mab(model: HaymanModel, r: float) -> Auxiliary:
    """log M(r), A(r) and B(r).

    Args:
        model (HaymanModel): The parameters
        r (float): Radius in (0, 1)

    Raises:
        ValueError: If r is outside (0, 1)

    Returns:
        Auxiliary: (log M, A, B)
    """

    if not 0 < r < 1:
        raise ValueError(f"Radius must lie in (0, 1), got {r}")
    s = 1 - r
    return Auxiliary(
        log_m=model.beta / s**model.gamma,
        a=model.beta * model.gamma * r / s ** (model.gamma + 1),
        b=model.beta * model.gamma * r * (1 + model.gamma * r) / s ** (model.gamma + 2),
    )


def solve_rn(
    model: HaymanModel,
    n: int,
    width: float = config.BISECTION_WIDTH,
    max_iterations: int = config.NEWTON_MAX_ITERATIONS,
    tol: float = config.SADDLE_RESIDUAL_TOLERANCE,
) -> SaddleSolution:
    """Solve A(r_n) = n in the variable s = 1 - r, where A is strictly decreasing.

    The bracket [lo, hi] starts at [s/2, s] with s halved until A(lo) > n; geometric bisection narrows it to relative
    width `width`, and Newton steps with dA/ds = -B/r polish the root, falling back to bisection whenever a step leaves
    the bracket.

    Args:
        model (HaymanModel): The parameters
        n (int): Coefficient index, n >= 1
        width (float, optional): Relative bracket width before Newton. Defaults to config.BISECTION_WIDTH.
        max_iterations (int, optional): Newton cap. Defaults to config.NEWTON_MAX_ITERATIONS.
        tol (float, optional): Target |A(r_n) - n| / n. Defaults to config.SADDLE_RESIDUAL_TOLERANCE.

    Raises:
        ValueError: If n < 1

    Returns:
        SaddleSolution: The root and its residual
    """

    if n < 1:
        raise ValueError(f"Saddle index must be at least 1, got {n}")

    high = 1.0
    low = 0.5
    while _a_of_s(model, low) <= n:
        high, low = low, low / 2

    while high - low > width * high:
        middle = math.sqrt(low * high)
        if _a_of_s(model, middle) > n:
            low = middle
        else:
            high = middle

    s = math.sqrt(low * high)
    iterations = 0
    residual = _a_of_s(model, s) - n
    while abs(residual) > tol * n and iterations < max_iterations:
        iterations += 1
        if residual > 0:
            low = s
        else:
            high = s
        slope = math.exp(_log_b_of_s(model, s)) / (1 - s)
        step = s + residual / slope
        s = step if low < step < high else 0.5 * (low + high)
        residual = _a_of_s(model, s) - n

    if abs(residual) > tol * n:
        logger.warning(
            "Saddle solver stopped after %d Newton steps with residual %.3e at n=%d", iterations, residual, n
        )
    return SaddleSolution(
        n=n,
        r_n=1 - s,
        s_n=s,
        residual=residual,
        iterations=iterations,
        first_order=(model.beta * model.gamma / n) ** (1 / (model.gamma + 1)),
    )


def hayman_estimate(model: HaymanModel, n: int) -> float:
    """log of M(r_n) / (r_n^n sqrt(2 pi B(r_n)))."""

    saddle = solve_rn(model, n)
    s = saddle.s_n
    log_m = model.beta / s**model.gamma
    return log_m - n * math.log1p(-s) - 0.5 * (math.log(2 * math.pi) + _log_b_of_s(model, s))


def closed_asymptotic(model: HaymanModel, n: int) -> float:
    """log of exp(C n^(gamma/(gamma+1))) / (D n^((gamma+2)/(2gamma+2)))."""

    if n < 1:
        raise ValueError(f"Coefficient index must be at least 1, got {n}")
    return (
        model.C * n**model.growth_exponent
        - math.log(model.D)
        - (model.gamma + 2) / (2 * model.gamma + 2) * math.log(n)
    )


def exact_log_coefficients(model: HaymanModel, trunc: int, max_order: int = config.MAX_EXACT_ORDER) -> np.ndarray:
    """log c_n, n = 0..trunc, from the series exponential of beta (1-z)^-gamma."""

    if trunc > max_order:
        raise ValueError(f"Exact coefficients up to {trunc} exceed the budget of {max_order}")
    return series.phi_coeffs(model.as_spec(), trunc).log_abs()


def compare_exact(model: HaymanModel, n_list, max_order: int = config.MAX_EXACT_ORDER) -> pd.DataFrame:
    """Exact coefficients against both asymptotic routes.

    Columns: n, log_exact, then log_estimate / ratio_estimate and log_closed_form / ratio_closed_form, where each ratio
    is exact/asymptotic computed as exp of the log difference. Row n = 0 carries NaN for the asymptotic columns.

    Args:
        model (HaymanModel): The parameters
        n_list: Coefficient indices
        max_order (int, optional): Largest order the exact recurrence may build. Defaults to config.MAX_EXACT_ORDER.

    Returns:
        pd.DataFrame: One row per n
    """

    n_values = [int(n) for n in n_list]
    if not n_values:
        raise ValueError("No coefficient indices to compare")
    if min(n_values) < 0:
        raise ValueError(f"Coefficient indices must be non-negative, got {min(n_values)}")
    log_exact = exact_log_coefficients(model, max(n_values), max_order=max_order)[n_values]

    routes = {"estimate": hayman_estimate, "closed_form": closed_asymptotic}
    table = pd.DataFrame({"n": n_values, "log_exact": log_exact})
    for name, route in routes.items():
        table[f"log_{name}"] = [route(model, n) if n >= 1 else np.nan for n in n_values]
        table[f"ratio_{name}"] = np.exp(table["log_exact"] - table[f"log_{name}"])

    columns = interleave([[f"log_{name}" for name in routes], [f"ratio_{name}" for name in routes]])
    return table[["n", "log_exact", *columns]]
