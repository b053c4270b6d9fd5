"""Truncated power series over the complex numbers and the symbols phi = b/a whose Taylor coefficients they hold.

Every series carries a scale exponent: the value of coefficient k is coeffs[k] * exp(scale_exp). Operations rescale
as soon as a stored magnitude passes config.RESCALE_THRESHOLD, so the fast-growing coefficients of the exponential
family never overflow.
"""

from __future__ import annotations

import logging
import re
from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as npoly

try:
    from hblab import config, helpers
except ImportError:
    import config
    import helpers

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class CoeffSeries:
    """Taylor coefficients c_0..c_T of a power series, stored as coeffs * exp(scale_exp).

    Attributes:
        coeffs (np.ndarray): Complex coefficient vector of length T+1, every entry finite
        scale_exp (float): Common exponent applied to every stored coefficient
    """

    coeffs: np.ndarray
    scale_exp: float = 0.0

    def __post_init__(self):
        coeffs = np.array(self.coeffs, dtype=complex)
        if coeffs.ndim != 1 or coeffs.size == 0:
            raise ValueError(f"Coefficients must be a non-empty vector, got shape {coeffs.shape}")
        if not np.all(np.isfinite(coeffs)):
            raise ValueError("Coefficients must be finite; rescale before storing")
        if not np.isfinite(self.scale_exp):
            raise ValueError(f"Scale exponent must be finite, got {self.scale_exp}")
        coeffs.setflags(write=False)
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "scale_exp", float(self.scale_exp))

    @property
    def trunc(self) -> int:
        return self.coeffs.size - 1

    def values(self) -> np.ndarray:
        """Materialize the coefficients. Entries beyond the double range come back as inf."""
        with np.errstate(over="ignore", invalid="ignore"):
            return self.coeffs * np.exp(self.scale_exp)

    def log_abs(self) -> np.ndarray:
        """log|c_k| without materializing; -inf for zero coefficients."""
        with np.errstate(divide="ignore"):
            return np.log(np.abs(self.coeffs)) + self.scale_exp

    def truncate(self, trunc: int) -> CoeffSeries:
        if trunc < 0:
            raise ValueError(f"Truncation must be non-negative, got {trunc}")
        if trunc > self.trunc:
            raise ValueError(f"Cannot extend a series truncated at {self.trunc} to {trunc}")
        return CoeffSeries(self.coeffs[: trunc + 1], self.scale_exp)

    def shift(self, power: int) -> CoeffSeries:
        """Multiply by z^power, keeping the truncation order."""
        if power < 0:
            raise ValueError(f"Shift must be non-negative, got {power}")
        shifted = np.zeros_like(self.coeffs)
        shifted[power:] = self.coeffs[: max(self.coeffs.size - power, 0)]
        return CoeffSeries(shifted, self.scale_exp)

    def scale_by(self, factor: complex) -> CoeffSeries:
        if factor == 0:
            return CoeffSeries(np.zeros_like(self.coeffs))
        with np.errstate(over="ignore", invalid="ignore"):
            scaled = self.coeffs * factor
        if np.all(np.isfinite(scaled)):
            return _normalized(scaled, self.scale_exp)
        magnitude = abs(factor)
        return _normalized(self.coeffs * (factor / magnitude), self.scale_exp + np.log(magnitude))

    def add(self, other: CoeffSeries) -> CoeffSeries:
        """Sum of two series after aligning their scale exponents; truncation is the smaller of the two."""
        trunc = min(self.trunc, other.trunc)
        common = max(self.scale_exp, other.scale_exp)
        total = self.coeffs[: trunc + 1] * np.exp(self.scale_exp - common) + other.coeffs[: trunc + 1] * np.exp(
            other.scale_exp - common
        )
        return _normalized(total, common)

    def evaluate(self, w: complex) -> complex:
        """Evaluate the truncated series at w (Horner)."""
        return complex(npoly.polyval(w, self.coeffs) * np.exp(self.scale_exp))

    def __add__(self, other: CoeffSeries) -> CoeffSeries:
        return self.add(other)

    def __mul__(self, other: CoeffSeries) -> CoeffSeries:
        return mul(self, other)


def _normalized(coeffs: np.ndarray, scale_exp: float, threshold: float = config.RESCALE_THRESHOLD) -> CoeffSeries:
    """Build a series, moving the peak magnitude into the scale exponent when it passes the threshold."""

    peak = np.max(np.abs(coeffs)) if coeffs.size else 0.0
    if peak > threshold:
        logger.debug("Rescaling series: peak %.3e folded into scale exponent", peak)
        return CoeffSeries(coeffs / peak, scale_exp + np.log(peak))
    return CoeffSeries(coeffs, scale_exp)


def _unit_peak(series: CoeffSeries) -> tuple[np.ndarray, float]:
    peak = np.max(np.abs(series.coeffs))
    if peak > 1e100:
        return series.coeffs / peak, series.scale_exp + np.log(peak)
    return series.coeffs, series.scale_exp


def polynomial(coeffs, trunc: int | None = None) -> CoeffSeries:
    """Series of a polynomial given by ascending coefficients, zero-padded (or cut) to the truncation order."""

    coeffs = np.atleast_1d(np.asarray(coeffs, dtype=complex))
    trunc = coeffs.size - 1 if trunc is None else trunc
    padded = np.zeros(trunc + 1, dtype=complex)
    padded[: min(coeffs.size, trunc + 1)] = coeffs[: trunc + 1]
    return CoeffSeries(padded)


def geometric(ratio: complex, trunc: int) -> CoeffSeries:
    """Coefficients ratio^j of 1/(1 - ratio*z)."""

    ratio = complex(ratio)
    if ratio == 0:
        return polynomial([1.0], trunc)
    growth = np.log(abs(ratio))
    if trunc * growth < np.log(config.RESCALE_THRESHOLD):
        return CoeffSeries(np.concatenate([[1.0 + 0j], np.cumprod(np.full(trunc, ratio))]))
    powers = np.arange(trunc + 1)
    phases = np.exp(1j * np.angle(ratio) * powers)
    peak = trunc * growth
    return CoeffSeries(phases * np.exp(growth * powers - peak), peak)


def mul(a: CoeffSeries, b: CoeffSeries) -> CoeffSeries:
    """Cauchy product truncated to the smaller of the two truncation orders.

    Args:
        a (CoeffSeries): First factor
        b (CoeffSeries): Second factor

    Returns:
        CoeffSeries: Coefficient k is sum_{j<=k} a_j b_{k-j}, for k up to min(a.trunc, b.trunc)
    """

    trunc = min(a.trunc, b.trunc)
    a_coeffs, a_scale = _unit_peak(a)
    b_coeffs, b_scale = _unit_peak(b)
    product = np.convolve(a_coeffs[: trunc + 1], b_coeffs[: trunc + 1])[: trunc + 1]
    return _normalized(product, a_scale + b_scale)


def binomial_neg(gamma: float, trunc: int) -> CoeffSeries:
    """Taylor coefficients of (1-z)^(-gamma), the generalized binomials prod_{i<j} (gamma+i)/(i+1).

    Built as a running product. When the product would pass the rescale threshold it is carried in log space instead.

    Args:
        gamma (float): Positive exponent
        trunc (int): Truncation order T

    Raises:
        ValueError: If gamma is not positive

    Returns:
        CoeffSeries: Coefficients up to order T, all positive
    """

    if not gamma > 0:
        raise ValueError(f"Binomial exponent must be positive, got {gamma}")
    if trunc < 0:
        raise ValueError(f"Truncation must be non-negative, got {trunc}")

    steps = np.arange(trunc)
    ratios = (gamma + steps) / (steps + 1)
    log_coeffs = np.concatenate([[0.0], np.cumsum(np.log(ratios))])
    peak = log_coeffs.max()
    if peak < np.log(config.RESCALE_THRESHOLD):
        return CoeffSeries(np.concatenate([[1.0], np.cumprod(ratios)]))
    return CoeffSeries(np.exp(log_coeffs - peak), peak)


def exp_series(g: CoeffSeries, threshold: float = config.RESCALE_THRESHOLD) -> CoeffSeries:
    """Taylor coefficients of exp(g) from the recurrence n f_n = sum_{j=1..n} j g_j f_{n-j}.

    The recurrence is linear in f, so whenever a new coefficient passes the threshold everything computed so far is
    divided by its magnitude and the logarithm moves into the scale exponent. Coefficients that fall below the double
    range after such a rescale underflow to zero.

    Args:
        g (CoeffSeries): Exponent series; its materialized coefficients must be finite
        threshold (float, optional): Rescale threshold. Defaults to config.RESCALE_THRESHOLD.

    Returns:
        CoeffSeries: exp(g) truncated at g.trunc
    """

    g_values = g.values()
    if not np.all(np.isfinite(g_values)):
        raise ValueError("Exponent series must have finite coefficients")

    trunc = g.trunc
    result = np.zeros(trunc + 1, dtype=complex)
    scale_exp = 0.0
    head = g_values[0]
    if head.real > np.log(threshold):
        scale_exp = head.real
        result[0] = np.exp(1j * head.imag)
    else:
        result[0] = np.exp(head)

    weighted = np.arange(1, trunc + 1) * g_values[1:]
    for n in range(1, trunc + 1):
        result[n] = np.dot(weighted[:n], result[n - 1 :: -1]) / n
        peak = abs(result[n])
        if peak > threshold:
            result[: n + 1] /= peak
            scale_exp += np.log(peak)
            logger.debug("exp_series rescaled at order %d (scale exponent %.3f)", n, scale_exp)

    return CoeffSeries(result, scale_exp)


class PhiSpec(ABC):
    """A symbol phi in the Smirnov class, given symbolically. Subclasses are the supported families."""

    @abstractmethod
    def coefficients(self, trunc: int) -> CoeffSeries:
        """Taylor coefficients of phi up to order trunc."""

    @abstractmethod
    def boundary_log_abs(self, theta: np.ndarray) -> np.ndarray:
        """log|phi(e^{i theta})| evaluated without forming |phi| itself."""

    def log_zeros(self) -> list[tuple[complex, int]]:
        """Boundary points zeta where the Pythagorean mate a vanishes like |zeta - z|^m, as (zeta, m) pairs."""
        return []

    def singular_points(self) -> list[complex]:
        """Boundary points where phi blows up."""
        return [zeta for zeta, _ in self.log_zeros()]

    def log_coefficients(self, trunc: int) -> CoeffSeries | None:
        """Taylor coefficients of log phi for zero-free symbols known in closed form, else None."""
        return None

    @abstractmethod
    def describe(self) -> str:
        """Short human-readable description used in summaries and CSV metadata."""


@dataclass(frozen=True)
class LocalDirichlet(PhiSpec):
    """phi(z) = z/(zeta - z) with zeta on the unit circle; H(b) is the local Dirichlet space at zeta."""

    zeta: complex = 1.0

    def __post_init__(self):
        if abs(abs(self.zeta) - 1) > config.UNIT_CIRCLE_TOLERANCE:
            raise ValueError(f"zeta must lie on the unit circle, got |zeta| = {abs(self.zeta)!r}")
        object.__setattr__(self, "zeta", complex(self.zeta))

    def coefficients(self, trunc: int) -> CoeffSeries:
        ratio = 1 / self.zeta
        return geometric(ratio, trunc).shift(1).scale_by(ratio)

    def boundary_log_abs(self, theta: np.ndarray) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return -np.log(np.abs(self.zeta - np.exp(1j * theta)))

    def log_zeros(self) -> list[tuple[complex, int]]:
        return [(self.zeta / abs(self.zeta), 1)]

    def describe(self) -> str:
        return f"z/(zeta-z), zeta={helpers.format_complex(self.zeta)}"


@dataclass(frozen=True)
class RationalPole(PhiSpec):
    """phi(z) = z^M/(1-z)^N."""

    M: int
    N: int

    def __post_init__(self):
        if int(self.M) != self.M or self.M < 0:
            raise ValueError(f"M must be a non-negative integer, got {self.M}")
        if int(self.N) != self.N or self.N < 1:
            raise ValueError(f"N must be a positive integer, got {self.N}")

    def coefficients(self, trunc: int) -> CoeffSeries:
        return binomial_neg(self.N, trunc).shift(int(self.M))

    def boundary_log_abs(self, theta: np.ndarray) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return -self.N * np.log(np.abs(1 - np.exp(1j * theta)))

    def log_zeros(self) -> list[tuple[complex, int]]:
        return [(1.0 + 0j, int(self.N))]

    def describe(self) -> str:
        return f"z^{self.M}/(1-z)^{self.N}"


@dataclass(frozen=True)
class ExpSingular(PhiSpec):
    """phi(z) = exp(beta/(1-z)^gamma) with beta > 0 and 0 < gamma < 1."""

    beta: float
    gamma: float

    def __post_init__(self):
        if not self.beta > 0:
            raise ValueError(f"beta must be positive, got {self.beta}")
        if not 0 < self.gamma < 1:
            raise ValueError(f"gamma must lie in (0, 1), got {self.gamma}")

    def coefficients(self, trunc: int) -> CoeffSeries:
        return exp_series(self.log_coefficients(trunc))

    def log_coefficients(self, trunc: int) -> CoeffSeries:
        return binomial_neg(self.gamma, trunc).scale_by(self.beta)

    def boundary_log_abs(self, theta: np.ndarray) -> np.ndarray:
        #: 1 - e^{i theta} has non-negative real part, so the principal power is the right branch
        with np.errstate(divide="ignore", invalid="ignore"):
            return self.beta * np.real((1 - np.exp(1j * theta)) ** (-self.gamma))

    def singular_points(self) -> list[complex]:
        return [1.0 + 0j]

    def describe(self) -> str:
        return f"exp({self.beta:g}/(1-z)^{self.gamma:g})"


@dataclass(frozen=True)
class UserRational(PhiSpec):
    """phi = P/Q for polynomials given by ascending coefficient tuples.

    Q(0) must be nonzero and Q may not vanish inside the open disk, otherwise phi is not holomorphic there.
    """

    numerator: tuple
    denominator: tuple

    def __post_init__(self):
        numerator = tuple(complex(value) for value in np.atleast_1d(self.numerator))
        denominator = tuple(complex(value) for value in np.atleast_1d(self.denominator))
        if not numerator:
            numerator = (0j,)
        if not denominator or denominator[0] == 0:
            raise ValueError("Denominator constant term must be nonzero")
        inside = [root for root in self._roots(denominator) if abs(root) < 1 - config.UNIMODULAR_ROOT_TOLERANCE]
        if inside:
            raise ValueError(f"Denominator vanishes inside the disk at {inside}; phi is not holomorphic there")
        object.__setattr__(self, "numerator", numerator)
        object.__setattr__(self, "denominator", denominator)

    @staticmethod
    def _roots(coeffs) -> np.ndarray:
        trimmed = npoly.polytrim(np.asarray(coeffs, dtype=complex))
        if trimmed.size < 2 or not np.any(trimmed[1:]):
            return np.array([], dtype=complex)
        return npoly.polyroots(trimmed)

    def coefficients(self, trunc: int) -> CoeffSeries:
        """Recursive long division: c_k = (p_k - sum_{i>=1} q_i c_{k-i}) / q_0."""

        numerator = polynomial(self.numerator, trunc).coeffs
        denominator = np.asarray(self.denominator, dtype=complex)
        tail = denominator[1:]
        result = np.zeros(trunc + 1, dtype=complex)
        for k in range(trunc + 1):
            depth = min(k, tail.size)
            carried = np.dot(tail[:depth], result[k - 1 :: -1][:depth]) if depth else 0.0
            result[k] = (numerator[k] - carried) / denominator[0]
        return _normalized(result, 0.0)

    def boundary_log_abs(self, theta: np.ndarray) -> np.ndarray:
        points = np.exp(1j * theta)
        with np.errstate(divide="ignore"):
            return np.log(np.abs(npoly.polyval(points, self.numerator))) - np.log(
                np.abs(npoly.polyval(points, self.denominator))
            )

    def log_zeros(self) -> list[tuple[complex, int]]:
        """Unimodular roots of Q, clustered (repeated roots split by roughly eps^(1/m)), net of roots shared with P."""

        tolerance = config.UNIMODULAR_ROOT_TOLERANCE
        clusters: list[list[complex]] = []
        for root in self._roots(self.denominator):
            if abs(abs(root) - 1) > tolerance:
                continue
            for cluster in clusters:
                if abs(cluster[0] - root) < tolerance:
                    cluster.append(root)
                    break
            else:
                clusters.append([root])

        numerator_roots = self._roots(self.numerator)
        zeros = []
        for cluster in clusters:
            centre = np.mean(cluster)
            shared = int(np.sum(np.abs(numerator_roots - centre) < tolerance)) if numerator_roots.size else 0
            multiplicity = len(cluster) - shared
            if multiplicity > 0:
                zeros.append((complex(centre / abs(centre)), multiplicity))
        return zeros

    def describe(self) -> str:
        numerator = " ".join(helpers.format_complex(value) for value in self.numerator)
        denominator = " ".join(helpers.format_complex(value) for value in self.denominator)
        return f"P/Q, P=[{numerator}], Q=[{denominator}]"


def phi_coeffs(spec: PhiSpec, trunc: int) -> CoeffSeries:
    """Taylor coefficients of phi up to order trunc.

    Args:
        spec (PhiSpec): Symbol description
        trunc (int): Truncation order T >= 0

    Returns:
        CoeffSeries: c_0..c_T
    """

    if trunc < 0:
        raise ValueError(f"Truncation must be non-negative, got {trunc}")
    return spec.coefficients(trunc)


def _parse_parameters(body: str) -> dict[str, str]:
    parameters = {}
    for item in filter(None, (chunk.strip() for chunk in re.split(r"[,;]", body))):
        key, separator, value = item.partition("=")
        if not separator:
            raise ValueError(f"Expected key=value, got {item!r}")
        parameters[key.strip()] = value.strip()
    return parameters


def parse_phi(text: str) -> PhiSpec:
    """Parse a CLI symbol description.

    Grammar: ``zero``, ``dirichlet`` or ``dirichlet:zeta=Z``, ``pole:M=m,N=n``, ``exp:beta=x,gamma=y``,
    ``rational:num=p0 p1 ...;den=q0 q1 ...``. Complex values use the ``re`` / ``re+imi`` form.

    Args:
        text (str): The description

    Raises:
        ValueError: Unknown family, missing or malformed parameters

    Returns:
        PhiSpec: The parsed symbol
    """

    family, _, body = text.strip().partition(":")
    family = family.lower()
    parameters = _parse_parameters(body) if body else {}
    try:
        if family == "zero":
            return UserRational((0,), (1,))
        if family == "dirichlet":
            return LocalDirichlet(helpers.parse_complex(parameters.get("zeta", "1")))
        if family == "pole":
            return RationalPole(int(parameters["M"]), int(parameters["N"]))
        if family == "exp":
            return ExpSingular(float(parameters["beta"]), float(parameters["gamma"]))
        if family == "rational":
            return UserRational(
                tuple(helpers.parse_complex(value) for value in parameters["num"].split()),
                tuple(helpers.parse_complex(value) for value in parameters["den"].split()),
            )
    except KeyError as error:
        raise ValueError(f"Symbol {text!r} is missing parameter {error.args[0]}") from error
    raise ValueError(f"Unknown symbol family {family!r} in {text!r}")
