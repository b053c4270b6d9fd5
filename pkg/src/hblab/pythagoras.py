"""Recover the Pythagorean pair (b, a) of a symbol phi: a is the outer function with |a|^2 = 1/(1+|phi|^2) on the
circle and a(0) > 0, and b = a phi.

Boundary data lives on the midpoint grid theta_j = 2 pi (j + 1/2) / K, which never lands on the pole at z = 1.
Logarithmic zeros of a on the circle are divided out exactly before the Fourier analysis, so for the rational
families only an analytic remainder goes through the FFT. The exponential family is recovered from b instead, whose
boundary log-modulus is smooth.
"""

from __future__ import annotations

import dataclasses
import logging
import math
from dataclasses import dataclass

import numpy as np

try:
    from hblab import config, series
except ImportError:
    import config
    import series

logger = logging.getLogger(__name__)

#: b(z) = (1-tau) z/(zeta - tau z) for the local Dirichlet symbol
LOCAL_DIRICHLET_TAU = (3 - math.sqrt(5)) / 2


@dataclass(frozen=True, eq=False)
class PythagoreanPair:
    """Coefficient series of b and a with a(0) > 0 and |a|^2 + |b|^2 = 1 on the circle.

    Attributes:
        a (series.CoeffSeries): The outer mate
        b (series.CoeffSeries): b = a phi
        a0 (float): a(0), from the mean of the boundary log-modulus
        grid_size (int): Number of boundary samples K
        boundary_defect (float): max | |a|^2 + |b|^2 - 1 | on the grid outside the singular band
    """

    a: series.CoeffSeries
    b: series.CoeffSeries
    a0: float
    grid_size: int
    boundary_defect: float = math.nan

    def __post_init__(self):
        if not self.a0 > 0:
            raise ValueError(f"a(0) must be positive, got {self.a0}")
        constant = self.a.values()[0]
        if abs(constant - self.a0) > 1e-8 * self.a0:
            raise ValueError(f"a(0) = {self.a0!r} disagrees with the constant coefficient {constant!r} of a")


def boundary_grid(grid_size: int) -> np.ndarray:
    """Midpoint grid 2 pi (j + 1/2) / K, j = 0..K-1."""
    return 2 * np.pi * (np.arange(grid_size) + 0.5) / grid_size


def _check_grid(grid_size: int, trunc: int):
    if grid_size < 4 or grid_size & (grid_size - 1):
        raise ValueError(f"Boundary grid size must be a power of two, got {grid_size}")
    if grid_size < 4 * trunc:
        raise ValueError(f"Boundary grid size {grid_size} must be at least 4T = {4 * trunc}")


def outer_log_series(logmod: np.ndarray, trunc: int) -> series.CoeffSeries:
    """Taylor coefficients of log F for the outer function F whose boundary modulus is exp(logmod).

    The Fourier coefficients u_k of the samples give log F = u_0 + 2 sum_{k>=1} u_k z^k. The midpoint grid contributes
    the phase exp(-i pi k / K) to each u_k.

    Args:
        logmod (np.ndarray): log|F| at the K midpoint-grid samples
        trunc (int): Truncation order T

    Raises:
        ValueError: K not a power of two, K < 4T, or non-finite samples

    Returns:
        series.CoeffSeries: log F up to order T, with the real constant term mean(logmod)
    """

    logmod = np.asarray(logmod, dtype=float)
    grid_size = logmod.size
    _check_grid(grid_size, trunc)
    if not np.all(np.isfinite(logmod)):
        raise ValueError("Boundary log-modulus samples must be finite")

    orders = np.arange(trunc + 1)
    fourier = np.fft.rfft(logmod)[: trunc + 1] / grid_size * np.exp(-1j * np.pi * orders / grid_size)
    analytic = 2 * fourier
    analytic[0] = fourier[0].real
    return series.CoeffSeries(analytic)


def outer_from_log_modulus(logmod: np.ndarray, trunc: int) -> series.CoeffSeries:
    """Taylor coefficients of the outer function whose boundary modulus is exp(logmod); F(0) = exp(mean(logmod)) > 0.

    Raises ValueError for a grid that is not a power of two, a grid smaller than 4T, or non-finite samples.
    """
    return series.exp_series(outer_log_series(logmod, trunc))


def _evaluate_on_grid(values: np.ndarray, grid_size: int) -> np.ndarray:
    """Values of a truncated series at the midpoint grid, by inverse FFT."""
    orders = np.arange(values.size)
    return np.fft.ifft(values * np.exp(1j * np.pi * orders / grid_size), n=grid_size) * grid_size


def boundary_defect(
    pair: PythagoreanPair, spec: series.PhiSpec, band: float = config.SINGULARITY_BAND
) -> float:
    """Largest deviation of |a|^2 + |b|^2 from 1 on the grid, away from the singular points of phi.

    Args:
        pair (PythagoreanPair): The pair to check
        spec (series.PhiSpec): Its symbol, for the singular points
        band (float, optional): Excluded angular distance. Defaults to config.SINGULARITY_BAND.

    Returns:
        float: The defect (0 when every sample is excluded)
    """

    theta = boundary_grid(pair.grid_size)
    keep = np.ones(theta.size, dtype=bool)
    for point in spec.singular_points():
        keep &= np.abs(np.angle(np.exp(1j * theta) * np.conj(point))) > band
    if not keep.any():
        return 0.0
    a_values = _evaluate_on_grid(pair.a.values(), pair.grid_size)[keep]
    b_values = _evaluate_on_grid(pair.b.values(), pair.grid_size)[keep]
    return float(np.max(np.abs(np.abs(a_values) ** 2 + np.abs(b_values) ** 2 - 1)))


def _pair_through_a(
    spec: series.PhiSpec, theta: np.ndarray, log_abs_phi: np.ndarray, trunc: int
) -> tuple[series.CoeffSeries, series.CoeffSeries, float]:
    circle = np.exp(1j * theta)
    logmod = -0.5 * np.logaddexp(0.0, 2 * log_abs_phi)

    regular = logmod.copy()
    zeros_factor = series.polynomial([1.0], trunc)
    for zeta, multiplicity in spec.log_zeros():
        regular -= multiplicity * np.log(np.abs(1 - np.conj(zeta) * circle))
        for _ in range(multiplicity):
            zeros_factor = series.mul(zeros_factor, series.polynomial([1.0, -np.conj(zeta)], trunc))

    a = series.mul(zeros_factor, outer_from_log_modulus(regular, trunc))
    b = series.mul(a, series.phi_coeffs(spec, trunc))
    return a, b, float(np.exp(np.mean(regular)))


def _pair_through_b(
    log_phi: series.CoeffSeries, log_abs_phi: np.ndarray, trunc: int
) -> tuple[series.CoeffSeries, series.CoeffSeries, float]:
    #: log|b| = -1/2 log(1 + |phi|^-2) is bounded and smooth where phi blows up
    logmod = -0.5 * np.logaddexp(0.0, -2 * log_abs_phi)
    log_phi_0 = log_phi.values()[0]

    log_b = outer_log_series(logmod, trunc).add(series.polynomial([1j * log_phi_0.imag], trunc))
    b = series.exp_series(log_b)
    a = series.exp_series(log_b.add(log_phi.scale_by(-1)))
    return a, b, float(np.exp(np.mean(logmod) - log_phi_0.real))


def pair_from_phi(
    spec: series.PhiSpec, grid_size: int = config.DEFAULT_GRID, trunc: int = config.DEFAULT_TRUNCATION
) -> PythagoreanPair:
    """The unique Pythagorean pair with phi = b/a.

    log|a| = -1/2 log(1 + |phi|^2) is assembled in log space. Each boundary zero (zeta, m) of a contributes the exact
    outer factor (1 - conj(zeta) z)^m, and its logarithm is removed from the samples before the FFT.

    Symbols with a closed-form log phi never multiply by the coefficients of phi, which can reach 1e9 and beyond.
    There b is the outer function with log|b| = -1/2 log(1 + |phi|^-2) and a = exp(log b - log phi).

    Args:
        spec (series.PhiSpec): The symbol
        grid_size (int, optional): Boundary samples K, a power of two >= 4T. Defaults to config.DEFAULT_GRID.
        trunc (int, optional): Truncation order T. Defaults to config.DEFAULT_TRUNCATION.

    Returns:
        PythagoreanPair: The pair with its boundary defect recorded
    """

    _check_grid(grid_size, trunc)
    theta = boundary_grid(grid_size)
    log_abs_phi = spec.boundary_log_abs(theta)

    log_phi = spec.log_coefficients(trunc)
    if log_phi is None:
        a, b, a0 = _pair_through_a(spec, theta, log_abs_phi, trunc)
    else:
        a, b, a0 = _pair_through_b(log_phi, log_abs_phi, trunc)
    pair = PythagoreanPair(a=a, b=b, a0=a0, grid_size=grid_size)

    defect = boundary_defect(pair, spec)
    if defect > config.BOUNDARY_TOLERANCE:
        logger.warning("Pythagorean identity off by %.3e away from the singular band for %s", defect, spec.describe())
    return dataclasses.replace(pair, boundary_defect=defect)
