"""Inner products, norms, Gram matrices and reproducing kernels of H(b), driven by the coefficients c_j of phi = b/a.

For non-extreme b a polynomial p has ||p||^2 = ||p||^2_{H^2} + ||p+||^2_{H^2}, where the plus part p+ is the analytic
projection of conj(phi) p. Its diagonal reproduces ||z^n||^2 = 1 + sum_{j<=n} |c_j|^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import TYPE_CHECKING

import numpy as np
import scipy.linalg

try:
    from hblab import config, series
except ImportError:
    import config
    import series

if TYPE_CHECKING:
    from hblab.pythagoras import PythagoreanPair


@dataclass(frozen=True, eq=False)
class HbPolynomial:
    """Taylor coefficients of a polynomial, ascending."""

    coeffs: np.ndarray

    def __post_init__(self):
        coeffs = np.array(np.atleast_1d(self.coeffs), dtype=complex)
        if coeffs.ndim != 1 or coeffs.size == 0:
            raise ValueError(f"Polynomial coefficients must be a non-empty vector, got shape {coeffs.shape}")
        coeffs.setflags(write=False)
        object.__setattr__(self, "coeffs", coeffs)

    @classmethod
    def monomial(cls, n: int) -> HbPolynomial:
        coeffs = np.zeros(n + 1, dtype=complex)
        coeffs[n] = 1
        return cls(coeffs)

    @property
    def degree(self) -> int:
        nonzero = np.flatnonzero(self.coeffs)
        return int(nonzero[-1]) if nonzero.size else 0

    def padded(self, length: int) -> np.ndarray:
        """Coefficients zero-padded (or cut) to the given length."""
        out = np.zeros(length, dtype=complex)
        out[: min(length, self.coeffs.size)] = self.coeffs[:length]
        return out

    def trimmed(self) -> np.ndarray:
        return self.coeffs[: self.degree + 1]

    def evaluate(self, w: complex) -> complex:
        return complex(np.polynomial.polynomial.polyval(w, self.coeffs))

    def __add__(self, other: HbPolynomial) -> HbPolynomial:
        length = max(self.coeffs.size, other.coeffs.size)
        return HbPolynomial(self.padded(length) + other.padded(length))

    def __sub__(self, other: HbPolynomial) -> HbPolynomial:
        length = max(self.coeffs.size, other.coeffs.size)
        return HbPolynomial(self.padded(length) - other.padded(length))

    def __mul__(self, scalar: complex) -> HbPolynomial:
        return HbPolynomial(self.coeffs * scalar)

    __rmul__ = __mul__


@dataclass(frozen=True, eq=False)
class HbContext:
    """The coefficients of phi together with the cumulative monomial norms cum[n] = 1 + sum_{j<=n} |c_j|^2.

    cum is summed directly whenever that cannot overflow, otherwise it is accumulated in log space and materialized
    (possibly as inf); log_cum is always finite.
    """

    c: series.CoeffSeries
    cum: np.ndarray = field(init=False)
    log_cum: np.ndarray = field(init=False)

    def __post_init__(self):
        log_abs_sq = 2 * self.c.log_abs()
        peak = np.max(log_abs_sq)
        if peak + math.log(self.c.trunc + 1) < 600:
            cum = 1 + np.cumsum(np.abs(self.c.values()) ** 2)
            log_cum = np.log(cum)
        else:
            log_cum = np.logaddexp(0.0, np.logaddexp.accumulate(log_abs_sq))
            with np.errstate(over="ignore"):
                cum = np.exp(log_cum)
        cum.setflags(write=False)
        log_cum.setflags(write=False)
        object.__setattr__(self, "cum", cum)
        object.__setattr__(self, "log_cum", log_cum)

    @classmethod
    def from_phi(cls, spec: series.PhiSpec, trunc: int = config.DEFAULT_TRUNCATION) -> HbContext:
        return cls(series.phi_coeffs(spec, trunc))

    @property
    def trunc(self) -> int:
        return self.c.trunc

    @cached_property
    def values(self) -> np.ndarray:
        """Materialized c_j."""
        return self.c.values()

    def log_norms(self) -> np.ndarray:
        """log ||z^n|| for n = 0..T."""
        return 0.5 * self.log_cum


def monomial_norm_sq(ctx: HbContext, n: int) -> float:
    """||z^n||^2 in H(b), that is 1 + sum_{j<=n} |c_j|^2.

    Args:
        ctx (HbContext): Space context
        n (int): Monomial degree, 0 <= n <= ctx.trunc

    Raises:
        ValueError: If n is outside the truncation

    Returns:
        float: The squared norm
    """

    if not 0 <= n <= ctx.trunc:
        raise ValueError(f"Monomial degree {n} outside truncation 0..{ctx.trunc}")
    return float(ctx.cum[n])


def _check_degree(ctx: HbContext, p: HbPolynomial):
    if p.degree > ctx.trunc:
        raise ValueError(f"Polynomial degree {p.degree} exceeds truncation {ctx.trunc}")


def plus_part(ctx: HbContext, p: HbPolynomial) -> HbPolynomial:
    """Analytic projection of conj(phi) p: q_k = sum_{j=0..deg p - k} conj(c_j) p_{k+j}.

    Computed as a convolution against the reversed coefficients of p.

    Args:
        ctx (HbContext): Space context
        p (HbPolynomial): Polynomial of degree at most ctx.trunc

    Returns:
        HbPolynomial: The plus part, of degree at most deg p
    """

    _check_degree(ctx, p)
    coeffs = p.trimmed()
    degree = coeffs.size - 1
    folded = np.convolve(np.conj(ctx.values[: degree + 1]), coeffs[::-1])[: degree + 1]
    return HbPolynomial(folded[::-1])


def hb_inner(ctx: HbContext, p: HbPolynomial, q: HbPolynomial) -> complex:
    """<p, q> in H(b): the H^2 pairing of the polynomials plus the H^2 pairing of their plus parts.

    Args:
        ctx (HbContext): Space context
        p (HbPolynomial): Left argument (linear)
        q (HbPolynomial): Right argument (conjugate-linear)

    Returns:
        complex: The inner product
    """

    _check_degree(ctx, p)
    _check_degree(ctx, q)
    length = max(p.coeffs.size, q.coeffs.size)
    plus_p = plus_part(ctx, p)
    plus_q = plus_part(ctx, q)
    return complex(
        np.vdot(q.padded(length), p.padded(length)) + np.vdot(plus_q.padded(length), plus_p.padded(length))
    )


def hb_norm(ctx: HbContext, p: HbPolynomial) -> float:
    return math.sqrt(max(hb_inner(ctx, p, p).real, 0.0))


def gram(ctx: HbContext, size: int) -> np.ndarray:
    """Gram matrix G[m, n] = <z^m, z^n> of the monomials 1, z, ..., z^N.

    With the upper-triangular Toeplitz matrix P[k, m] = conj(c_{m-k}) that maps coefficient vectors to plus parts,
    the quadratic form is I + P^H P; G is its transpose, symmetrized so that Hermitian symmetry holds exactly.

    Args:
        ctx (HbContext): Space context
        size (int): N, the highest monomial degree (the matrix is (N+1) x (N+1))

    Raises:
        ValueError: If N exceeds the truncation or the entries overflow

    Returns:
        np.ndarray: Hermitian positive-definite Gram matrix
    """

    if not 0 <= size <= ctx.trunc:
        raise ValueError(f"Gram size {size} outside truncation 0..{ctx.trunc}")
    first_row = np.conj(ctx.values[: size + 1])
    first_column = np.zeros(size + 1, dtype=complex)
    first_column[0] = first_row[0]
    plus = scipy.linalg.toeplitz(first_column, first_row)
    quadratic = np.eye(size + 1) + plus.conj().T @ plus
    if not np.all(np.isfinite(quadratic)):
        raise ValueError(f"Gram entries overflow for N={size}; lower the Gram size")
    matrix = quadratic.T
    return (matrix + matrix.conj().T) / 2


def kernel_truncation(w: complex, degree: int = 0, tolerance: float = config.KERNEL_TAIL_TOLERANCE) -> int:
    """Kernel truncation ceil(log(tol (1-|w|)) / log|w|), plus the degree of the polynomial it will be paired with.

    The plus part of a degree-d polynomial reaches d coefficients into the kernel, hence the extra degree.
    """

    radius = abs(w)
    if radius >= 1:
        raise ValueError(f"Kernel point must lie in the open disk, got |w| = {radius}")
    if radius == 0:
        return degree + 1
    return degree + max(1, math.ceil(math.log(tolerance * (1 - radius)) / math.log(radius)))


def kernel_poly(pair: PythagoreanPair, w: complex, trunc: int) -> HbPolynomial:
    """Taylor coefficients in z of k^b(z, w) = (1 - conj(b(w)) b(z)) / (1 - conj(w) z), truncated at order T.

    Args:
        pair (PythagoreanPair): Pair supplying b; its series must reach order T
        w (complex): Kernel point, |w| < 1
        trunc (int): Truncation order T

    Raises:
        ValueError: If |w| >= 1 or the pair is truncated below T

    Returns:
        HbPolynomial: The truncated kernel
    """

    if abs(w) >= 1:
        raise ValueError(f"Kernel point must lie in the open disk, got |w| = {abs(w)}")
    if pair.b.trunc < trunc:
        raise ValueError(f"Pair truncated at {pair.b.trunc}, kernel needs {trunc}")
    b_at_w = pair.b.evaluate(w)
    szego = series.geometric(np.conj(w), trunc)
    correction = series.mul(pair.b.truncate(trunc), szego)
    return HbPolynomial(szego.values() - np.conj(b_at_w) * correction.values())
