"""Lower-triangular summability methods S_n(f) = sum_{k<=n} gamma_nk f_k z^k: generalized Cesaro weights, custom
matrices loaded from text files, and their action on polynomials.
"""

from __future__ import annotations

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass
from pathlib import Path

import numpy as np

try:
    from hblab import helpers
    from hblab.space import HbPolynomial
except ImportError:
    import helpers
    from space import HbPolynomial

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class SummabilityRow:
    """Row n of a lower-triangular matrix, (gamma_n0, ..., gamma_nn)."""

    n: int
    weights: np.ndarray

    def __post_init__(self):
        weights = np.array(np.atleast_1d(self.weights), dtype=complex)
        if self.n < 0:
            raise ValueError(f"Row index must be non-negative, got {self.n}")
        if weights.shape != (self.n + 1,):
            raise ValueError(f"Row {self.n} must have {self.n + 1} entries, got {weights.size}")
        weights.setflags(write=False)
        object.__setattr__(self, "weights", weights)

    @property
    def diagonal(self) -> complex:
        return complex(self.weights[-1])


def cesaro_row(alpha: float, n: int) -> SummabilityRow:
    """Generalized Cesaro weights binom(n, k) / binom(n + alpha, k), built as the running product of
    (n - i) / (n + alpha - i).

    Args:
        alpha (float): Order alpha >= 0; 0 gives Taylor partial sums
        n (int): Row index

    Raises:
        ValueError: If alpha < 0 or n < 0

    Returns:
        SummabilityRow: Real, positive weights starting at 1
    """

    if alpha < 0:
        raise ValueError(f"Cesaro order must be non-negative, got {alpha}")
    if n < 0:
        raise ValueError(f"Row index must be non-negative, got {n}")
    steps = np.arange(n)
    factors = (n - steps) / (n + alpha - steps)
    return SummabilityRow(n, np.concatenate([[1.0], np.cumprod(factors)]))


class TriMatrixSpec(ABC):
    """Generator of the rows of a lower-triangular summability matrix."""

    @abstractmethod
    def row(self, n: int) -> SummabilityRow:
        """Row n."""

    @abstractmethod
    def describe(self) -> str:
        """Short description used in summaries."""

    def rows(self, n_max: int) -> list[SummabilityRow]:
        return [self.row(n) for n in range(n_max + 1)]

    def diagonals(self, n_max: int) -> np.ndarray:
        """gamma_nn for n = 0..n_max."""
        return np.array([diagonal(self, n) for n in range(n_max + 1)])


@dataclass(frozen=True)
class Cesaro(TriMatrixSpec):
    alpha: float = 0.0

    def __post_init__(self):
        if self.alpha < 0:
            raise ValueError(f"Cesaro order must be non-negative, got {self.alpha}")

    def row(self, n: int) -> SummabilityRow:
        return cesaro_row(self.alpha, n)

    def diagonals(self, n_max: int) -> np.ndarray:
        #: gamma_nn = 1/binom(n + alpha, n) = prod_{j<=n} j/(j + alpha)
        steps = np.arange(1, n_max + 1)
        return np.concatenate([[1.0], np.cumprod(steps / (steps + self.alpha))]).astype(complex)

    def describe(self) -> str:
        return f"Cesaro(alpha={self.alpha:g})"


@dataclass(frozen=True, eq=False)
class CustomMatrix(TriMatrixSpec):
    """Rows 0..n_max of a matrix read from a file; rows past the last one are undefined."""

    loaded: tuple[SummabilityRow, ...]
    source: str = "custom"

    def __post_init__(self):
        if not self.loaded:
            raise ValueError("A custom matrix needs at least one row")
        for index, row in enumerate(self.loaded):
            if row.n != index:
                raise ValueError(f"Row {index} is labelled as row {row.n}")

    @property
    def n_max(self) -> int:
        return len(self.loaded) - 1

    def row(self, n: int) -> SummabilityRow:
        if not 0 <= n <= self.n_max:
            raise ValueError(f"Row {n} not defined; {self.source} holds rows 0..{self.n_max}")
        return self.loaded[n]

    def describe(self) -> str:
        return f"Custom({self.source}, rows 0..{self.n_max})"


def diagonal(spec: TriMatrixSpec, n: int) -> complex:
    return spec.row(n).diagonal


def apply_row(row: SummabilityRow, p: HbPolynomial) -> HbPolynomial:
    """S_n(p): coefficient k becomes gamma_nk p_k for k <= n, higher coefficients are dropped."""
    return HbPolynomial(p.padded(row.n + 1) * row.weights)


def load_custom_matrix(path: Path) -> CustomMatrix:
    """Read a lower-triangular matrix: one row per line, whitespace-separated "re" or "re+imi" entries, blank lines
    and # comments ignored.

    Args:
        path (Path): Matrix file

    Raises:
        FileNotFoundError: If the file does not exist
        ValueError: On a parse failure (names the line) or a ragged row (names the row index)

    Returns:
        CustomMatrix: The validated matrix
    """

    path = Path(path)
    loaded = []
    for line_number, tokens in helpers.read_tokens(path):
        try:
            weights = [helpers.parse_complex(token) for token in tokens]
        except ValueError as error:
            raise ValueError(f"{path}, line {line_number}: {error}") from error
        index = len(loaded)
        if len(weights) != index + 1:
            raise ValueError(
                f"{path}: row {index} (line {line_number}) has {len(weights)} entries, expected {index + 1}"
            )
        loaded.append(SummabilityRow(index, weights))

    if not loaded:
        raise ValueError(f"{path} holds no matrix rows")
    logger.debug("Loaded %d rows from %s", len(loaded), path)
    return CustomMatrix(tuple(loaded), source=path.name)


def write_custom_matrix(spec: TriMatrixSpec, n_max: int, path: Path) -> Path:
    """Write rows 0..n_max in the format load_custom_matrix reads. Real weights are written as plain reals."""

    lines = [f"# {spec.describe()}"]
    for row in spec.rows(n_max):
        entries = [
            f"{value.real:.17g}" if value.imag == 0 else helpers.format_complex(value) for value in row.weights
        ]
        lines.append(" ".join(entries))
    path = Path(path)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path
