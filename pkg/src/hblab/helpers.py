"""Small codecs shared by the CLI and the file loaders: complex number text, CSV emission and polynomial files."""

import sys
from pathlib import Path

import numpy as np
import pandas as pd

try:
    from hblab import config
except ImportError:
    import config


def parse_complex(text: str) -> complex:
    """Parse a real ("1.5") or complex ("1.5-2e-3i") value.

    Args:
        text (str): The token

    Raises:
        ValueError: If the token is not a number in either form

    Returns:
        complex: The parsed value
    """

    token = text.strip()
    if not token:
        raise ValueError("Empty value")
    try:
        if token.endswith("i"):
            return complex(token[:-1] + "j")
        return complex(float(token))
    except ValueError as error:
        raise ValueError(f"Cannot parse {text!r} as a complex value") from error


def format_complex(value: complex) -> str:
    """Format a complex value as "re+imi" with 17 significant digits, which parse_complex reads back exactly."""
    value = complex(value)
    return f"{value.real:.17g}{value.imag:+.17g}i"


def read_tokens(path: Path):
    """Yield (line number, tokens) for every line that is not blank or a # comment.

    Args:
        path (Path): Text file to read

    Raises:
        FileNotFoundError: If the file does not exist
    """

    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"{path} not found")
    for line_number, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        content = line.split("#", 1)[0].strip()
        if content:
            yield line_number, content.split()


def load_polynomial(path: Path) -> np.ndarray:
    """Load ascending polynomial coefficients, whitespace- or newline-separated, in the complex value grammar.

    Args:
        path (Path): Polynomial sample file

    Raises:
        ValueError: If a token fails to parse; the message names the line

    Returns:
        np.ndarray: Complex coefficient vector (a single zero for an empty file)
    """

    coefficients = []
    for line_number, tokens in read_tokens(path):
        for token in tokens:
            try:
                coefficients.append(parse_complex(token))
            except ValueError as error:
                raise ValueError(f"{path}, line {line_number}: {error}") from error
    return np.array(coefficients or [0j], dtype=complex)


def csv_ready(table: pd.DataFrame) -> pd.DataFrame:
    """Copy of the table with complex columns rendered as "re+imi" strings; real columns are left to float_format."""

    ready = table.copy()
    for column in ready.columns:
        if np.iscomplexobj(ready[column].to_numpy()):
            ready[column] = [format_complex(value) for value in ready[column]]
    return ready


def write_table(table: pd.DataFrame, out: Path | None = None) -> int:
    """Write a result table as CSV with a one-line header and reals at 17 significant digits.

    Args:
        table (pd.DataFrame): Result table
        out (Path | None, optional): Destination; stdout when None. Defaults to None.

    Returns:
        int: Number of rows written
    """

    ready = csv_ready(table)
    if out is None:
        ready.to_csv(sys.stdout, index=False, float_format=config.CSV_FLOAT_FORMAT)
    else:
        ready.to_csv(Path(out), index=False, float_format=config.CSV_FLOAT_FORMAT)
    return len(ready)
