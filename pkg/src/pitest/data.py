"""Dataset ingestion and synthetic data generation for the CLI and scripts."""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .errors import CsvParseError, InvalidInputError

__all__ = ["load_csv", "save_csv", "synthetic_pair"]


def load_csv(path, has_header: bool = False) -> np.ndarray:
    """Load a numeric CSV file into an n x d float64 matrix.

    Every cell must parse as a finite number and every row must have the
    same width; violations raise CsvParseError naming the offending line
    and column (1-based, counting the header line if present).
    """
    path = Path(path)
    rows: list[list[float]] = []
    width: int | None = None
    with open(path, newline="") as handle:
        reader = csv.reader(handle)
        for line_no, record in enumerate(reader, start=1):
            if line_no == 1 and has_header:
                continue
            if not record:  # blank line
                continue
            if width is None:
                width = len(record)
            elif len(record) != width:
                raise CsvParseError(
                    f"{path}: line {line_no}: expected {width} columns, got {len(record)}"
                )
            parsed = []
            for col_no, cell in enumerate(record, start=1):
                try:
                    value = float(cell)
                except ValueError:
                    raise CsvParseError(
                        f"{path}: line {line_no}, column {col_no}: not a number: {cell!r}"
                    ) from None
                if not np.isfinite(value):
                    raise CsvParseError(
                        f"{path}: line {line_no}, column {col_no}: non-finite value {cell!r}"
                    )
                parsed.append(value)
            rows.append(parsed)
    if not rows:
        raise CsvParseError(f"{path}: no data rows")
    return np.array(rows, dtype=np.float64)


def save_csv(path, X) -> None:
    """Write a matrix as a plain numeric CSV (no header), atomically."""
    from .ioutil import atomic_write_text

    A = np.asarray(X, dtype=np.float64)
    if A.ndim == 1:
        A = A[:, None]
    lines = "\n".join(",".join(repr(float(v)) for v in row) for row in A)
    atomic_write_text(path, lines + "\n")


def synthetic_pair(
    n: int,
    d: int = 2,
    m: int = 2,
    dependence: float = 0.0,
    clusters: int = 3,
    x_scale: float = 1.0,
    seed: int = 0,
) -> tuple[np.ndarray, np.ndarray]:
    """Draw a paired synthetic dataset (X, Y) from a Gaussian mixture.

    X is sampled from `clusters` Gaussian blobs (then multiplied by
    ``x_scale``); Y mixes a linear image of X's standardized coordinates
    with independent noise:

        Y = dependence * (X_std @ C) + (1 - dependence) * noise

    so ``dependence = 0`` gives independent pairs and values near 1 give a
    nearly deterministic relationship.
    """
    if n < 2 or d < 1 or m < 1 or clusters < 1:
        raise InvalidInputError(
            f"invalid synthetic shape n={n}, d={d}, m={m}, clusters={clusters}"
        )
    if not (0.0 <= dependence <= 1.0):
        raise InvalidInputError(f"dependence must lie in [0, 1], got {dependence}")
    rng = np.random.default_rng(seed)
    centers = rng.normal(0.0, 3.0, size=(clusters, d))
    labels = rng.integers(0, clusters, size=n)
    X_std = centers[labels] + rng.standard_normal((n, d))
    coupling = rng.standard_normal((d, m)) / np.sqrt(d)
    noise = rng.standard_normal((n, m))
    Y = dependence * (X_std @ coupling) + (1.0 - dependence) * noise
    return x_scale * X_std, Y
