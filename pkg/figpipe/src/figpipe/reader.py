"""Read-only access to adepth simulation logs (CSV with a header row)."""

from __future__ import annotations

from pathlib import Path

import numpy as np

__all__ = ["MissingColumnError", "load_log", "require_columns", "strategy_label"]


class MissingColumnError(KeyError):
    """A figure asked for a column the CSV does not carry."""


def load_log(path) -> dict[str, np.ndarray]:
    """Load a log CSV into a column dict; never writes anything back."""
    path = Path(path)
    with open(path, "r", encoding="utf-8") as f:
        header = f.readline().strip().split(",")
        data = np.loadtxt(f, delimiter=",", ndmin=2)
    if data.shape[1] != len(header):
        raise ValueError(f"{path}: {len(header)} columns in header, {data.shape[1]} in rows")
    return {name: data[:, i] for i, name in enumerate(header)}


def require_columns(log: dict[str, np.ndarray], columns, where="log") -> None:
    for column in columns:
        if column not in log:
            raise MissingColumnError(f"column {column!r} missing from {where}")


def strategy_label(path) -> str:
    """Legend label for a log file; the file stem names the strategy."""
    return Path(path).stem
