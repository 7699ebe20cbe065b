"""Input validation helpers shared by the estimators and tensor ops."""

from __future__ import annotations

import numpy as np


def as_rng(seed) -> np.random.Generator:
    """Return a Generator from a seed, Generator, or None."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def check_simplex(arr, axis=-1, tol=1e-9, name="array"):
    """Validate that slices along ``axis`` are probability vectors."""
    arr = np.asarray(arr, dtype=float)
    if np.any(arr < -tol):
        raise ValueError(f"{name} has negative entries")
    sums = arr.sum(axis=axis)
    if not np.allclose(sums, 1.0, atol=tol):
        worst = float(np.max(np.abs(sums - 1.0)))
        raise ValueError(f"{name} rows must sum to 1 (max deviation {worst:.3g})")
    return arr


def check_distance_matrix(d, name="distance matrix"):
    """Validate a symmetric, zero-diagonal, non-negative square matrix."""
    d = np.asarray(d, dtype=float)
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise ValueError(f"{name} must be square, got shape {d.shape}")
    if not np.allclose(d, d.T, atol=1e-12):
        raise ValueError(f"{name} must be symmetric")
    if np.any(np.abs(np.diag(d)) > 1e-12):
        raise ValueError(f"{name} must have a zero diagonal")
    if np.any(d < 0):
        raise ValueError(f"{name} must be non-negative")
    return d


def check_same_length(a, b, name_a="a", name_b="b"):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ValueError(f"{name_a} and {name_b} have mismatched shapes {a.shape} vs {b.shape}")
    return a, b
