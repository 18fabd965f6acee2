"""Input checks shared by the estimators and the array-level functions."""
from __future__ import annotations

import numpy as np

from .ingestion import Corpus, Review

MAX_PRECISION = 9


def check_factors(X, name: str = "X") -> np.ndarray:
    """Return ``X`` as a C-contiguous float64 array of shape (n, 4) with entries in [0, 1]."""
    X = np.ascontiguousarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != 4:
        raise ValueError(f"{name} must have shape (n_reviews, 4), got {X.shape}")
    if X.shape[0] == 0:
        raise ValueError(f"{name} is empty")
    if not np.all(np.isfinite(X)):
        raise ValueError(f"{name} contains non-finite values")
    if X.min() < 0.0 or X.max() > 1.0:
        raise ValueError(f"{name} factors must lie in [0, 1]")
    return X


def check_relevance(y, n: int | None = None) -> np.ndarray:
    y = np.asarray(y)
    if y.ndim != 1:
        raise ValueError("relevance must be one-dimensional")
    if n is not None and y.shape[0] != n:
        raise ValueError(f"relevance has {y.shape[0]} entries, expected {n}")
    if y.size == 0:
        raise ValueError("relevance is empty")
    as_int = y.astype(np.int64)
    if not np.array_equal(as_int, y) or as_int.min() < 0 or as_int.max() > 3:
        raise ValueError("relevance values must be integers in [0, 3]")
    return as_int


def check_precision(precision: int, force: bool = False) -> int:
    if isinstance(precision, bool) or int(precision) != precision:
        raise ValueError(f"precision must be an integer, got {precision!r}")
    precision = int(precision)
    if not 0 <= precision <= MAX_PRECISION:
        raise ValueError(f"precision must be in [0, {MAX_PRECISION}], got {precision}")
    if precision >= 3 and not force:
        raise ValueError(
            f"precision {precision} enumerates {(10**precision + 3) * (10**precision + 2) * (10**precision + 1) // 6} "
            "weight vectors; pass force=True (and a time budget) to run it"
        )
    return precision


def as_reviews(X) -> list[Review]:
    if isinstance(X, Corpus):
        return list(X.reviews)
    reviews = list(X)
    if not reviews:
        raise ValueError("no reviews given")
    if not all(isinstance(r, Review) for r in reviews):
        raise TypeError("expected a Corpus or an iterable of Review")
    return reviews
