"""Weighted-function scoring and deterministic ranking."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from sklearn.base import BaseEstimator

from ._validation import MAX_PRECISION, check_factors
from .features import FactorTable, Mode
from .ingestion import RANKING_HEADER, write_rows


@dataclass(frozen=True, order=True)
class WeightVector:
    """Four fixed-point weights ``units[i] / scale`` that sum to exactly one."""

    units: tuple[int, int, int, int]
    scale: int = 100

    def __post_init__(self):
        units = tuple(int(u) for u in self.units)
        object.__setattr__(self, "units", units)
        if len(units) != 4:
            raise ValueError(f"expected 4 weight units, got {len(units)}")
        if any(u < 0 for u in units):
            raise ValueError(f"weight units must be non-negative: {units}")
        if self.scale not in {10**p for p in range(MAX_PRECISION + 1)}:
            raise ValueError(f"scale must be 10**p with p in [0, {MAX_PRECISION}], got {self.scale}")
        if sum(units) != self.scale:
            raise ValueError(f"weight units {units} sum to {sum(units)}, not {self.scale}")

    @classmethod
    def from_floats(cls, weights: Sequence[float], precision: int = 2) -> "WeightVector":
        scale = 10**precision
        return cls(tuple(round(w * scale) for w in weights), scale)

    @property
    def precision(self) -> int:
        return len(str(self.scale)) - 1

    @property
    def weights(self) -> tuple[float, float, float, float]:
        return tuple(u / self.scale for u in self.units)

    def __str__(self):
        return ",".join(f"{w:.{self.precision}f}" for w in self.weights)


def score(weights: WeightVector, factors: Sequence[float]) -> float:
    """Weighted sum of one review's four factors."""
    w1, w2, w3, w4 = weights.weights
    f1, f2, f3, f4 = (float(f) for f in factors)
    return w1 * f1 + w2 * f2 + w3 * f3 + w4 * f4


def score_block(units: np.ndarray, scale: int, X: np.ndarray) -> np.ndarray:
    """Scores of every review under every weight vector in ``units``.

    Returns a (n_weights, n_reviews) array. The sum is evaluated term by
    term in the same order as :func:`score`, so each entry is bit-identical
    to the scalar path (a matmul would not guarantee that).
    """
    W = np.asarray(units, dtype=np.float64) / scale
    out = W[:, 0:1] * X[:, 0]
    out += W[:, 1:2] * X[:, 1]
    out += W[:, 2:3] * X[:, 2]
    out += W[:, 3:4] * X[:, 3]
    return out


def order_by_score(scores: np.ndarray) -> np.ndarray:
    """Indices sorting each row by descending score; ties keep index order."""
    return np.argsort(-scores, axis=-1, kind="stable")


@dataclass(frozen=True)
class RankedList:
    entries: tuple[tuple[str, float, int], ...]  # (id, score, position)
    weights: WeightVector | None = None
    mode: Mode | None = None
    mitigated: bool = False

    def __len__(self):
        return len(self.entries)

    @property
    def ids(self) -> list[str]:
        return [e[0] for e in self.entries]

    @property
    def scores(self) -> dict[str, float]:
        return {e[0]: e[1] for e in self.entries}

    @classmethod
    def from_scores(cls, scores: dict[str, float], **kwargs) -> "RankedList":
        """Order by descending score, then ascending id."""
        ordered = sorted(scores.items(), key=lambda kv: (-kv[1], kv[0]))
        entries = tuple((rid, float(s), pos) for pos, (rid, s) in enumerate(ordered, start=1))
        return cls(entries, **kwargs)

    def to_csv(self, path) -> None:
        write_rows(path, RANKING_HEADER, ((pos, rid, s) for rid, s, pos in self.entries))


def rank(weights: WeightVector, table: FactorTable) -> RankedList:
    scores = score_block(np.array([weights.units]), weights.scale, table.values)[0]
    order = order_by_score(scores)
    entries = tuple((table.ids[i], float(scores[i]), pos) for pos, i in enumerate(order, start=1))
    return RankedList(entries, weights=weights, mode=table.mode)


class WeightedRanker(BaseEstimator):
    """Linear scorer over the four review factors with fixed weights.

    ``predict`` returns scores; ``rank`` returns row indices best first, ties
    resolved by row order. For learning the weights see
    :class:`feedrank.search.ExhaustiveWeightSearch`.
    """

    def __init__(self, weights=(0.25, 0.25, 0.25, 0.25), precision=2):
        self.weights = weights
        self.precision = precision

    def _weight_vector(self):
        if isinstance(self.weights, WeightVector):
            return self.weights
        return WeightVector.from_floats(self.weights, self.precision)

    def fit(self, X, y=None):
        check_factors(X)
        self.weights_ = self._weight_vector()
        self.n_features_in_ = 4
        return self

    def predict(self, X):
        X = check_factors(X)
        wv = getattr(self, "weights_", None) or self._weight_vector()
        return score_block(np.array([wv.units]), wv.scale, X)[0]

    def rank(self, X):
        return order_by_score(self.predict(X))

    def score(self, X, y):
        from .quality import ndcg_from_gains
        y = np.asarray(y)
        return ndcg_from_gains(y[self.rank(X)])
