"""Per-review ranking factors: category, sentiment, star score and length or entropy."""
from __future__ import annotations

import enum
import math
from collections import Counter
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import as_reviews
from .ingestion import FACTOR_HEADER, Category, Corpus, write_rows


class Mode(enum.Enum):
    REVLEN = "revlen"
    ENTROPY = "entropy"

    @classmethod
    def parse(cls, value) -> "Mode":
        if isinstance(value, cls):
            return value
        return cls(str(value).strip().lower())


def shannon_entropy(text: str) -> float:
    """Character-level Shannon entropy of ``text`` in bits (0 for the empty string)."""
    n = len(text)
    if n == 0:
        return 0.0
    h = 0.0
    for count in sorted(Counter(text).values()):
        p = count / n
        h -= p * math.log2(p)
    # a single repeated symbol gives -1*log2(1) = -0.0
    return h + 0.0


def review_length(text: str) -> int:
    """Number of Unicode code points."""
    return len(text)


_CATEGORY_FACTOR = {
    Category.BUG_REPORT: 1.0,
    Category.FEATURE_REQUEST: 0.5,
    Category.OTHER: 0.0,
}


def category_factor(category) -> float:
    if not isinstance(category, Category):
        category = Category.parse(category)
    return _CATEGORY_FACTOR[category]


def sentiment_factor(sentiment: int) -> float:
    # shifting by 3 keeps the denominator positive for sentiment -2
    if sentiment not in range(-2, 3):
        raise ValueError(f"sentiment must be an integer in [-2, 2], got {sentiment!r}")
    return 1.0 / (sentiment + 3)


def score_factor(stars: int) -> float:
    if stars not in range(1, 6):
        raise ValueError(f"stars must be an integer in [1, 5], got {stars!r}")
    return 1.0 / stars


@dataclass(frozen=True)
class FactorTable:
    """Factors f1..f4 for every review, rows sorted by ascending review id.

    Sorting by id makes row index order coincide with the ranking tie-break,
    so the table is independent of the corpus input order.
    """

    ids: tuple[str, ...]
    values: np.ndarray  # (n, 4) float64, read-only
    mode: Mode
    max_length: int
    max_entropy: float

    def __len__(self) -> int:
        return len(self.ids)

    def row(self, review_id: str) -> tuple[float, float, float, float]:
        i = self.index[review_id]
        return tuple(float(v) for v in self.values[i])

    @property
    def index(self) -> dict[str, int]:
        return {rid: i for i, rid in enumerate(self.ids)}

    def as_dict(self) -> dict[str, tuple[float, float, float, float]]:
        return {rid: tuple(float(v) for v in self.values[i]) for i, rid in enumerate(self.ids)}

    def to_csv(self, path) -> None:
        write_rows(path, FACTOR_HEADER,
                   ((rid, *map(float, self.values[i]), self.mode.value) for i, rid in enumerate(self.ids)))


class ReviewFactorizer(TransformerMixin, BaseEstimator):
    """Turn reviews into the (n, 4) factor matrix used by the weighted ranker.

    ``fit`` records the corpus maxima that normalise the fourth factor
    (text length or character entropy); ``transform`` applies them.

    Parameters
    ----------
    mode : {"entropy", "revlen"}
        Which text feature fills the fourth slot.
    """

    def __init__(self, mode="entropy"):
        self.mode = mode

    def _raw_text_feature(self, reviews):
        mode = Mode.parse(self.mode)
        if mode is Mode.ENTROPY:
            return np.array([shannon_entropy(r.text) for r in reviews], dtype=np.float64)
        return np.array([review_length(r.text) for r in reviews], dtype=np.float64)

    def fit(self, X, y=None):
        reviews = as_reviews(X)
        mode = Mode.parse(self.mode)
        lengths = [review_length(r.text) for r in reviews]
        entropies = [shannon_entropy(r.text) for r in reviews]
        self.max_length_ = max(lengths)
        self.max_entropy_ = max(entropies)
        denom = self.max_entropy_ if mode is Mode.ENTROPY else self.max_length_
        if denom <= 0:
            raise ValueError(
                f"cannot normalise {mode.value}: every review text is empty or has zero {mode.value}"
            )
        self.n_features_in_ = 4
        return self

    def transform(self, X):
        check_is_fitted(self, "max_length_")
        reviews = as_reviews(X)
        mode = Mode.parse(self.mode)
        denom = self.max_entropy_ if mode is Mode.ENTROPY else float(self.max_length_)
        out = np.empty((len(reviews), 4), dtype=np.float64)
        out[:, 0] = [category_factor(r.category) for r in reviews]
        out[:, 1] = [sentiment_factor(r.sentiment) for r in reviews]
        out[:, 2] = [score_factor(r.stars) for r in reviews]
        # unseen reviews may exceed the fitted maximum
        out[:, 3] = np.minimum(self._raw_text_feature(reviews) / denom, 1.0)
        return out


def build_factor_table(corpus: Corpus, mode="entropy") -> FactorTable:
    mode = Mode.parse(mode)
    reviews = sorted(corpus.reviews, key=lambda r: r.id)
    fz = ReviewFactorizer(mode=mode.value).fit(reviews)
    values = fz.transform(reviews)
    values.setflags(write=False)
    return FactorTable(
        ids=tuple(r.id for r in reviews),
        values=values,
        mode=mode,
        max_length=int(fz.max_length_),
        max_entropy=float(fz.max_entropy_),
    )
