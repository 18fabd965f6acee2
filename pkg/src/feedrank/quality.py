"""DCG and NDCG of a ranking against graded expert relevance."""
from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from .ingestion import Corpus
from .ranking import RankedList

# "classic": position 1 undiscounted, position i >= 2 divided by log2(i).
# "shifted": every position i divided by log2(i + 1).
DISCOUNTS = ("classic", "shifted")


def discounts(n: int, discount: str = "classic") -> np.ndarray:
    """Divisors for positions 1..n (float64, built with ``math.log2``)."""
    if discount == "classic":
        return np.array([1.0] + [math.log2(i) for i in range(2, n + 1)])
    if discount == "shifted":
        return np.array([math.log2(i + 1) for i in range(1, n + 1)])
    raise ValueError(f"discount must be one of {DISCOUNTS}, got {discount!r}")


def dcg(gains: Sequence[float], discount: str = "classic") -> float:
    gains = np.asarray(gains, dtype=np.float64)
    if gains.ndim != 1 or gains.size == 0:
        raise ValueError("gains must be a non-empty 1-d sequence")
    return float(dcg_rows(gains[None, :], discounts(gains.size, discount))[0])


def dcg_rows(G: np.ndarray, divisors: np.ndarray) -> np.ndarray:
    """Row-wise DCG with strictly left-to-right accumulation.

    np.sum uses pairwise summation; accumulating column by column keeps the
    result identical to a plain sequential loop.
    """
    acc = G[:, 0] / divisors[0]
    for i in range(1, G.shape[1]):
        acc = acc + G[:, i] / divisors[i]
    return acc


def ndcg_from_gains(gains: Sequence[float], discount: str = "classic") -> float:
    """NDCG of gains listed in ranked order; 1.0 when every gain is zero."""
    gains = np.asarray(gains, dtype=np.float64)
    ideal = dcg(np.sort(gains)[::-1], discount)
    if ideal == 0.0:
        return 1.0
    return dcg(gains, discount) / ideal


def gains_in_order(ranked: RankedList, annotations: Corpus | dict) -> list[int]:
    relevance = annotations if isinstance(annotations, dict) else {
        r.id: r.relevance for r in annotations
    }
    gains = []
    for rid in ranked.ids:
        g = relevance.get(rid)
        if g is None:
            raise KeyError(f"no annotated relevance for ranked review {rid!r}")
        gains.append(g)
    return gains


def ndcg(ranked: RankedList, annotations: Corpus | dict, discount: str = "classic") -> float:
    return ndcg_from_gains(gains_in_order(ranked, annotations), discount)
