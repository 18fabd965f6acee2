"""Exhaustive search of the discretised weight simplex for the best NDCG."""
from __future__ import annotations

import csv
import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterator, Optional

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._validation import check_factors, check_precision, check_relevance
from .features import FactorTable, Mode
from .ingestion import Corpus, fmt_float
from .quality import dcg, dcg_rows, discounts, ndcg_from_gains
from .ranking import WeightVector, order_by_score, score_block

DEFAULT_BLOCK = 4096


def n_solutions(precision: int) -> int:
    """Number of 4-part compositions of 10**precision."""
    return math.comb(10**precision + 3, 3)


def n_combinations(precision: int) -> int:
    """Size of the full grid where every weight ranges over 0..1 independently."""
    return (10**precision + 1) ** 4


def enumerate_weights(precision: int, force: bool = False) -> Iterator[WeightVector]:
    """Yield every weight vector at ``precision`` once, in lexicographic order of units."""
    precision = check_precision(precision, force)
    scale = 10**precision
    for u1 in range(scale + 1):
        for u2 in range(scale - u1 + 1):
            for u3 in range(scale - u1 - u2 + 1):
                yield WeightVector((u1, u2, u3, scale - u1 - u2 - u3), scale)


def weight_blocks(precision: int, u1_start: int = 0, u1_stop: Optional[int] = None,
                  block_size: int = DEFAULT_BLOCK) -> Iterator[np.ndarray]:
    """Stream the same compositions as int64 arrays of shape (k, 4).

    Only first units in ``[u1_start, u1_stop)`` are produced. Blocks are
    filled whole (u1, u2) runs at a time, so a block may exceed
    ``block_size`` by less than one run.
    """
    scale = 10**precision
    u1_stop = scale + 1 if u1_stop is None else u1_stop
    pending: list[np.ndarray] = []
    size = 0
    for u1 in range(u1_start, u1_stop):
        for u2 in range(scale - u1 + 1):
            rest = scale - u1 - u2
            run = np.empty((rest + 1, 4), dtype=np.int64)
            run[:, 0] = u1
            run[:, 1] = u2
            run[:, 2] = np.arange(rest + 1)
            run[:, 3] = rest - run[:, 2]
            pending.append(run)
            size += rest + 1
            if size >= block_size:
                yield np.concatenate(pending)
                pending, size = [], 0
    if pending:
        yield np.concatenate(pending)


def evaluate_block(units: np.ndarray, scale: int, X: np.ndarray, gains: np.ndarray,
                   divisors: np.ndarray, ideal: float) -> np.ndarray:
    """NDCG of the ranking induced by each weight vector in ``units``."""
    order = order_by_score(score_block(units, scale, X))
    if ideal == 0.0:
        return np.ones(units.shape[0])
    return dcg_rows(gains[order], divisors) / ideal


@dataclass(frozen=True)
class SearchResult:
    best_weights: Optional[WeightVector]
    best_ndcg: float
    solutions_evaluated: int
    combinations_nominal: int
    wall_time: float  # seconds
    mode: Optional[Mode]
    precision: int
    partial: bool = False
    log_bytes: Optional[int] = None

    def to_dict(self, timing: bool = True) -> dict:
        """JSON-ready dict; ``timing=False`` drops the fields that vary run to run."""
        w = self.best_weights
        d = {
            "mode": self.mode.value if self.mode else None,
            "precision": self.precision,
            "scale": 10**self.precision,
            "units": list(w.units) if w else None,
            "weights": list(w.weights) if w else None,
            "ndcg": self.best_ndcg,
            "ndcg_text": fmt_float(self.best_ndcg),
            "solutions_evaluated": self.solutions_evaluated,
            "solutions_total": n_solutions(self.precision),
            "combinations_nominal": self.combinations_nominal,
            "partial": self.partial,
        }
        if timing:
            d["wall_time"] = self.wall_time
            d["log_bytes"] = self.log_bytes
        return d

    def to_json(self, timing: bool = True) -> str:
        return json.dumps(self.to_dict(timing), indent=2, sort_keys=True)


def _split_u1(scale: int, parts: int) -> list[tuple[int, int]]:
    """Contiguous u1 ranges of roughly equal candidate counts."""
    # candidates with first unit u1: (s - u1 + 1)(s - u1 + 2)/2
    weights = [(scale - u + 1) * (scale - u + 2) // 2 for u in range(scale + 1)]
    total = sum(weights)
    bounds, acc, start = [], 0, 0
    for u, w in enumerate(weights):
        acc += w
        if acc * parts >= total * (len(bounds) + 1) and len(bounds) < parts - 1:
            bounds.append((start, u + 1))
            start = u + 1
    bounds.append((start, scale + 1))
    return [b for b in bounds if b[0] < b[1]]


def _search_range(X, gains, divisors, ideal, scale, precision, u1_range, deadline, keep_log):
    best_ndcg, best_units, count, partial = -math.inf, None, 0, False
    log = [] if keep_log else None
    for units in weight_blocks(precision, *u1_range):
        if deadline is not None and time.monotonic() > deadline:
            partial = True
            break
        values = evaluate_block(units, scale, X, gains, divisors, ideal)
        i = int(np.argmax(values))  # first maximiser = lexicographically smallest in block
        if values[i] > best_ndcg:
            best_ndcg, best_units = float(values[i]), tuple(int(u) for u in units[i])
        count += units.shape[0]
        if keep_log:
            log.append((units, values))
    return best_ndcg, best_units, count, partial, log


def _aligned_gains(table: FactorTable, annotations) -> np.ndarray:
    relevance = annotations.relevance() if isinstance(annotations, Corpus) else dict(annotations)
    missing = [rid for rid in table.ids if rid not in relevance or relevance[rid] is None]
    if missing:
        raise KeyError(f"no annotated relevance for {len(missing)} review(s), e.g. {missing[0]!r}")
    return check_relevance([relevance[rid] for rid in table.ids]).astype(np.float64)


def search_arrays(X, gains, precision: int, *, n_jobs: int = 1, force: bool = False,
                  time_budget: Optional[float] = None, log_path=None,
                  discount: str = "classic", mode: Optional[Mode] = None) -> SearchResult:
    """Exhaustive search over factor rows ``X`` with relevance ``gains`` in row order.

    Rows are the tie-break order of the ranking. The reduction keeps the
    highest NDCG and, among equal values, the lexicographically smallest
    units, so the result does not depend on ``n_jobs``.
    """
    precision = check_precision(precision, force)
    if precision >= 3 and time_budget is None:
        raise ValueError("precision >= 3 requires an explicit time budget")
    X = check_factors(X)
    gains = check_relevance(gains, X.shape[0]).astype(np.float64)
    scale = 10**precision
    divisors = discounts(X.shape[0], discount)
    ideal = dcg(np.sort(gains)[::-1], discount)

    t0 = time.perf_counter()
    deadline = None if time_budget is None else time.monotonic() + time_budget
    n_jobs = max(1, int(n_jobs))
    ranges = _split_u1(scale, n_jobs) if n_jobs > 1 else [(0, scale + 1)]
    args = (X, gains, divisors, ideal, scale, precision)
    keep_log = log_path is not None
    if n_jobs == 1:
        parts = [_search_range(*args, r, deadline, keep_log) for r in ranges]
    else:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            parts = list(pool.map(lambda r: _search_range(*args, r, deadline, keep_log), ranges))

    best_ndcg, best_units = -math.inf, None
    for value, units, *_ in parts:
        if units is None:
            continue
        if value > best_ndcg or (value == best_ndcg and units < best_units):
            best_ndcg, best_units = value, units
    log_bytes = _write_log(log_path, scale, parts) if keep_log else None
    wall = time.perf_counter() - t0
    return SearchResult(
        best_weights=WeightVector(best_units, scale) if best_units else None,
        best_ndcg=best_ndcg if best_units else math.nan,
        solutions_evaluated=sum(p[2] for p in parts),
        combinations_nominal=n_combinations(precision),
        wall_time=wall,
        mode=mode,
        precision=precision,
        partial=any(p[3] for p in parts),
        log_bytes=log_bytes,
    )


def _write_log(path, scale, parts) -> int:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["u1", "u2", "u3", "u4", "scale", "ndcg"])
        for *_, log in parts:
            for units, values in log:
                for u, v in zip(units.tolist(), values.tolist()):
                    writer.writerow([*u, scale, fmt_float(v)])
    return os.path.getsize(path)


def exhaustive_search(table: FactorTable, annotations, precision: int, **kwargs) -> SearchResult:
    """Evaluate every weight vector at ``precision`` and return the NDCG maximiser.

    ``annotations`` is a Corpus carrying relevance or an id -> relevance map.
    Keyword arguments are passed to :func:`search_arrays`.
    """
    gains = _aligned_gains(table, annotations)
    return search_arrays(table.values, gains, precision, mode=table.mode, **kwargs)


@dataclass(frozen=True)
class CostEstimate:
    precision: int
    projected_solutions: int
    projected_time: float  # seconds
    projected_space: Optional[float]  # bytes
    # same projections scaled by the full-grid ratio (10**p + 1)**4 / (10**q + 1)**4
    grid_ratio_solutions: float
    grid_ratio_time: float
    grid_ratio_space: Optional[float]

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def estimate_cost(measured: SearchResult, target_precision: int,
                  measured_bytes: Optional[float] = None) -> CostEstimate:
    """Extrapolate time and disk usage of a search at ``target_precision``.

    Time and space scale linearly with the number of candidates. The primary
    projection uses exact composition counts; the grid-ratio variant scales
    the measured solution count by the ratio of full-grid sizes.
    """
    if target_precision <= measured.precision:
        raise ValueError("target precision must exceed the measured precision")
    if measured.solutions_evaluated <= 0:
        raise ValueError("measured search evaluated no candidates")
    if measured_bytes is None:
        measured_bytes = measured.log_bytes
    target = n_solutions(target_precision)
    ratio = target / measured.solutions_evaluated
    grid = n_combinations(target_precision) / n_combinations(measured.precision)
    return CostEstimate(
        precision=target_precision,
        projected_solutions=target,
        projected_time=measured.wall_time * ratio,
        projected_space=None if measured_bytes is None else measured_bytes * ratio,
        grid_ratio_solutions=measured.solutions_evaluated * grid,
        grid_ratio_time=measured.wall_time * grid,
        grid_ratio_space=None if measured_bytes is None else measured_bytes * grid,
    )


class ExhaustiveWeightSearch(BaseEstimator):
    """Learn ranking weights by scanning every weight vector on a decimal grid.

    ``fit(X, y)`` takes the (n, 4) factor matrix and graded relevance in
    [0, 3]; rows are assumed to be in tie-break order (ascending review id
    when built from a :class:`FactorTable`).

    Parameters
    ----------
    precision : int
        Decimal digits per weight; the grid step is 10**-precision.
    n_jobs : int
        Worker threads. The result is identical for any value.
    discount : {"classic", "shifted"}
        Position discount used by NDCG.
    force, time_budget
        Required to run precision 3 or finer.
    """

    def __init__(self, precision=2, n_jobs=1, discount="classic", force=False, time_budget=None):
        self.precision = precision
        self.n_jobs = n_jobs
        self.discount = discount
        self.force = force
        self.time_budget = time_budget

    def fit(self, X, y):
        self.search_result_ = search_arrays(
            X, y, self.precision, n_jobs=self.n_jobs, force=self.force,
            time_budget=self.time_budget, discount=self.discount,
        )
        if self.search_result_.best_weights is None:
            raise RuntimeError("time budget expired before any candidate was evaluated")
        self.weights_ = self.search_result_.best_weights
        self.best_ndcg_ = self.search_result_.best_ndcg
        self.n_features_in_ = 4
        return self

    def predict(self, X):
        check_is_fitted(self, "weights_")
        X = check_factors(X)
        return score_block(np.array([self.weights_.units]), self.weights_.scale, X)[0]

    def rank(self, X):
        return order_by_score(self.predict(X))

    def score(self, X, y):
        y = check_relevance(y)
        return ndcg_from_gains(y[self.rank(X)], self.discount)
