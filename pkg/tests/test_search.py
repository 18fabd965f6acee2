import csv
import math

import numpy as np
import pytest
from sklearn.base import clone

from conftest import make_review
from feedrank.features import FactorTable, Mode, build_factor_table
from feedrank.ingestion import Corpus
from feedrank.quality import ndcg
from feedrank.ranking import WeightVector, rank
from feedrank.search import (
    ExhaustiveWeightSearch, SearchResult, enumerate_weights, estimate_cost, exhaustive_search,
    n_combinations, n_solutions, search_arrays, weight_blocks,
)
from oracles import naive_factors, naive_search


@pytest.mark.parametrize("p, count, grid", [(0, 4, 16), (1, 286, 14641)])
def test_enumeration_small(p, count, grid):
    vectors = list(enumerate_weights(p))
    assert len(vectors) == count == n_solutions(p)
    assert n_combinations(p) == grid
    assert len(set(vectors)) == count
    assert all(sum(v.units) == 10**p for v in vectors)
    assert [v.units for v in vectors] == sorted(v.units for v in vectors)


def test_enumeration_p0_exact():
    assert [v.units for v in enumerate_weights(0)] == [(0, 0, 0, 1), (0, 0, 1, 0), (0, 1, 0, 0), (1, 0, 0, 0)]


def test_blocks_match_generator():
    rows = np.concatenate(list(weight_blocks(1, block_size=7)))
    assert [tuple(r) for r in rows.tolist()] == [v.units for v in enumerate_weights(1)]


def test_guarded_precision():
    with pytest.raises(ValueError, match="force"):
        next(enumerate_weights(3))
    with pytest.raises(ValueError):
        next(enumerate_weights(10, force=True))
    assert next(enumerate_weights(3, force=True)).units == (0, 0, 0, 1000)


def test_dominance_construction():
    # one relevant review with factors (1, 0, 0, 0): category alone ranks it first
    reviews = [make_review("hit", category="bug", sentiment=2, stars=5, text="x", relevance=3)]
    reviews += [make_review(f"m{i}", category="other", sentiment=2, stars=5, text="x", relevance=0)
                for i in range(4)]
    corpus = Corpus(tuple(reviews))
    table = FactorTable(("hit", "m0", "m1", "m2", "m3"),
                        np.array([[1, 0, 0, 0]] + [[0, 0, 0, 0]] * 4, dtype=float), Mode.REVLEN, 1, 1.0)
    result = exhaustive_search(table, corpus, 1)
    assert result.best_ndcg == 1.0
    maximisers = [v for v in enumerate_weights(1) if ndcg(rank(v, table), corpus) == 1.0]
    assert WeightVector((10, 0, 0, 0), 10) in maximisers
    assert result.best_weights == min(maximisers)


@pytest.mark.parametrize("mode", ["entropy", "revlen"])
def test_matches_naive_oracle(ten_rows, ten_corpus, mode):
    factors = naive_factors(ten_rows, mode)
    relevance = {r["id"]: r["relevance"] for r in ten_rows}
    units, value, count = naive_search(factors, relevance, 1)
    result = exhaustive_search(build_factor_table(ten_corpus, mode), ten_corpus, 1)
    assert result.best_weights.units == units
    assert result.best_ndcg == value
    assert result.solutions_evaluated == count == 286


def test_best_ndcg_recomputes(sample_corpus):
    table = build_factor_table(sample_corpus, "revlen")
    result = exhaustive_search(table, sample_corpus, 1)
    assert ndcg(rank(result.best_weights, table), sample_corpus) == result.best_ndcg


@pytest.mark.parametrize("jobs", [2, 3, 8])
def test_parallel_identical(sample_corpus, jobs):
    table = build_factor_table(sample_corpus, "entropy")
    one = exhaustive_search(table, sample_corpus, 1)
    many = exhaustive_search(table, sample_corpus, 1, n_jobs=jobs)
    assert many.to_json(timing=False) == one.to_json(timing=False)


def test_tied_candidates_merge_lexicographically():
    # every weight vector gives the same ranking, so all 286 candidates tie
    X = np.full((3, 4), 0.5)
    y = [3, 1, 0]
    for jobs in (1, 4):
        r = search_arrays(X, y, 1, n_jobs=jobs)
        assert r.best_weights.units == (0, 0, 0, 10)


@pytest.mark.parametrize("mode", ["entropy", "revlen"])
def test_grid_refinement_never_hurts(sample_corpus, ten_corpus, mode):
    for corpus in (sample_corpus, ten_corpus):
        table = build_factor_table(corpus, mode)
        values = [exhaustive_search(table, corpus, p).best_ndcg for p in (0, 1)]
        assert values[1] >= values[0]


def test_missing_relevance(ten_corpus):
    table = build_factor_table(ten_corpus, "entropy")
    with pytest.raises(KeyError):
        exhaustive_search(table, {"r01": 3}, 0)


def test_time_budget_required_for_fine_grids(ten_corpus):
    table = build_factor_table(ten_corpus, "entropy")
    with pytest.raises(ValueError, match="force"):
        exhaustive_search(table, ten_corpus, 3)
    with pytest.raises(ValueError, match="budget"):
        exhaustive_search(table, ten_corpus, 3, force=True)


def test_budget_exhaustion_marks_partial(ten_corpus):
    table = build_factor_table(ten_corpus, "entropy")
    r = exhaustive_search(table, ten_corpus, 3, force=True, time_budget=0.2)
    assert r.partial
    assert 0 < r.solutions_evaluated < n_solutions(3)
    assert r.best_weights is not None and r.best_weights.scale == 1000
    assert r.to_dict()["partial"] is True


def test_zero_budget_gives_empty_partial(ten_corpus):
    table = build_factor_table(ten_corpus, "entropy")
    r = exhaustive_search(table, ten_corpus, 3, force=True, time_budget=0.0)
    assert r.partial and r.best_weights is None and math.isnan(r.best_ndcg)


def test_log_all(tmp_path, ten_corpus):
    table = build_factor_table(ten_corpus, "entropy")
    path = tmp_path / "log.csv"
    r = exhaustive_search(table, ten_corpus, 1, log_path=path, n_jobs=2)
    with open(path) as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 286
    assert r.log_bytes == path.stat().st_size
    best = max(rows, key=lambda row: float(row["ndcg"]))
    assert float(best["ndcg"]) == r.best_ndcg
    assert [int(rows[0][k]) for k in ("u1", "u2", "u3", "u4")] == [0, 0, 0, 10]


def measured(precision, solutions, seconds):
    return SearchResult(WeightVector((27, 18, 3, 52), 100), 0.98, solutions,
                        n_combinations(precision), seconds, Mode.ENTROPY, precision)


def test_estimate_closed_form_and_grid_ratio():
    est = estimate_cost(measured(2, 176851, 464.967), 3, measured_bytes=538.0e6)
    assert est.projected_solutions == 167_668_501 == math.comb(1003, 3)
    assert abs(est.grid_ratio_solutions - 1_706_311_567) <= 1
    # MB -> GB with a 1024 divisor reproduces the reported ~5069.12 GB
    assert est.grid_ratio_space / 1e6 / 1024 == pytest.approx(5069.12, abs=0.01)
    assert est.grid_ratio_time / 86400 == pytest.approx(52, abs=0.5)


def test_estimate_scales_linearly():
    est = estimate_cost(measured(1, 286, 60.0), 2)
    assert est.projected_time == pytest.approx(60.0 * 176851 / 286, rel=1e-15)
    assert est.projected_space is None
    with pytest.raises(ValueError):
        estimate_cost(measured(2, 176851, 1.0), 2)


def test_estimator_api(sample_corpus):
    table = build_factor_table(sample_corpus, "entropy")
    y = np.array([sample_corpus.relevance()[i] for i in table.ids])
    est = ExhaustiveWeightSearch(precision=1)
    assert clone(est).get_params()["precision"] == 1
    est.fit(table.values, y)
    assert est.weights_ == exhaustive_search(table, sample_corpus, 1).best_weights
    assert est.score(table.values, y) == est.best_ndcg_
    assert list(est.rank(table.values)) == [table.ids.index(i) for i in rank(est.weights_, table).ids]
