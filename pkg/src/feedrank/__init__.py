"""Weighted-function ranking of app reviews.

Exhaustive weight search for the best NDCG, character-entropy features, and
country-bias auditing with reweighing.
"""
from .fairness import (
    GroupMetrics,
    OutcomeLabels,
    Reweighing,
    ReweighingWeights,
    detect_bias,
    favorable_labels,
    group_metrics,
    mitigate,
    mitigate_country,
    reweigh,
)
from .features import (
    FactorTable,
    Mode,
    ReviewFactorizer,
    build_factor_table,
    category_factor,
    score_factor,
    sentiment_factor,
    shannon_entropy,
)
from .ingestion import Category, Corpus, Review, join_annotations, load_reviews, load_sample
from .quality import dcg, ndcg, ndcg_from_gains
from .ranking import RankedList, WeightedRanker, WeightVector, rank, score
from .reporting import emit_report, entropy_by_country
from .search import (
    CostEstimate,
    ExhaustiveWeightSearch,
    SearchResult,
    enumerate_weights,
    estimate_cost,
    exhaustive_search,
)

__version__ = "0.1.0"

__all__ = [
    "Category", "CostEstimate", "Corpus", "ExhaustiveWeightSearch", "FactorTable",
    "GroupMetrics", "Mode", "OutcomeLabels", "RankedList", "Review", "ReviewFactorizer",
    "Reweighing", "ReweighingWeights", "SearchResult", "WeightVector", "WeightedRanker",
    "build_factor_table", "category_factor", "dcg", "detect_bias", "emit_report",
    "entropy_by_country", "enumerate_weights", "estimate_cost", "exhaustive_search",
    "favorable_labels", "group_metrics", "join_annotations", "load_reviews", "load_sample",
    "mitigate", "mitigate_country", "ndcg", "ndcg_from_gains", "rank", "reweigh", "score",
    "score_factor", "sentiment_factor", "shannon_entropy",
]
