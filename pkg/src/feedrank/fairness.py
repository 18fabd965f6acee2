"""Country-bias metrics for rankings and reweighing-based mitigation.

A review's outcome is *favorable* when it lands in the high-priority part
of a ranking. For a candidate country ``g`` the remaining countries act as
the comparison group:

    disparate impact   = P(fav | others) / P(fav | g)
    statistical parity = P(fav | others) - P(fav | g)

so a favored country shows disparate impact below 1 and negative parity.
"""
from __future__ import annotations

import enum
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from sklearn.base import BaseEstimator

from .ingestion import Corpus
from .quality import ndcg
from .ranking import RankedList

DI_THRESHOLD = 0.8
SP_THRESHOLD = -0.1
FAVORABLE_RELEVANCE = 2
OTHERS = "<others>"


class Source(enum.Enum):
    ANNOTATED = "annotated"
    COMPUTED = "computed"


@dataclass(frozen=True)
class OutcomeLabels:
    ids: tuple[str, ...]
    groups: tuple[str, ...]
    favorable: tuple[bool, ...]
    source: Source

    def __post_init__(self):
        if not (len(self.ids) == len(self.groups) == len(self.favorable)):
            raise ValueError("ids, groups and favorable must have equal length")
        if not self.ids:
            raise ValueError("no outcome labels")
        if len(set(self.ids)) != len(self.ids):
            raise ValueError("each review must be labeled exactly once")

    def __len__(self):
        return len(self.ids)

    @property
    def n_favorable(self) -> int:
        return sum(self.favorable)

    def counts(self) -> Counter:
        """Occupancy of every (group, favorable) cell."""
        return Counter(zip(self.groups, self.favorable))

    def against(self, country: str) -> "OutcomeLabels":
        """Collapse every group other than ``country`` into one comparison group."""
        if country not in self.groups:
            raise ValueError(f"country {country!r} not present")
        groups = tuple(g if g == country else OTHERS for g in self.groups)
        return OutcomeLabels(self.ids, groups, self.favorable, self.source)


def annotated_labels(annotations: Corpus, threshold: int = FAVORABLE_RELEVANCE) -> OutcomeLabels:
    rel = annotations.relevance()
    return OutcomeLabels(
        ids=tuple(r.id for r in annotations),
        groups=tuple(r.country for r in annotations),
        favorable=tuple(rel[r.id] >= threshold for r in annotations),
        source=Source.ANNOTATED,
    )


def computed_labels(ranked: RankedList, annotations: Corpus, k: Optional[int] = None,
                    threshold: int = FAVORABLE_RELEVANCE) -> OutcomeLabels:
    """Top-``k`` of ``ranked`` is favorable.

    ``k`` defaults to the number of annotated favorable reviews so both
    labelings share a base rate.
    """
    if k is None:
        k = annotated_labels(annotations, threshold).n_favorable
    country = {r.id: r.country for r in annotations}
    missing = [rid for rid in ranked.ids if rid not in country]
    if missing:
        raise KeyError(f"ranked review {missing[0]!r} not found in annotations")
    return OutcomeLabels(
        ids=tuple(ranked.ids),
        groups=tuple(country[rid] for rid in ranked.ids),
        favorable=tuple(pos <= k for _, _, pos in ranked.entries),
        source=Source.COMPUTED,
    )


def favorable_labels(source: RankedList | Corpus, annotations: Optional[Corpus] = None,
                     threshold: int = FAVORABLE_RELEVANCE) -> OutcomeLabels:
    """Label annotated reviews (relevance >= threshold) or a computed ranking (matched top-K)."""
    if isinstance(source, Corpus):
        return annotated_labels(source, threshold)
    if annotations is None:
        raise ValueError("labeling a computed ranking needs the annotations to fix K")
    return computed_labels(source, annotations, threshold=threshold)


@dataclass(frozen=True)
class GroupMetrics:
    country: str
    disparate_impact: float
    statistical_parity: float
    bias_d: bool
    bias_s: bool
    warning: Optional[str] = None

    @property
    def biased(self) -> bool:
        return self.bias_d or self.bias_s

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def group_metrics(labels: OutcomeLabels, country: str) -> GroupMetrics:
    cells = labels.counts()
    n_g = cells[(country, True)] + cells[(country, False)]
    if n_g == 0:
        raise ValueError(f"country {country!r} has no labeled reviews")
    n_o = len(labels) - n_g
    if n_o == 0:
        raise ValueError("need at least two countries to compare")
    fav_g = cells[(country, True)]
    fav_o = labels.n_favorable - fav_g
    p_g, p_o = fav_g / n_g, fav_o / n_o
    sp = p_o - p_g
    warning = None
    if labels.n_favorable in (0, len(labels)):
        # nothing separates the groups; flags would be meaningless
        di = 1.0 if p_g == p_o else math.nan
        return GroupMetrics(country, di, sp, False, False,
                            warning="degenerate labels: all reviews share one outcome")
    if p_g == 0.0:
        di = math.inf
        warning = "no favorable outcomes in this country; disparate impact is infinite"
    else:
        di = p_o / p_g
    return GroupMetrics(country, di, sp, di < DI_THRESHOLD, sp < SP_THRESHOLD, warning)


def detect_bias(labels: OutcomeLabels) -> list[GroupMetrics]:
    countries = sorted(set(labels.groups))
    if len(countries) < 2:
        raise ValueError("bias detection needs at least two countries")
    return [group_metrics(labels, c) for c in countries]


@dataclass(frozen=True)
class ReweighingWeights:
    cells: dict  # (group, favorable) -> weight
    instance: dict  # review id -> weight


def reweigh(labels: OutcomeLabels, against: Optional[str] = None) -> ReweighingWeights:
    """Cell weights P(g) P(y) / P(g, y) that make group and outcome independent.

    With ``against`` set, groups are reduced to that country versus the rest.
    Unoccupied cells get no weight.
    """
    if against is not None:
        labels = labels.against(against)
    n = len(labels)
    cells = labels.counts()
    n_group = Counter(labels.groups)
    n_out = Counter(labels.favorable)
    weights = {
        (g, y): (n_group[g] * n_out[y]) / (n * c)  # (n_g/n)(n_y/n) / (c/n)
        for (g, y), c in cells.items()
    }
    instance = {rid: weights[(g, y)]
                for rid, g, y in zip(labels.ids, labels.groups, labels.favorable)}
    return ReweighingWeights(weights, instance)


def mitigate(ranked: RankedList, rw: ReweighingWeights) -> RankedList:
    """Multiply each review's score by its instance weight and re-rank."""
    scores = {}
    for rid, s, _ in ranked.entries:
        if rid not in rw.instance:
            raise KeyError(f"no reweighing weight for review {rid!r}")
        scores[rid] = s * rw.instance[rid]
    return RankedList.from_scores(scores, weights=ranked.weights, mode=ranked.mode, mitigated=True)


@dataclass(frozen=True)
class MitigationOutcome:
    country: str
    ranking: RankedList
    before: list[GroupMetrics]
    after: list[GroupMetrics]
    ndcg_before: float
    ndcg_after: float
    weights: ReweighingWeights = field(repr=False)

    def to_dict(self) -> dict:
        return {
            "country": self.country,
            "ndcg_before": self.ndcg_before,
            "ndcg_after": self.ndcg_after,
            "before": [m.to_dict() for m in self.before],
            "after": [m.to_dict() for m in self.after],
            "cell_weights": [
                {"group": g, "favorable": y, "weight": w}
                for (g, y), w in sorted(self.weights.cells.items())
            ],
        }


def mitigate_country(ranked: RankedList, annotations: Corpus, country: str,
                     threshold: int = FAVORABLE_RELEVANCE) -> MitigationOutcome:
    """Reweigh ``country`` against all others, re-rank, and re-audit the new ranking."""
    k = annotated_labels(annotations, threshold).n_favorable
    labels = computed_labels(ranked, annotations, k)
    rw = reweigh(labels, against=country)
    mitigated = mitigate(ranked, rw)
    return MitigationOutcome(
        country=country,
        ranking=mitigated,
        before=detect_bias(labels),
        after=detect_bias(computed_labels(mitigated, annotations, k)),
        ndcg_before=ndcg(ranked, annotations),
        ndcg_after=ndcg(mitigated, annotations),
        weights=rw,
    )


class Reweighing(BaseEstimator):
    """Reweighing as an estimator over group labels and binary outcomes.

    ``fit(groups, favorable)`` learns the cell weights; ``transform`` maps
    each sample to the weight of its (group, outcome) cell.
    """

    def __init__(self, against=None):
        self.against = against

    def _labels(self, groups, favorable):
        groups = [str(g) for g in np.asarray(groups).ravel()]
        favorable = [bool(f) for f in np.asarray(favorable).ravel()]
        if len(groups) != len(favorable):
            raise ValueError("groups and favorable must have the same length")
        ids = tuple(str(i) for i in range(len(groups)))
        return OutcomeLabels(ids, tuple(groups), tuple(favorable), Source.COMPUTED)

    def fit(self, groups, favorable):
        rw = reweigh(self._labels(groups, favorable), self.against)
        self.weights_ = rw.cells
        return self

    def transform(self, groups, favorable):
        labels = self._labels(groups, favorable)
        if self.against is not None:
            labels = labels.against(self.against)
        try:
            return np.array([self.weights_[(g, y)] for g, y in zip(labels.groups, labels.favorable)])
        except KeyError as exc:
            raise ValueError(f"cell {exc.args[0]} was not seen during fit") from None

    def fit_transform(self, groups, favorable):
        return self.fit(groups, favorable).transform(groups, favorable)
