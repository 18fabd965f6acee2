"""Loading, joining and validating review corpora stored as CSV."""
from __future__ import annotations

import csv
import enum
import os
from dataclasses import dataclass, field, replace
from typing import Iterable, Optional, Sequence

HEADER = ("id", "country", "app", "text", "category", "sentiment", "stars", "relevance")


class SchemaError(ValueError):
    """A CSV row violates the review schema."""

    def __init__(self, message: str, row: Optional[int] = None, column: Optional[str] = None):
        self.row = row
        self.column = column
        where = []
        if row is not None:
            where.append(f"row {row}")
        if column is not None:
            where.append(f"column {column}")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)


class JoinError(ValueError):
    """Annotations cannot be matched against the full corpus."""


class Category(enum.Enum):
    BUG_REPORT = "bug"
    FEATURE_REQUEST = "feature_request"
    OTHER = "other"

    @classmethod
    def parse(cls, value: str) -> "Category":
        return cls(value.strip().lower())


@dataclass(frozen=True)
class Review:
    id: str
    country: str
    app: str
    text: str
    category: Category
    sentiment: int
    stars: int
    relevance: Optional[int] = None

    def __post_init__(self):
        if not self.id:
            raise ValueError("review id must be non-empty")
        if not isinstance(self.category, Category):
            object.__setattr__(self, "category", Category.parse(self.category))
        if self.sentiment not in range(-2, 3):
            raise ValueError(f"sentiment must be in [-2, 2], got {self.sentiment}")
        if self.stars not in range(1, 6):
            raise ValueError(f"stars must be in [1, 5], got {self.stars}")
        if self.relevance is not None and self.relevance not in range(0, 4):
            raise ValueError(f"relevance must be in [0, 3], got {self.relevance}")

    @property
    def degenerate(self) -> bool:
        return self.text == ""


@dataclass(frozen=True)
class Corpus:
    reviews: tuple[Review, ...]
    countries: frozenset[str] = field(default=frozenset())

    def __post_init__(self):
        reviews = tuple(self.reviews)
        if not reviews:
            raise ValueError("corpus must contain at least one review")
        seen = set()
        for r in reviews:
            if r.id in seen:
                raise ValueError(f"duplicate review id {r.id!r}")
            seen.add(r.id)
        object.__setattr__(self, "reviews", reviews)
        object.__setattr__(self, "countries", frozenset(r.country for r in reviews))

    def __len__(self) -> int:
        return len(self.reviews)

    def __iter__(self):
        return iter(self.reviews)

    @property
    def ids(self) -> list[str]:
        return [r.id for r in self.reviews]

    def by_id(self) -> dict[str, Review]:
        return {r.id: r for r in self.reviews}

    def relevance(self) -> dict[str, int]:
        """Map of id to annotated relevance; raises if any review lacks one."""
        missing = [r.id for r in self.reviews if r.relevance is None]
        if missing:
            raise ValueError(f"reviews without relevance annotation: {missing[:5]}")
        return {r.id: r.relevance for r in self.reviews}

    @property
    def degenerate_ids(self) -> list[str]:
        return [r.id for r in self.reviews if r.degenerate]


def _parse_int(raw: str, row: int, column: str, low: int, high: int) -> int:
    try:
        value = int(raw.strip())
    except ValueError:
        raise SchemaError(f"expected an integer, got {raw!r}", row, column) from None
    if not low <= value <= high:
        raise SchemaError(f"value {value} outside [{low}, {high}]", row, column)
    return value


def parse_row(record: dict, row: int) -> Review:
    """Build a Review from one csv.DictReader record; ``row`` is 1-based over data rows."""
    for col in ("id", "country", "app", "category", "sentiment", "stars"):
        if record.get(col) is None or record[col].strip() == "":
            raise SchemaError("missing value", row, col)
    try:
        category = Category.parse(record["category"])
    except ValueError:
        raise SchemaError(f"unknown category {record['category']!r}", row, "category") from None
    rel_raw = (record.get("relevance") or "").strip()
    return Review(
        id=record["id"].strip(),
        country=record["country"].strip(),
        app=record["app"].strip(),
        text=record.get("text") or "",
        category=category,
        sentiment=_parse_int(record["sentiment"], row, "sentiment", -2, 2),
        stars=_parse_int(record["stars"], row, "stars", 1, 5),
        relevance=_parse_int(rel_raw, row, "relevance", 0, 3) if rel_raw else None,
    )


def load_reviews(path: str | os.PathLike, format: str = "reviews-v1") -> Corpus:
    """Read a review CSV with the fixed eight-column header.

    Row order is preserved. Schema violations raise :class:`SchemaError`
    naming the 1-based data row and the offending column.
    """
    if format != "reviews-v1":
        raise ValueError(f"unsupported csv schema {format!r}")
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise SchemaError("empty file")
        missing = [c for c in HEADER if c not in reader.fieldnames]
        if missing:
            raise SchemaError(f"header lacks columns {missing}")
        reviews = []
        seen: dict[str, int] = {}
        for row, record in enumerate(reader, start=1):
            review = parse_row(record, row)
            if review.id in seen:
                raise SchemaError(
                    f"duplicate id {review.id!r} (first seen on row {seen[review.id]})", row, "id"
                )
            seen[review.id] = row
            reviews.append(review)
    if not reviews:
        raise SchemaError("no data rows")
    return Corpus(tuple(reviews))


def write_reviews(corpus: Corpus | Iterable[Review], path: str | os.PathLike) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(HEADER)
        for r in corpus:
            writer.writerow([
                r.id, r.country, r.app, r.text, r.category.value,
                r.sentiment, r.stars, "" if r.relevance is None else r.relevance,
            ])


_SHARED_FIELDS = ("country", "app", "category", "sentiment", "stars")


def join_annotations(annotations: Corpus, full: Corpus) -> Corpus:
    """Attach full review text to annotated reviews.

    The result has exactly the annotation rows, in annotation order. Fields
    present in both sources must agree.
    """
    lookup = full.by_id()
    joined = []
    for ann in annotations:
        src = lookup.get(ann.id)
        if src is None:
            raise JoinError(f"annotation id {ann.id!r} not found in review corpus")
        for name in _SHARED_FIELDS:
            if getattr(ann, name) != getattr(src, name):
                raise JoinError(
                    f"id {ann.id!r}: conflicting {name} "
                    f"({getattr(ann, name)!r} vs {getattr(src, name)!r})"
                )
        if ann.text and ann.text != src.text:
            raise JoinError(f"id {ann.id!r}: conflicting text")
        relevance = ann.relevance
        if relevance is None:
            relevance = src.relevance
        elif src.relevance is not None and src.relevance != relevance:
            raise JoinError(f"id {ann.id!r}: conflicting relevance ({relevance} vs {src.relevance})")
        joined.append(replace(src, relevance=relevance))
    return Corpus(tuple(joined))


def load_corpus(reviews: str | os.PathLike | None = None,
                annotations: str | os.PathLike | None = None) -> Corpus:
    """Load the working corpus from the CLI's --reviews/--annotations pair.

    With neither path, the bundled 160-review sample is used.
    """
    if reviews is None and annotations is None:
        reviews, annotations = sample_paths()
    if reviews is None:
        return load_reviews(annotations)
    full = load_reviews(reviews)
    if annotations is None:
        return full
    return join_annotations(load_reviews(annotations), full)


def sample_paths() -> tuple[str, str]:
    """Paths of the bundled synthetic sample (reviews, annotations)."""
    here = os.path.join(os.path.dirname(__file__), "data")
    return (os.path.join(here, "sample_reviews.csv"),
            os.path.join(here, "sample_annotations.csv"))


def load_sample() -> Corpus:
    return load_corpus(*sample_paths())


# ranking and factor CSVs emitted by the pipeline

RANKING_HEADER = ("position", "id", "score")
FACTOR_HEADER = ("id", "f1", "f2", "f3", "f4", "mode")


def fmt_float(x: float) -> str:
    return format(float(x), ".17g")


def load_ranking(path: str | os.PathLike) -> list[tuple[int, str, float]]:
    """Read a ranking CSV into ``(position, id, score)`` tuples."""
    entries = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or any(c not in reader.fieldnames for c in RANKING_HEADER):
            raise SchemaError(f"ranking header must be {','.join(RANKING_HEADER)}")
        for row, rec in enumerate(reader, start=1):
            try:
                entries.append((int(rec["position"]), rec["id"], float(rec["score"])))
            except (TypeError, ValueError) as exc:
                raise SchemaError(str(exc), row) from None
    positions = [e[0] for e in entries]
    if positions != list(range(1, len(entries) + 1)):
        raise SchemaError("positions must run 1..n without gaps")
    return entries


def load_factors(path: str | os.PathLike) -> list[tuple[str, float, float, float, float, str]]:
    rows = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or any(c not in reader.fieldnames for c in FACTOR_HEADER):
            raise SchemaError(f"factor header must be {','.join(FACTOR_HEADER)}")
        for row, rec in enumerate(reader, start=1):
            try:
                rows.append((rec["id"], float(rec["f1"]), float(rec["f2"]),
                             float(rec["f3"]), float(rec["f4"]), rec["mode"]))
            except (TypeError, ValueError) as exc:
                raise SchemaError(str(exc), row) from None
    return rows


def write_rows(path: str | os.PathLike, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for r in rows:
            writer.writerow([fmt_float(v) if isinstance(v, float) else v for v in r])
