"""Plot-ready statistics and the consolidated JSON run report."""
from __future__ import annotations

import json
import os
from collections import defaultdict
from typing import Optional

from .fairness import GroupMetrics, MitigationOutcome
from .features import FactorTable, shannon_entropy
from .ingestion import Corpus, fmt_float, write_rows
from .ranking import RankedList
from .search import SearchResult

SCHEMA_VERSION = 1
ENTROPY_HEADER = ("country", "n", "mean", "max", "min")


def entropy_by_country(corpus: Corpus) -> list[tuple[str, int, float, float, float]]:
    """Rows of (country, n, mean, max, min) entropy in bits, countries sorted."""
    groups = defaultdict(list)
    for r in corpus:
        groups[r.country].append(shannon_entropy(r.text))
    rows = []
    for country in sorted(groups):
        h = groups[country]
        rows.append((country, len(h), sum(h) / len(h), max(h), min(h)))
    return rows


def _metrics_rows(metrics: list[GroupMetrics], stage: str):
    for m in metrics:
        yield (stage, m.country, float(m.disparate_impact), m.bias_d,
               float(m.statistical_parity), m.bias_s, m.warning or "")


AUDIT_HEADER = ("labels", "country", "disparate_impact", "bias_d",
                "statistical_parity", "bias_s", "warning")


def write_audit(audit: dict[str, list[GroupMetrics]], json_path, csv_path) -> None:
    rows = [r for stage, ms in audit.items() for r in _metrics_rows(ms, stage)]
    write_rows(csv_path, AUDIT_HEADER, rows)
    with open(json_path, "w", encoding="utf-8") as fh:
        json.dump(jsonable({k: [m.to_dict() for m in v] for k, v in audit.items()}),
                  fh, indent=2, sort_keys=True)


def _json_float(x):
    # JSON has no inf/nan; keep them readable instead of emitting invalid tokens
    if isinstance(x, float) and (x != x or x in (float("inf"), float("-inf"))):
        return fmt_float(x)
    return x


def jsonable(obj):
    """Replace inf/nan floats so the result is strict JSON."""
    if isinstance(obj, dict):
        return {k: jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    return _json_float(obj)


def emit_report(out_dir, *, config: dict, corpus: Optional[Corpus] = None,
                factors: Optional[FactorTable] = None, search: Optional[SearchResult] = None,
                ranking: Optional[RankedList] = None,
                audit: Optional[dict[str, list[GroupMetrics]]] = None,
                mitigations: Optional[list[MitigationOutcome]] = None,
                ndcg_value: Optional[float] = None) -> dict[str, int]:
    """Write every available artifact plus ``report.json`` into ``out_dir``.

    ``audit`` maps a label source (e.g. "annotated", "computed") to its
    per-country metrics. Returns the manifest: file name -> size in bytes,
    which is also embedded in the report. Timing is left out so that the
    report depends only on the inputs and configuration.
    """
    os.makedirs(out_dir, exist_ok=True)
    written = []

    def path(name):
        written.append(name)
        return os.path.join(out_dir, name)

    if ranking is not None:
        ranking.to_csv(path("ranking.csv"))
    if factors is not None:
        factors.to_csv(path("factors.csv"))
    if corpus is not None:
        write_rows(path("entropy_by_country.csv"), ENTROPY_HEADER, entropy_by_country(corpus))
    if audit:
        write_audit(audit, path("audit.json"), path("audit.csv"))
    for m in mitigations or []:
        m.ranking.to_csv(path(f"mitigated_{_slug(m.country)}.csv"))

    manifest = {name: os.path.getsize(os.path.join(out_dir, name)) for name in written}
    report = {
        "schema_version": SCHEMA_VERSION,
        "configuration": config,
        "search": search.to_dict(timing=False) if search is not None else None,
        "ndcg": ndcg_value,
        "fairness": {
            "audit": {k: [m.to_dict() for m in v] for k, v in (audit or {}).items()},
            "mitigations": [m.to_dict() for m in mitigations or []],
        },
        "manifest": manifest,
    }
    with open(os.path.join(out_dir, "report.json"), "w", encoding="utf-8") as fh:
        json.dump(jsonable(report), fh, indent=2, sort_keys=True)
    return manifest


def _slug(label: str) -> str:
    return "".join(c.lower() if c.isalnum() else "_" for c in label).strip("_")
