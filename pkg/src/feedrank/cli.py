"""Command line interface: ``feedrank <command>``."""
from __future__ import annotations

import json
import os
import sys

import click

from . import fairness
from .features import Mode, build_factor_table
from .ingestion import fmt_float, load_corpus, load_ranking, load_reviews
from .quality import DISCOUNTS, ndcg
from .ranking import RankedList, WeightVector, rank
from .reporting import emit_report, entropy_by_country, jsonable, write_audit
from .search import estimate_cost, exhaustive_search

MODES = click.Choice([m.value for m in Mode], case_sensitive=False)


class Context:
    def __init__(self, reviews, annotations, out_dir, dump_factors):
        self.reviews = reviews
        self.annotations = annotations
        self.out_dir = out_dir
        self.dump_factors = dump_factors
        self._corpus = None

    @property
    def corpus(self):
        if self._corpus is None:
            self._corpus = load_corpus(self.reviews, self.annotations)
        return self._corpus

    def factors(self, mode):
        table = build_factor_table(self.corpus, mode)
        if self.dump_factors:
            table.to_csv(self.dump_factors)
        return table

    def out_path(self, name):
        os.makedirs(self.out_dir, exist_ok=True)
        return os.path.join(self.out_dir, name)


def _echo_json(obj):
    click.echo(json.dumps(jsonable(obj), indent=2, sort_keys=True, default=str))


def _ranked_from_csv(path) -> RankedList:
    return RankedList(tuple((rid, s, pos) for pos, rid, s in load_ranking(path)))


def _parse_units(text):
    try:
        units = tuple(int(u) for u in text.split(","))
    except ValueError:
        raise click.BadParameter("expected four comma-separated integers") from None
    if len(units) != 4:
        raise click.BadParameter("expected four comma-separated integers")
    return units


@click.group()
@click.option("--reviews", type=click.Path(exists=True, dir_okay=False),
              help="Review CSV with full text. Defaults to the bundled sample.")
@click.option("--annotations", type=click.Path(exists=True, dir_okay=False),
              help="Annotation CSV carrying relevance, joined onto --reviews by id.")
@click.option("--out-dir", envvar="FEEDRANK_OUT", default="feedrank_out", show_default=True,
              help="Directory for written artifacts (env: FEEDRANK_OUT).")
@click.option("--dump-factors", type=click.Path(dir_okay=False),
              help="Also write the factor table as CSV to this path.")
@click.pass_context
def cli(ctx, reviews, annotations, out_dir, dump_factors):
    """Rank app reviews with a weighted function and audit country bias."""
    ctx.obj = Context(reviews, annotations, out_dir, dump_factors)


@cli.command("rank")
@click.option("--weights", "units", required=True, help="Integer units u1,u2,u3,u4 summing to --scale.")
@click.option("--scale", default=100, show_default=True, type=int)
@click.option("--mode", default="entropy", type=MODES, show_default=True)
@click.option("--output", type=click.Path(dir_okay=False), help="Write CSV here instead of stdout.")
@click.pass_obj
def rank_cmd(obj, units, scale, mode, output):
    """Rank the corpus with fixed weights; prints position,id,score CSV."""
    try:
        weights = WeightVector(_parse_units(units), scale)
    except ValueError as exc:
        raise click.BadParameter(str(exc), param_hint="--weights") from None
    ranked = rank(weights, obj.factors(mode))
    if output:
        ranked.to_csv(output)
        return
    click.echo("position,id,score")
    for rid, s, pos in ranked.entries:
        click.echo(f"{pos},{rid},{fmt_float(s)}")


@cli.command("ndcg")
@click.option("--ranking", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--annotations", "ann_path", type=click.Path(exists=True, dir_okay=False),
              help="Annotation CSV; defaults to the global corpus.")
@click.option("--discount", type=click.Choice(DISCOUNTS), default="classic", show_default=True)
@click.pass_obj
def ndcg_cmd(obj, ranking, ann_path, discount):
    """Print the NDCG of a ranking CSV with 17 significant digits."""
    annotations = load_reviews(ann_path) if ann_path else obj.corpus
    click.echo(fmt_float(ndcg(_ranked_from_csv(ranking), annotations, discount)))


@cli.command("search")
@click.option("--precision", default=1, show_default=True, type=int, help="Decimal digits per weight.")
@click.option("--mode", default="entropy", type=MODES, show_default=True)
@click.option("--threads", default=1, show_default=True, type=int)
@click.option("--force", is_flag=True, help="Allow precision >= 3.")
@click.option("--time-budget", type=float, help="Seconds; required with --force.")
@click.option("--log-all", type=click.Path(dir_okay=False), help="Write every candidate's NDCG as CSV.")
@click.option("--estimate", "estimate_to", type=int, help="Also project cost for this precision.")
@click.option("--discount", type=click.Choice(DISCOUNTS), default="classic", show_default=True)
@click.pass_obj
def search_cmd(obj, precision, mode, threads, force, time_budget, log_all, estimate_to, discount):
    """Exhaustively search the weight grid; prints the result as JSON."""
    try:
        result = exhaustive_search(obj.factors(mode), obj.corpus, precision, n_jobs=threads,
                                   force=force, time_budget=time_budget, log_path=log_all,
                                   discount=discount)
    except ValueError as exc:
        raise click.UsageError(str(exc)) from None
    out = result.to_dict()
    if estimate_to is not None:
        out["estimate"] = estimate_cost(result, estimate_to).to_dict()
    _echo_json(out)


@cli.command("audit")
@click.option("--ranking", type=click.Path(exists=True, dir_okay=False),
              help="Ranking CSV to audit; the annotated ranking is always audited too.")
@click.option("--annotations", "ann_path", type=click.Path(exists=True, dir_okay=False))
@click.pass_obj
def audit_cmd(obj, ranking, ann_path):
    """Per-country disparate impact and statistical parity, as JSON (and CSV in --out-dir)."""
    annotations = load_reviews(ann_path) if ann_path else obj.corpus
    audit = {"annotated": fairness.detect_bias(fairness.favorable_labels(annotations))}
    if ranking:
        labels = fairness.favorable_labels(_ranked_from_csv(ranking), annotations)
        audit["computed"] = fairness.detect_bias(labels)
    write_audit(audit, obj.out_path("audit.json"), obj.out_path("audit.csv"))
    _echo_json({k: [m.to_dict() for m in v] for k, v in audit.items()})


@cli.command("mitigate")
@click.option("--country", required=True)
@click.option("--ranking", type=click.Path(exists=True, dir_okay=False),
              help="Ranking CSV; otherwise the corpus is ranked with --weights.")
@click.option("--weights", "units", default="27,18,3,52", show_default=True)
@click.option("--scale", default=100, show_default=True, type=int)
@click.option("--mode", default="entropy", type=MODES, show_default=True)
@click.pass_obj
def mitigate_cmd(obj, country, ranking, units, scale, mode):
    """Reweigh one country against the rest and re-rank."""
    if ranking:
        ranked = _ranked_from_csv(ranking)
    else:
        ranked = rank(WeightVector(_parse_units(units), scale), obj.factors(mode))
    if country not in obj.corpus.countries:
        raise click.BadParameter(f"unknown country {country!r}", param_hint="--country")
    outcome = fairness.mitigate_country(ranked, obj.corpus, country)
    path = obj.out_path(f"mitigated_{country.lower().replace(' ', '_')}.csv")
    outcome.ranking.to_csv(path)
    summary = outcome.to_dict()
    summary["ranking_csv"] = path
    summary["ndcg_before_text"] = fmt_float(outcome.ndcg_before)
    summary["ndcg_after_text"] = fmt_float(outcome.ndcg_after)
    _echo_json(summary)


@cli.command("stats")
@click.option("--out", "out", type=click.Path(file_okay=False), help="Overrides --out-dir.")
@click.option("--mode", default="entropy", type=MODES, show_default=True)
@click.pass_obj
def stats_cmd(obj, out, mode):
    """Entropy by country and the factor table, as plot-ready CSV."""
    out = out or obj.out_dir
    manifest = emit_report(out, config={"command": "stats", "mode": mode},
                           corpus=obj.corpus, factors=obj.factors(mode))
    for country, n, mean, hi, lo in entropy_by_country(obj.corpus):
        click.echo(f"{country:<16} n={n:<4} mean={mean:.4f} max={hi:.4f} min={lo:.4f}")
    click.echo(f"wrote {', '.join(sorted(manifest))} and report.json to {out}")


@cli.command("run")
@click.option("--precision", default=2, show_default=True, type=int)
@click.option("--mode", default="entropy", type=MODES, show_default=True)
@click.option("--threads", default=1, show_default=True, type=int)
@click.option("--mitigate/--no-mitigate", "do_mitigate", default=True, show_default=True,
              help="Reweigh every country flagged in the best ranking.")
@click.pass_obj
def run_cmd(obj, precision, mode, threads, do_mitigate):
    """Full pipeline: factors, search, ranking, audit, mitigation, report."""
    corpus = obj.corpus
    table = obj.factors(mode)
    try:
        result = exhaustive_search(table, corpus, precision, n_jobs=threads)
    except ValueError as exc:
        raise click.UsageError(str(exc)) from None
    ranked = rank(result.best_weights, table)
    audit = {
        "annotated": fairness.detect_bias(fairness.favorable_labels(corpus)),
        "computed": fairness.detect_bias(fairness.favorable_labels(ranked, corpus)),
    }
    mitigations = []
    if do_mitigate:
        mitigations = [fairness.mitigate_country(ranked, corpus, m.country)
                       for m in audit["computed"] if m.biased]
    config = {
        "command": "run", "mode": mode, "precision": precision,
        "di_threshold": fairness.DI_THRESHOLD, "sp_threshold": fairness.SP_THRESHOLD,
        "favorable_relevance": fairness.FAVORABLE_RELEVANCE,
        "reviews": obj.reviews, "annotations": obj.annotations,
    }
    manifest = emit_report(obj.out_dir, config=config, corpus=corpus, factors=table,
                           search=result, ranking=ranked, audit=audit,
                           mitigations=mitigations, ndcg_value=result.best_ndcg)
    click.echo(f"best weights {result.best_weights} ndcg {fmt_float(result.best_ndcg)} "
               f"({result.solutions_evaluated} candidates, {result.wall_time:.2f}s)")
    for m in audit["computed"]:
        if m.biased:
            click.echo(f"bias: {m.country} DI={m.disparate_impact:.4f} SP={m.statistical_parity:.4f}")
    for m in mitigations:
        click.echo(f"mitigated {m.country}: ndcg {fmt_float(m.ndcg_before)} -> {fmt_float(m.ndcg_after)}")
    click.echo(f"report: {os.path.join(obj.out_dir, 'report.json')} ({len(manifest)} artifacts)")


def main():  # pragma: no cover
    sys.exit(cli())
