import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from feedrank.ingestion import Category, Corpus, Review, load_sample  # noqa: E402

_ACCEPTANCE = []


def make_review(id, country="X", text="some text", category="other", sentiment=0, stars=3,
                relevance=None, app="app"):
    return Review(id=id, country=country, app=app, text=text, category=Category.parse(category),
                  sentiment=sentiment, stars=stars, relevance=relevance)


@pytest.fixture(scope="session")
def sample_corpus():
    return load_sample()


TEN_ROWS = [
    # id, country, text, category, sentiment, stars, relevance
    ("r01", "AU", "Crashes on launch every single time, reinstalling did not help", "bug", -2, 1, 3),
    ("r02", "AU", "love it", "other", 2, 5, 0),
    ("r03", "CA", "Please add dark mode and an export to CSV option", "feature_request", 0, 4, 2),
    ("r04", "CA", "ok", "other", 1, 4, 0),
    ("r05", "HK", "Login broken after update, error 502 shown", "bug", -1, 2, 3),
    ("r06", "HK", "Would be nice to schedule messages", "feature_request", 1, 3, 1),
    ("r07", "IN", "Sync fails; notes vanish. Fix ASAP!!", "bug", -2, 1, 2),
    ("r08", "IN", "great great great", "other", 2, 5, 0),
    ("r09", "SG", "Widgets please, and landscape on iPad too", "feature_request", 0, 3, 1),
    ("r10", "SG", "Battery drain since 4.2 - phone gets hot quickly", "bug", -1, 2, 2),
]


@pytest.fixture
def ten_rows():
    return [dict(id=r[0], country=r[1], text=r[2], category=r[3], sentiment=r[4], stars=r[5],
                 relevance=r[6]) for r in TEN_ROWS]


@pytest.fixture
def ten_corpus(ten_rows):
    return Corpus(tuple(make_review(r["id"], **{k: v for k, v in r.items() if k != "id"})
                        for r in ten_rows))


# A ranking in which country A holds four of the six favorable slots. Scores are
# chosen so that reweighing A against the rest yields two favorable slots per
# country. Relevance is non-increasing along the original order, so that order
# is NDCG-optimal.
BIASED = [
    # id, country, score, relevance
    ("A1", "A", 0.95, 3), ("A2", "A", 0.90, 3), ("A3", "A", 0.88, 3), ("A4", "A", 0.86, 3),
    ("B1", "B", 0.84, 2), ("C1", "C", 0.83, 2), ("B2", "B", 0.70, 1), ("C2", "C", 0.69, 1),
    ("B3", "B", 0.55, 1), ("C3", "C", 0.54, 1), ("A5", "A", 0.30, 0), ("B4", "B", 0.20, 0),
    ("C4", "C", 0.19, 0), ("B5", "B", 0.10, 0), ("C5", "C", 0.09, 0),
]


@pytest.fixture
def biased():
    from feedrank.ranking import RankedList
    corpus = Corpus(tuple(make_review(rid, country=c, relevance=rel) for rid, c, _, rel in BIASED))
    ranked = RankedList.from_scores({rid: s for rid, _, s, _ in BIASED})
    return corpus, ranked


# acceptance bookkeeping: one line per criterion in the terminal summary

@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is not None and (rep.when == "call" or (rep.when == "setup" and rep.failed)):
        _ACCEPTANCE.append((marker.args[0], marker.args[1], item.name, rep.passed))


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    by_number = {}
    for number, title, name, passed in _ACCEPTANCE:
        ok, _, names = by_number.get(number, (True, title, []))
        by_number[number] = (ok and passed, title, names + [name])
    for number in sorted(by_number):
        ok, title, names = by_number[number]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {number:>2}. {title}  ({len(names)} checks)")
