"""Brute-force reference implementations used to freeze expected values.

Nothing here imports feedrank; inputs are plain tuples and dicts.
"""
import itertools
import math


def entropy_histogram(text):
    """Shannon entropy in bits from an explicit frequency table."""
    hist = {}
    for ch in text:
        hist[ch] = hist.get(ch, 0) + 1
    n = len(text)
    total = 0.0
    for count in hist.values():
        p = count / n
        total += p * math.log2(p)
    return -total if total else 0.0


def dcg_loop(gains, shifted=False):
    total = 0.0
    for i, g in enumerate(gains, start=1):
        if shifted:
            total += g / math.log2(i + 1)
        elif i == 1:
            total += g
        else:
            total += g / math.log2(i)
    return total


def ndcg_loop(gains, shifted=False):
    ideal = dcg_loop(sorted(gains, reverse=True), shifted)
    if ideal == 0:
        return 1.0
    return dcg_loop(gains, shifted) / ideal


CATEGORY = {"bug": 1.0, "feature_request": 0.5, "other": 0.0}


def naive_factors(rows, mode):
    """rows: dicts with id, text, category, sentiment, stars. Returns {id: (f1, f2, f3, f4)}."""
    if mode == "entropy":
        raw = {r["id"]: entropy_histogram(r["text"]) for r in rows}
    else:
        raw = {r["id"]: float(len(r["text"])) for r in rows}
    top = max(raw.values())
    return {
        r["id"]: (CATEGORY[r["category"]], 1 / (r["sentiment"] + 3), 1 / r["stars"], raw[r["id"]] / top)
        for r in rows
    }


def naive_search(factors, relevance, precision):
    """Scan the full (10^p + 1)^4 grid, keep weight vectors summing to one.

    Returns (units, ndcg, n_solutions). The first strictly better vector in
    grid order wins, i.e. the lexicographically smallest maximiser.
    """
    scale = 10**precision
    best_units, best, count = None, -1.0, 0
    ids = sorted(factors)
    for units in itertools.product(range(scale + 1), repeat=4):
        if sum(units) != scale:
            continue
        count += 1
        w = [u / scale for u in units]
        scored = []
        for rid in ids:
            f = factors[rid]
            s = w[0] * f[0] + w[1] * f[1] + w[2] * f[2] + w[3] * f[3]
            scored.append((-s, rid))
        scored.sort()
        value = ndcg_loop([relevance[rid] for _, rid in scored])
        if value > best:
            best, best_units = value, units
    return best_units, best, count


def rates(groups, favorable, country):
    """(P(fav | country), P(fav | others)) by direct counting."""
    in_g = [f for g, f in zip(groups, favorable) if g == country]
    out_g = [f for g, f in zip(groups, favorable) if g != country]
    return sum(in_g) / len(in_g), sum(out_g) / len(out_g)
