"""Regenerate the bundled synthetic sample corpus.

    python tools/make_sample.py

Writes src/feedrank/data/sample_reviews.csv (full text, no relevance) and
sample_annotations.csv (relevance, no text). Deterministic for a given seed.
"""
import os
import random
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from feedrank.features import shannon_entropy  # noqa: E402
from feedrank.ingestion import Category, Corpus, Review, write_reviews  # noqa: E402

SEED = 20170501
PER_COUNTRY = 20
COUNTRIES = ["Australia", "Canada", "Hong Kong", "India", "Singapore",
             "South Africa", "United Kingdom", "United States"]
APPS = ["Mailbox", "PhotoLab", "TransitNow", "FitTrack", "NoteCloud", "ChatterBox", "BankEasy"]

BUG = [
    "the app crashes every time I open the camera",
    "login fails after the latest update with error 502",
    "sync stopped working and my notes disappeared",
    "it freezes on the splash screen on my iPhone 7",
    "notifications arrive twice or not at all",
    "uploading a photo hangs at 99 percent",
    "the map screen goes blank when I rotate the phone",
    "battery drains fast since version 4.2",
    "payments get stuck pending for hours",
    "the search button does nothing on iOS 10.3",
]
FEATURE = [
    "please add a dark mode",
    "it would be great to export data as CSV",
    "I wish I could schedule messages",
    "could you support landscape mode on iPad",
    "an offline mode would help a lot",
    "add the option to hide read items",
    "widgets for the home screen would be nice",
    "let us pick a custom notification sound",
]
OTHER = [
    "great app", "love it", "works fine for me", "five stars", "very useful",
    "nice design and easy to use", "best app ever", "ok", "does the job",
    "good value", "recommended to all my friends",
]
DETAIL = [
    "I already reinstalled it twice", "support never answered my email",
    "this happens on wifi and on 4G", "my friends see the same problem",
    "it worked perfectly last month", "steps: open, tap profile, scroll down",
    "I use it daily for work", "version 4.2.1, iPhone 6s, iOS 10.3.2",
    "really frustrating when commuting", "thanks for the quick fixes so far",
    "the previous release was much better", "would pay for a premium tier",
]
AUSSIE = ["mate", "arvo", "heaps", "reckon", "brekkie", "servo", "no worries"]

# per-country tendencies: (p_bug, p_feature, extra detail sentences)
PROFILE = {
    "Australia": (0.35, 0.30, 3),
    "Canada": (0.30, 0.30, 1),
    "Hong Kong": (0.50, 0.20, 1),
    "India": (0.55, 0.20, 1),
    "Singapore": (0.40, 0.30, 2),
    "South Africa": (0.30, 0.25, 1),
    "United Kingdom": (0.30, 0.30, 1),
    "United States": (0.30, 0.30, 1),
}


def make_text(rng, category, country):
    _, _, extra = PROFILE[country]
    if category is Category.BUG_REPORT:
        parts = [rng.choice(BUG)]
    elif category is Category.FEATURE_REQUEST:
        parts = [rng.choice(FEATURE)]
    else:
        parts = [rng.choice(OTHER)]
    if category is not Category.OTHER or rng.random() < 0.3:
        parts += rng.sample(DETAIL, rng.randint(0, extra))
    if country == "Australia" and rng.random() < 0.7:
        parts.append(" ".join(rng.sample(AUSSIE, 2)))
    text = ". ".join(p[0].upper() + p[1:] for p in parts) + rng.choice([".", "!", "!!", "..."])
    return text


def main(out_dir):
    rng = random.Random(SEED)
    reviews = []
    for country in COUNTRIES:
        p_bug, p_feat, _ = PROFILE[country]
        for j in range(PER_COUNTRY):
            u = rng.random()
            if u < p_bug:
                cat = Category.BUG_REPORT
            elif u < p_bug + p_feat:
                cat = Category.FEATURE_REQUEST
            else:
                cat = Category.OTHER
            if cat is Category.BUG_REPORT:
                stars = rng.choice([1, 1, 2, 2, 3])
                sentiment = rng.choice([-2, -2, -1, -1, 0])
            elif cat is Category.FEATURE_REQUEST:
                stars = rng.choice([2, 3, 4, 4, 5])
                sentiment = rng.choice([-1, 0, 0, 1, 1])
            else:
                stars = rng.choice([3, 4, 5, 5, 5])
                sentiment = rng.choice([0, 1, 1, 2, 2])
            code = "".join(w[0] for w in country.split()).upper()
            reviews.append(dict(
                id=f"{code}-{j + 1:02d}", country=country, app=rng.choice(APPS),
                text=make_text(rng, cat, country), category=cat,
                sentiment=sentiment, stars=stars,
            ))

    # expert relevance: a noisy view of how actionable and informative a review is
    h_max = max(shannon_entropy(r["text"]) for r in reviews)
    for r in reviews:
        cat = {Category.BUG_REPORT: 1.0, Category.FEATURE_REQUEST: 0.5, Category.OTHER: 0.0}[r["category"]]
        r["latent"] = (0.45 * cat + 0.15 / (r["sentiment"] + 3) + 0.05 / r["stars"]
                       + 0.35 * shannon_entropy(r["text"]) / h_max + rng.gauss(0, 0.06))
    # quartiles of the latent score become grades 0..3
    for i, r in enumerate(sorted(reviews, key=lambda r: r["latent"])):
        r["relevance"] = 4 * i // len(reviews)
    for r in reviews:
        del r["latent"]

    full = Corpus(tuple(Review(**{**r, "relevance": None}) for r in reviews))
    ann = Corpus(tuple(Review(**{**r, "text": ""}) for r in reviews))
    write_reviews(full, os.path.join(out_dir, "sample_reviews.csv"))
    write_reviews(ann, os.path.join(out_dir, "sample_annotations.csv"))
    hist = [sum(r["relevance"] == g for r in reviews) for g in range(4)]
    print(f"wrote {len(reviews)} reviews; relevance histogram {hist}")


if __name__ == "__main__":
    main(os.path.join(os.path.dirname(__file__), "..", "src", "feedrank", "data"))
