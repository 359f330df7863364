#!/usr/bin/env python3
"""Regenerates data/fixture_500.jsonl deterministically.

The stub scorer counts hits from its fixed lexicon and scores min(1, hits/3),
so records built here with >= 3 lexicon words land at or above the 0.7
threshold and everything else stays below it.
"""

import json
import random
from datetime import datetime, timedelta, timezone
from pathlib import Path

# Keep in sync with StubScorer::lexicon().
LEXICON = [
    "awful", "clown", "corrupt", "creep", "disgusting", "dumb", "evil", "filthy",
    "fool", "fraud", "garbage", "gross", "hate", "horrible", "idiot", "idiots",
    "lame", "liar", "loser", "moron", "nasty", "pathetic", "scum", "stupid",
    "terrible", "toxic", "trash", "vile", "worst", "wretched",
]

THEMES = {
    "disease": ["outbreak", "virus", "symptoms", "infection", "quarantine", "rash",
                "fever", "spread", "cases", "testing"],
    "policy": ["policy", "mandate", "healthcare", "clinic", "insurance", "vaccine",
               "rollout", "funding", "response", "agency"],
    "community": ["pride", "community", "rights", "parade", "identity", "allies",
                  "visibility", "belonging", "support", "events"],
    "politics": ["election", "senate", "campaign", "governor", "congress", "ballot",
                 "debate", "poll", "district", "caucus"],
    "culture": ["heritage", "culture", "history", "tradition", "diaspora", "language",
                "festival", "cuisine", "music", "stories"],
}

HASHTAGS = {
    "disease": ["mpox", "monkeypox", "outbreak2022", "publichealth"],
    "policy": ["healthpolicy", "vaccines", "cdc", "whoupdate"],
    "community": ["pride2022", "lgbtq", "community", "loveislove"],
    "politics": ["election2022", "midterms", "politics", "vote"],
    "culture": ["heritage", "culture", "history", "roots"],
}

AUTHORS = [f"user{i:02d}" for i in range(1, 41)] + [
    "news_daily", "org_health", "gov_office", "sen_blake", "reporter_kim",
    "health_watch", "city_clinic", "fact_check",
]

LINKS = ["http://example.com/a", "https://example.org/read", "http://news.test/x1"]

START = datetime(2022, 5, 1, tzinfo=timezone.utc)
END = datetime(2022, 10, 31, tzinfo=timezone.utc)


def pick_time(rng):
    span = int((END - START).total_seconds())
    t = START + timedelta(seconds=rng.randrange(span))
    style = rng.random()
    if style < 0.70:
        return t.strftime("%Y-%m-%dT%H:%M:%SZ"), t
    if style < 0.85:  # fractional seconds get truncated on parse
        return t.strftime("%Y-%m-%dT%H:%M:%S") + f".{rng.randrange(1000):03d}Z", t
    local = t.astimezone(timezone(timedelta(hours=2)))
    return local.strftime("%Y-%m-%dT%H:%M:%S+02:00"), t


def make_text(rng, theme, toxic, author):
    words = []
    if toxic:
        words += rng.sample(LEXICON, rng.randint(3, 4))
    elif rng.random() < 0.3:
        words += rng.sample(LEXICON, rng.randint(1, 2))
    words += rng.sample(THEMES[theme], rng.randint(3, 5))
    rng.shuffle(words)

    parts = []
    if rng.random() < 0.25:
        target = rng.choice(AUTHORS)
        if rng.random() < 0.04:
            target = author  # the occasional self-mention
        parts.append(f"@{target}")
    parts += words
    if rng.random() < 0.5:
        for tag in rng.sample(HASHTAGS[theme], rng.randint(1, 2)):
            if rng.random() < 0.2:
                tag = tag.capitalize()
            parts.append(f"#{tag}")
    if rng.random() < 0.15:
        parts.append(rng.choice(LINKS))
    return " ".join(parts)


def main():
    rng = random.Random(20220518)
    records = []
    themes = list(THEMES)
    for i in range(1, 475):
        author = rng.choice(AUTHORS)
        theme = rng.choice(themes)
        toxic = rng.random() < 0.62
        stamp, _ = pick_time(rng)
        rec = {
            "id": f"t{i:04d}",
            "user": author,
            "created_at": stamp,
            "text": make_text(rng, theme, toxic, author),
        }
        if rng.random() < 0.45:  # retweet wrapper
            origin = rng.choice([a for a in AUTHORS if a != author])
            rec["text"] = f"RT @{origin}: {rec['text']}"
        if rng.random() < 0.25:
            rec["verified"] = rng.random() < 0.3
        if rng.random() < 0.30:
            rec["followers"] = rng.choice([120, 950, 4800, 15000, 52000, 80000, 210000])
        if rng.random() < 0.20:
            rec["lang"] = "en"
        if rng.random() < 0.10:
            rec["client"] = rng.choice(["web", "android", "ios"])
        records.append(rec)

    # (author, text) repeats so network dedup has work to do
    for i, src in enumerate(rng.sample(records, 26)):
        stamp, _ = pick_time(rng)
        records.append({
            "id": f"t{475 + i:04d}",
            "user": src["user"],
            "created_at": stamp,
            "text": src["text"],
        })

    assert len(records) == 500
    toxic_count = sum(
        1 for r in records
        if sum(w in LEXICON for w in r["text"].lower().split()) >= 3
    )
    print(f"{len(records)} records, ~{toxic_count} above threshold")

    rng.shuffle(records)
    out = Path(__file__).resolve().parent.parent / "data" / "fixture_500.jsonl"
    out.parent.mkdir(exist_ok=True)
    with out.open("w") as fh:
        for rec in records:
            fh.write(json.dumps(rec, sort_keys=True) + "\n")
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
