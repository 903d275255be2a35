"""Regenerates the fixture ontology and query log under data/.

Deterministic: the same script always writes the same bytes.
"""
import json
import random
from pathlib import Path

HERE = Path(__file__).resolve().parent


def cls(cid, parents, facet, *phrases, label=None):
    return {
        "id": cid,
        "label": label or cid,
        "parents": parents,
        "facet": facet,
        "annotations": [{"surface": " ".join(p), "lemmas": list(p)} for p in phrases],
    }


def ontology():
    c = [
        cls("Thing", [], None),
        cls("Natural_Feature", ["Thing"], "natural"),
        cls("Green_Area", ["Natural_Feature"], "natural", ("green", "area"), ("green", "space")),
        cls("Park", ["Green_Area"], "natural", ("park",), ("public", "garden")),
        cls("Play_Area", ["Green_Area"], "natural", ("playground",), ("play", "area")),
        cls("Sport_Area", ["Green_Area"], "natural", ("sport", "field"), ("stadium",)),
        cls("Water_Body", ["Natural_Feature"], "natural"),
        cls("River", ["Water_Body"], "natural", ("river",)),
        cls("Lake", ["Water_Body"], "natural", ("lake",)),
        cls("Beach", ["Water_Body"], "natural", ("beach",)),
        cls("Artificial_Feature", ["Thing"], "artificial"),
        cls("Education", ["Artificial_Feature"], "artificial"),
        cls("School", ["Education"], "artificial", ("school",)),
        cls("Kindergarten", ["Education"], "artificial", ("kindergarten",), ("nursery", "school")),
        cls("University", ["Education"], "artificial", ("university",), ("college",)),
        cls("Library", ["Education"], "artificial", ("library",)),
        cls("Food", ["Artificial_Feature"], "artificial"),
        cls("Restaurant", ["Food"], "artificial", ("restaurant",)),
        cls("Cafe", ["Food"], "artificial", ("cafe",), ("coffee", "shop")),
        cls("Bar", ["Food"], "artificial", ("bar",)),
        cls("Pub", ["Food"], "artificial", ("pub",)),
        cls("Shopping", ["Artificial_Feature"], "artificial"),
        cls("Shopping_Mall", ["Shopping"], "artificial", ("shopping", "mall"), ("mall",)),
        cls("Market", ["Shopping"], "artificial", ("market",)),
        cls("Shop", ["Shopping"], "artificial", ("shop",), ("store",)),
        cls("Tourism", ["Artificial_Feature"], "artificial"),
        cls("Resort", ["Tourism"], "artificial", ("resort",)),
        cls("Museum", ["Tourism", "Education"], "artificial", ("museum",)),
        cls("Hospital", ["Artificial_Feature"], "artificial", ("hospital",)),
        cls("Administrative_Boundary", ["Thing"], "administrative"),
        cls("Municipality", ["Administrative_Boundary"], "administrative", ("municipality",), ("town", "hall")),
        cls("Region", ["Administrative_Boundary"], "administrative", ("region",)),
        cls("Protected_Area", ["Region"], "natural", ("protected", "area"), ("nature", "reserve")),
    ]
    return {"root": "Thing", "classes": c}


# Phrases users type for each theme; sessions draw 2..4 of them.
THEMES = [
    ["parks", "playground", "sport field", "kindergarten", "public gardens"],
    ["restaurants", "cafe", "bar", "pub", "coffee shop"],
    ["beach", "resort", "lake"],
    ["library", "museum", "university", "college"],
    ["shopping mall", "market", "stores"],
]
NOISE = ["weather", "cheap flights", "lyrics", "news", "horoscope", "car insurance"]
TOWNS = ["in boston", "near denver", "chicago", "", "", "in austin"]


def log_rows():
    rng = random.Random(20061)
    rows = []
    base_day = 1
    for user in range(1, 61):
        uid = str(1000 + user)
        minute = 0
        day = base_day + (user % 20)
        for _ in range(rng.randint(1, 4)):
            kind = rng.random()
            if kind < 0.75:
                theme = THEMES[rng.randrange(len(THEMES))]
                picks = rng.sample(theme, rng.randint(2, min(4, len(theme))))
                if rng.random() < 0.15:
                    picks.insert(rng.randrange(len(picks) + 1), rng.choice(NOISE))
            elif kind < 0.9:
                picks = [rng.choice(THEMES[rng.randrange(len(THEMES))])]
            else:
                picks = rng.sample(NOISE, 2)
            town = rng.choice(TOWNS)
            for q in picks:
                text = (q + " " + town).strip()
                hh, mm = divmod(minute, 60)
                ts = f"2006-03-{day:02d} {8 + hh:02d}:{mm:02d}:{rng.randint(0, 59):02d}"
                click = rng.random() < 0.4
                rows.append((uid, text, ts, "1" if click else "", "http://www.example.com" if click else ""))
                if click and rng.random() < 0.3:
                    rows.append((uid, text, ts, "2", "http://www.example.org"))
                minute += rng.randint(1, 12)
            minute += 45 + rng.randint(0, 90)
    return rows


def main():
    (HERE / "fixture_ontology.json").write_text(json.dumps(ontology(), indent=2) + "\n")
    lexicon = {"classes": {
        "Park": [{"surface": "city park"}],
        "Beach": [{"surface": "seaside", "lemmas": ["seaside"]}],
    }}
    (HERE / "fixture_lexicon.json").write_text(json.dumps(lexicon, indent=2) + "\n")
    lines = ["AnonID\tQuery\tQueryTime\tItemRank\tClickURL"]
    lines += ["\t".join(r) for r in log_rows()]
    lines.append("1999\tbroken row without time")
    (HERE / "fixture_log.tsv").write_text("\n".join(lines) + "\n")


if __name__ == "__main__":
    main()
