#!/usr/bin/env python3
"""Regenerate the bundled synthetic corpus for the KB-growth experiment
(src/stixpipe/data/temporal_corpus.json).

20 annotated reports, structured so that each report (a) mentions seed-KB
entities, (b) introduces one of five recurring made-up malware names through
a trigger pattern, and (c) plainly mentions another of them with no pattern.
Plain mentions are only recoverable once the name has been accepted into the
KB, which is what the growth experiment measures. Each name is introduced by
four different reports, keeping shuffled orders statistically alike.
"""

from __future__ import annotations

import json
from pathlib import Path

OUT = Path(__file__).resolve().parent.parent / "src" / "stixpipe" / "data" / "temporal_corpus.json"

NOVEL = ["Vexroot", "Duskpipe", "Brineowl", "Cinderwasp", "Gloomvine"]

SEED_ENTITIES = [
    {"stix_type": "intrusion-set", "name": "APT29", "aliases": ["Cozy Bear"]},
    {"stix_type": "tool", "name": "7-Zip", "aliases": []},
    {"stix_type": "location", "name": "United States", "aliases": ["US", "American"]},
]


def build_report(i: int) -> dict:
    intro = NOVEL[i % len(NOVEL)]
    plain = NOVEL[(i + 2) % len(NOVEL)]
    ip = f"10.0.{i}.{i + 7}"
    sentences = [
        "APT29 used 7-Zip to stage the operation.",
        f"The host {ip} served the payload.",
        f"Researchers discovered a new malware dubbed {intro}.",
        f"The {plain} sample beaconed to its operators.",
        "The campaign targeted the US.",
    ]
    document = " ".join(sentences)

    def span(surface: str) -> tuple[int, int]:
        start = document.index(surface)
        return start, start + len(surface)

    entities = []
    for surface, etype in [
        ("APT29", "intrusion-set"),
        ("7-Zip", "tool"),
        (ip, "indicator"),
        (intro, "malware"),
        (plain, "malware"),
        ("US", "location"),
    ]:
        s, e = span(surface)
        entities.append({"start": s, "end": e, "type": etype, "text": surface})

    relations = [{"source": 0, "target": 1, "type": "uses"}]
    return {"document": document, "entities": entities, "relations": relations}


def main() -> None:
    reports = [build_report(i) for i in range(20)]
    payload = {"seed_entities": SEED_ENTITIES, "reports": reports}
    OUT.write_text(json.dumps(payload, indent=1), encoding="utf-8")
    print(f"wrote {len(reports)} reports to {OUT}")


if __name__ == "__main__":
    main()
