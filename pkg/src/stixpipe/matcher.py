"""Gazetteer matching of KB entities in normalized text.

Scans with the snapshot's compiled automaton, enforces word boundaries,
resolves aliases to canonical entities, and drops false positives whose POS
tag is incompatible with the entity type.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .intervals import select_nonoverlapping
from .kb import KbSnapshot
from .lingua import DependencyGraph, head_token_index
from .normalize import NormalizedText

PROVENANCES = ("ioc", "kb", "novel", "ttp")


@dataclass(frozen=True)
class EntityMention:
    surface: str
    span: tuple[int, int] | None  # None only for document-level (ttp) mentions
    stix_type: str
    provenance: str
    confidence: float = 1.0
    kb_id: str | None = None

    def __post_init__(self):
        if self.provenance not in PROVENANCES:
            raise ValueError(f"bad provenance {self.provenance!r}")
        if not 0.0 <= self.confidence <= 1.0:
            raise ValueError(f"confidence {self.confidence} outside [0,1]")
        if self.provenance == "kb" and self.kb_id is None:
            raise ValueError("kb mention requires kb_id")


def _word_char(ch: str) -> bool:
    return ch.isalnum() or ch == "-"


def _flanked(text: str, start: int, end: int) -> bool:
    left_ok = start == 0 or not _word_char(text[start - 1])
    right_ok = end == len(text) or not _word_char(text[end])
    return left_ok and right_ok


def match_entities(nt: NormalizedText, snap: KbSnapshot) -> list[EntityMention]:
    """All boundary-valid KB matches, overlaps resolved longest-first then
    leftmost, each resolved through the alias index to its canonical entity."""
    hits = []
    for start, end, _pattern, value in snap.automaton.iter(nt.text):
        if not _flanked(nt.text, start, end):
            continue
        entity_id, stix_type = value
        hits.append((start, end, entity_id, stix_type))

    hits.sort(key=lambda h: (-(h[1] - h[0]), h[0]))
    kept = select_nonoverlapping(hits, span_of=lambda h: (h[0], h[1]))
    kept.sort(key=lambda h: h[0])

    return [
        EntityMention(
            surface=nt.text[s:e], span=(s, e), stix_type=stix_type,
            provenance="kb", confidence=1.0, kb_id=entity_id,
        )
        for s, e, entity_id, stix_type in kept
    ]


def _mention_tag(mention: EntityMention, graphs: list[DependencyGraph],
                 nt: NormalizedText) -> str | None:
    """POS tag of the mention's head-most token (last token if no parse)."""
    s, e = mention.span
    si = nt.sentence_at(s)
    if si is None:
        return None
    graph = next((g for g in graphs if g.sentence_index == si), None)
    if graph is None:
        return None
    idx = head_token_index(graph, s, e)
    return graph.nodes[idx].pos if idx is not None else None


def pos_filter(mentions: list[EntityMention], snap: KbSnapshot,
               graphs: list[DependencyGraph], nt: NormalizedText) -> list[EntityMention]:
    """Drop kb mentions whose tag is not in the entity's allowed_pos.

    An entity with an empty allowed_pos list is never filtered. Mentions
    whose sentence has no parse are kept (no evidence to reject on).
    """
    out = []
    for m in mentions:
        if m.provenance != "kb" or m.span is None:
            out.append(m)
            continue
        entity = snap.entity(m.kb_id)
        allowed = entity.allowed_pos if entity is not None else ()
        if not allowed:
            out.append(m)
            continue
        tag = _mention_tag(m, graphs, nt)
        if tag is None or tag in allowed:
            out.append(m)
    return out
