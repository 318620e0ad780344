"""Detection of entities absent from the knowledge base.

New actors, malware and campaigns enter reports through a small number of
introduction patterns ("the malware Raindrop", "a new backdoor dubbed
SUNBURST", "researchers named the campaign StellarRoute"). Each match emits a
low-confidence mention plus a review-queue candidate; names that resolve in
the KB snapshot, overlap other mentions, or sit on the stoplist are skipped.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources

from .automaton import fold
from .intervals import select_nonoverlapping
from .kb import CandidateEntity, KbSnapshot
from .lingua import DependencyGraph, Token
from .matcher import EntityMention
from .normalize import NormalizedText

NOVEL_CONFIDENCE = 0.8

_SKIP_BETWEEN = {"as", "it", "the", "a", "an", ":", '"', "'"}


@dataclass(frozen=True)
class NovelRules:
    trigger_lemmas: frozenset[str]
    type_noun_map: dict[str, str]


def load_rules(path: str | None = None) -> NovelRules:
    if path is None:
        text = resources.files("stixpipe.data").joinpath("novel_rules.json").read_text("utf-8")
        raw = json.loads(text)
    else:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    return NovelRules(frozenset(raw["trigger_lemmas"]), dict(raw["type_noun_map"]))


_DEFAULT: NovelRules | None = None


def default_rules() -> NovelRules:
    global _DEFAULT
    if _DEFAULT is None:
        _DEFAULT = load_rules()
    return _DEFAULT


def _is_name_token(tok: Token) -> bool:
    return tok.pos == "PROPN" or (tok.pos == "X" and tok.text[:1].isupper())


def _name_span(nodes: list[Token], start: int) -> tuple[int, int]:
    """Extend a contiguous run of name tokens rightward from ``start``."""
    end = start
    while end + 1 < len(nodes) and _is_name_token(nodes[end + 1]):
        end += 1
    return nodes[start].span[0], nodes[end].span[1]


def _appos_matches(graph: DependencyGraph, rules: NovelRules):
    for h, d, label in graph.edges:
        if label != "appos":
            continue
        head = graph.nodes[h]
        dep = graph.nodes[d]
        if head.pos != "NOUN" or head.lemma not in rules.type_noun_map:
            continue
        if not _is_name_token(dep):
            continue
        yield _name_span(graph.nodes, d), rules.type_noun_map[head.lemma], "type_noun_appos"


def _trigger_matches(graph: DependencyGraph, rules: NovelRules):
    nodes = graph.nodes
    for i, tok in enumerate(nodes):
        if tok.pos != "VERB" or tok.lemma not in rules.trigger_lemmas:
            continue
        j = i + 1
        while j < len(nodes) and (nodes[j].pos == "PUNCT"
                                  or nodes[j].text.lower() in _SKIP_BETWEEN
                                  or (nodes[j].pos == "NOUN" and nodes[j].lemma in rules.type_noun_map)):
            j += 1
        if j >= len(nodes) or not _is_name_token(nodes[j]):
            continue
        type_noun = None
        for k in range(i - 1, -1, -1):  # nearest type noun left of the trigger
            if nodes[k].pos == "NOUN" and nodes[k].lemma in rules.type_noun_map:
                type_noun = nodes[k].lemma
                break
        if type_noun is None:
            for k in range(i + 1, j):
                if nodes[k].pos == "NOUN" and nodes[k].lemma in rules.type_noun_map:
                    type_noun = nodes[k].lemma
                    break
        if type_noun is None:
            continue
        prev = nodes[i - 1] if i > 0 else None
        frame = "passive_trigger" if prev is not None and (
            prev.pos in ("PUNCT", "NOUN", "PROPN", "AUX")) else "naming_verb"
        yield _name_span(nodes, j), rules.type_noun_map[type_noun], frame


def extract_novel(
    nt: NormalizedText,
    graphs: list[DependencyGraph],
    existing: list[EntityMention],
    snap: KbSnapshot,
    stoplist: frozenset[str] | None = None,
    report_id: str = "",
    rules: NovelRules | None = None,
) -> list[tuple[EntityMention, CandidateEntity]]:
    """Pattern-rule extraction of novel entities over parsed sentences.

    Returns (mention, candidate) pairs; the caller persists candidates via
    the knowledge base writer.
    """
    rules = rules or default_rules()
    stop = stoplist if stoplist is not None else snap.stoplist
    taken = [m.span for m in existing if m.span is not None]

    found: list[tuple[tuple[int, int], str, str]] = []
    for graph in graphs:
        for span, stix_type, frame in list(_appos_matches(graph, rules)) + list(
                _trigger_matches(graph, rules)):
            surface = nt.text[span[0]:span[1]]
            folded = fold(surface)
            if not surface or folded in stop:
                continue
            if snap.resolve(surface) is not None:
                continue
            if any(span[0] < e and s < span[1] for s, e in taken):
                continue
            found.append((span, stix_type, frame))

    found.sort(key=lambda f: (f[0][0], f[0][0] - f[0][1]))
    deduped = select_nonoverlapping(found, span_of=lambda f: f[0])

    out: list[tuple[EntityMention, CandidateEntity]] = []
    for span, stix_type, frame in deduped:
        surface = nt.text[span[0]:span[1]]
        mention = EntityMention(
            surface=surface, span=span, stix_type=stix_type,
            provenance="novel", confidence=NOVEL_CONFIDENCE,
        )
        cand = CandidateEntity(
            surface=surface, proposed_type=stix_type, report_id=report_id,
            span=span, trigger=frame,
        )
        out.append((mention, cand))
    return out
