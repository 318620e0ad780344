"""End-to-end extraction over one document and STIX 2.1 bundle output.

Sub-modules (ioc / kb / novel / ttp / relations) are independently
toggleable; every enabled entity module consumes the same normalized text,
then overlaps are resolved, novel survivors are cross-checked against the
snapshot, relations run per sentence and merge by confidence.
"""

from __future__ import annotations

import json
import time
import uuid
from dataclasses import dataclass, field, replace

from .automaton import fold
from .intervals import select_nonoverlapping
from .ioc import find_iocs
from .kb import CandidateEntity, KbSnapshot
from .lingua import DependencyGraph, analyze_sentence
from .matcher import EntityMention, match_entities, pos_filter
from .normalize import DocFormat, NormalizedText, RawDocument, normalize, split_sentences, strip_html, tokenize
from .novel import extract_novel
from .relations import (
    EmbeddingTable,
    RelationCandidate,
    SroCatalog,
    Taxonomy,
    default_catalog,
    default_taxonomy,
    embedding_extract,
    merge_relations,
    rule_based_extract,
)
from .ttp import TfidfModel, predict, predictions_to_mentions

_NAMESPACE = uuid.UUID("1ea12f66-71ec-4ac8-a836-d6f387b78a8a")

_PROVENANCE_PRIORITY = {"ioc": 0, "kb": 1, "novel": 2}


class PipelineError(RuntimeError):
    def __init__(self, module: str, cause: Exception):
        super().__init__(f"module {module!r} failed: {cause}")
        self.module = module
        self.cause = cause


@dataclass
class PipelineConfig:
    """Sub-module toggles and knobs for one pipeline run.

    ``embedding`` adds the embedding-similarity relation sub-module on top of
    the rule-based one. It defaults off: the hashed-n-gram fallback embedder
    scores every type-compatible template at >= 0.5 (term-frequency vectors
    cannot produce negative cosines), so merged by max confidence it would
    drown out the calibrated rule confidences unless a real vector table is
    supplied via ``embeddings``.
    """

    ioc: bool = True
    kb: bool = True
    novel: bool = True
    ttp: bool = False
    relations: bool = True
    embedding: bool = False
    relation_threshold: float = 0.5
    ttp_model: TfidfModel | None = None
    ttp_threshold: float = 0.5
    catalog: SroCatalog | None = None
    taxonomy: Taxonomy | None = None
    embeddings: EmbeddingTable | None = None

    @classmethod
    def from_dict(cls, raw: dict) -> "PipelineConfig":
        modules = raw.get("modules", {})
        known = {"ioc", "kb", "novel", "ttp", "relations", "embedding"}
        bad = set(modules) - known
        if bad:
            raise ValueError(f"unknown modules in config: {sorted(bad)}")
        cfg = cls()
        for name in known:
            if name in modules:
                setattr(cfg, name, bool(modules[name]))
        if "relation_threshold" in raw:
            cfg.relation_threshold = float(raw["relation_threshold"])
        return cfg

    @classmethod
    def from_file(cls, path: str) -> "PipelineConfig":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


@dataclass
class ExtractionResult:
    report_id: str
    mentions: list[EntityMention]
    relations: list[RelationCandidate]
    candidates: list[CandidateEntity]
    kb_version: int
    timings: dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "report_id": self.report_id,
            "kb_version": self.kb_version,
            "mentions": [
                {
                    "surface": m.surface,
                    "span": list(m.span) if m.span is not None else None,
                    "stix_type": m.stix_type,
                    "provenance": m.provenance,
                    "confidence": m.confidence,
                    "kb_id": m.kb_id,
                }
                for m in self.mentions
            ],
            "relations": [
                {
                    "source": r.source.surface,
                    "source_type": r.source.stix_type,
                    "target": r.target.surface,
                    "target_type": r.target.stix_type,
                    "relationship_type": r.relationship_type,
                    "confidence": r.confidence,
                    "method": r.method,
                }
                for r in self.relations
            ],
            "candidates": [
                {
                    "id": c.id,
                    "surface": c.surface,
                    "proposed_type": c.proposed_type,
                    "span": list(c.span),
                    "trigger": c.trigger,
                    "status": c.status,
                }
                for c in self.candidates
            ],
            "timings": self.timings,
        }


def resolve_overlaps(mentions: list[EntityMention]) -> list[EntityMention]:
    """Longer span wins, then ioc > kb > novel, then higher confidence, then
    earlier start. Span-less (ttp) mentions pass through untouched."""
    spanned = [m for m in mentions if m.span is not None]
    spanless = [m for m in mentions if m.span is None]
    spanned.sort(key=lambda m: (
        -(m.span[1] - m.span[0]),
        _PROVENANCE_PRIORITY.get(m.provenance, 3),
        -m.confidence,
        m.span[0],
    ))
    kept = select_nonoverlapping(spanned, span_of=lambda m: m.span)
    kept.sort(key=lambda m: m.span)
    return kept + spanless


def cross_check(mentions: list[EntityMention], snap: KbSnapshot
                ) -> tuple[list[EntityMention], set[tuple[int, int]]]:
    """Re-provenance novel mentions whose surface resolves in the snapshot.

    The novel extractor already consults the same snapshot, so this fires
    only when a mention was produced against an older snapshot or injected
    by an external sub-module; it keeps the pipeline sound either way.
    Returns the checked mentions and the spans whose candidates must drop.
    """
    checked: list[EntityMention] = []
    dropped: set[tuple[int, int]] = set()
    for m in mentions:
        if m.provenance == "novel":
            hit = snap.resolve(m.surface)
            if hit is not None:
                entity_id, stix_type = hit
                checked.append(replace(m, provenance="kb", stix_type=stix_type,
                                       confidence=1.0, kb_id=entity_id))
                dropped.add(m.span)
                continue
        checked.append(m)
    return checked, dropped


def _timed(timings: dict[str, float], module: str, fn):
    t0 = time.perf_counter()
    try:
        out = fn()
    except Exception as exc:  # attach the failing module's name
        raise PipelineError(module, exc) from exc
    timings[module] = time.perf_counter() - t0
    return out


def run(doc: RawDocument, snap: KbSnapshot, config: PipelineConfig | None = None
        ) -> ExtractionResult:
    """Full pipeline over one document against one immutable KB snapshot."""
    config = config or PipelineConfig()
    timings: dict[str, float] = {}

    def normalize_doc():
        text = strip_html(doc) if doc.format is DocFormat.HTML else doc.decoded()
        return split_sentences(normalize(text))

    nt = _timed(timings, "normalize", normalize_doc)
    graphs = _timed(timings, "parse", lambda: [
        analyze_sentence(tokenize(nt, span), i) for i, span in enumerate(nt.sentences)
    ])

    mentions: list[EntityMention] = []
    if config.ioc:
        def run_ioc():
            return [
                EntityMention(surface=m.value, span=m.span, stix_type=m.stix_type,
                              provenance="ioc", confidence=1.0)
                for m in find_iocs(nt)
            ]
        mentions += _timed(timings, "ioc", run_ioc)
    if config.kb:
        def run_kb():
            found = match_entities(nt, snap)
            return pos_filter(found, snap, graphs, nt)
        mentions += _timed(timings, "kb", run_kb)

    candidates: list[CandidateEntity] = []
    if config.novel:
        def run_novel():
            return extract_novel(nt, graphs, mentions, snap, report_id=doc.id)
        pairs = _timed(timings, "novel", run_novel)
        for m, c in pairs:
            mentions.append(m)
            candidates.append(c)
    if config.ttp and config.ttp_model is not None:
        def run_ttp():
            preds = predict(config.ttp_model, nt.text, config.ttp_threshold)
            return predictions_to_mentions(config.ttp_model, preds)
        mentions += _timed(timings, "ttp", run_ttp)

    survivors = resolve_overlaps(mentions)
    checked, dropped_candidate_spans = cross_check(survivors, snap)
    surviving_spans = {m.span for m in checked if m.span is not None}
    candidates = [c for c in candidates
                  if c.span in surviving_spans and c.span not in dropped_candidate_spans]

    relations: list[RelationCandidate] = []
    if config.relations:
        def run_relations():
            catalog = config.catalog or default_catalog()
            tax = config.taxonomy or default_taxonomy()
            rule_all: list[RelationCandidate] = []
            emb_all: list[RelationCandidate] = []
            for graph in graphs:
                s, e = nt.sentences[graph.sentence_index]
                in_sentence = [m for m in checked
                               if m.span is not None and s <= m.span[0] < e]
                if len(in_sentence) < 2:
                    continue
                rule_all += rule_based_extract(graph, in_sentence, catalog, tax,
                                               config.relation_threshold)
                if config.embedding:
                    emb_all += embedding_extract(nt.text[s:e], s, in_sentence, catalog,
                                                 config.relation_threshold, config.embeddings)
            return merge_relations(rule_all, emb_all, config.relation_threshold)
        relations = _timed(timings, "relations", run_relations)

    return ExtractionResult(
        report_id=doc.id, mentions=checked, relations=relations,
        candidates=candidates, kb_version=snap.version, timings=timings,
    )


# ------------------------------------------------------------------ STIX


def _entity_key(m: EntityMention) -> tuple:
    if m.kb_id:
        return ("kb", m.kb_id)
    return ("surface", fold(m.surface), m.stix_type)


def _sdo_id(stix_type: str, name: str) -> str:
    return f"{stix_type}--{uuid.uuid5(_NAMESPACE, f'{name}|{stix_type}')}"


def to_stix_bundle(result: ExtractionResult, snap: KbSnapshot | None = None,
                   bundle_uuid: str | None = None) -> dict:
    """STIX 2.1 bundle with one SDO per distinct entity and one relationship
    object per relation. SDO ids are name-based (uuid5) so identical inputs
    produce identical bundles; the bundle id itself is seedable via
    ``bundle_uuid``."""
    objects: list[dict] = []
    by_key: dict[tuple, str] = {}
    for m in result.mentions:
        key = _entity_key(m)
        if key in by_key:
            continue
        name = m.surface
        if m.kb_id and snap is not None:
            entity = snap.entity(m.kb_id)
            if entity is not None:
                name = entity.name
        sdo_id = _sdo_id(m.stix_type, name)
        by_key[key] = sdo_id
        objects.append({
            "type": m.stix_type,
            "spec_version": "2.1",
            "id": sdo_id,
            "name": name,
        })

    for r in result.relations:
        source_ref = by_key.get(_entity_key(r.source))
        target_ref = by_key.get(_entity_key(r.target))
        if source_ref is None or target_ref is None:
            continue
        rel_id = f"relationship--{uuid.uuid5(_NAMESPACE, f'{source_ref}|{r.relationship_type}|{target_ref}')}"
        objects.append({
            "type": "relationship",
            "spec_version": "2.1",
            "id": rel_id,
            "relationship_type": r.relationship_type,
            "source_ref": source_ref,
            "target_ref": target_ref,
            "confidence": round(100 * r.confidence),
        })

    bid = bundle_uuid or str(uuid.uuid4())
    return {"type": "bundle", "id": f"bundle--{bid}", "objects": objects}


def bundle_json(bundle: dict) -> str:
    return json.dumps(bundle, sort_keys=True, indent=2)


def validate_bundle(bundle: dict) -> list[str]:
    """Structural STIX 2.1 checks; returns a list of problems (empty = valid)."""
    problems: list[str] = []
    if bundle.get("type") != "bundle":
        problems.append("bundle.type must be 'bundle'")
    if not str(bundle.get("id", "")).startswith("bundle--"):
        problems.append("bundle.id must start with 'bundle--'")
    objects = bundle.get("objects")
    if not isinstance(objects, list):
        return problems + ["bundle.objects must be a list"]
    ids = [o.get("id") for o in objects]
    if len(ids) != len(set(ids)):
        problems.append("duplicate object ids")
    id_set = set(ids)
    for o in objects:
        oid = o.get("id", "<missing>")
        if o.get("spec_version") != "2.1":
            problems.append(f"{oid}: spec_version must be '2.1'")
        if not isinstance(o.get("type"), str) or not o["type"]:
            problems.append(f"{oid}: missing type")
        elif not str(oid).startswith(o["type"] + "--"):
            problems.append(f"{oid}: id prefix does not match type")
        if o.get("type") == "relationship":
            for ref in ("source_ref", "target_ref"):
                if o.get(ref) not in id_set:
                    problems.append(f"{oid}: {ref} does not resolve in bundle")
            conf = o.get("confidence")
            if not isinstance(conf, int) or not 0 <= conf <= 100:
                problems.append(f"{oid}: confidence must be an int in [0,100]")
        else:
            if not o.get("name"):
                problems.append(f"{oid}: missing name")
    return problems
