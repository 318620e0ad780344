"""Scoring against annotated ground truth and the KB-growth experiment.

Annotations are a LabelStudio-compatible subset: character-span entities with
types plus index-pair relations. Entity credit requires exact span and type;
span-less (ttp) predictions get document-level credit against any unconsumed
gold entity of the same type. Relation scoring supports the standard mode and
the no-error-propagation mode (predictions touching a misclassified entity
are excluded instead of counted as false positives).
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field

from .kb import CandidateEntity, KnowledgeBase
from .matcher import EntityMention
from .normalize import DocFormat, RawDocument
from .pipeline import ExtractionResult, PipelineConfig, run
from .relations import RelationCandidate


class EvalError(ValueError):
    pass


@dataclass(frozen=True)
class GoldEntity:
    start: int
    end: int
    type: str
    text: str


@dataclass(frozen=True)
class GoldRelation:
    source: int
    target: int
    type: str


@dataclass(frozen=True)
class AnnotatedReport:
    document: str
    entities: tuple[GoldEntity, ...]
    relations: tuple[GoldRelation, ...] = ()
    report_id: str = ""

    def __post_init__(self):
        for ent in self.entities:
            if not (0 <= ent.start < ent.end <= len(self.document)):
                raise EvalError(f"entity span out of bounds: {ent}")
            if self.document[ent.start:ent.end] != ent.text:
                raise EvalError(
                    f"entity text mismatch at {ent.start}: "
                    f"{self.document[ent.start:ent.end]!r} != {ent.text!r}")
        for rel in self.relations:
            n = len(self.entities)
            if not (0 <= rel.source < n and 0 <= rel.target < n):
                raise EvalError(f"relation index out of range: {rel}")

    @classmethod
    def from_dict(cls, raw: dict, report_id: str = "") -> "AnnotatedReport":
        return cls(
            document=raw["document"],
            entities=tuple(GoldEntity(e["start"], e["end"], e["type"], e["text"])
                           for e in raw.get("entities", [])),
            relations=tuple(GoldRelation(r["source"], r["target"], r["type"])
                            for r in raw.get("relations", [])),
            report_id=report_id or raw.get("report_id", ""),
        )

    @classmethod
    def load(cls, path: str) -> "AnnotatedReport":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh), report_id=str(path))


@dataclass(frozen=True)
class Scores:
    tp: int
    fp: int
    fn: int
    precision: float
    recall: float
    f1: float

    @classmethod
    def from_counts(cls, tp: int, fp: int, fn: int) -> "Scores":
        precision = tp / (tp + fp) if tp + fp else 0.0
        recall = tp / (tp + fn) if tp + fn else 0.0
        f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
        return cls(tp, fp, fn, precision, recall, f1)

    def __add__(self, other: "Scores") -> "Scores":
        return Scores.from_counts(self.tp + other.tp, self.fp + other.fp,
                                  self.fn + other.fn)


def align_entities(pred: list[EntityMention], gold: tuple[GoldEntity, ...]
                   ) -> dict[EntityMention, int]:
    """Greedy matching of predictions to gold entities, each gold used once.

    Span-bearing predictions need exact span and type; span-less predictions
    match the first unconsumed gold of the same type in document order.
    """
    consumed: set[int] = set()
    alignment: dict[EntityMention, int] = {}
    spanned = sorted((m for m in pred if m.span is not None), key=lambda m: m.span)
    spanless = [m for m in pred if m.span is None]
    for m in spanned:
        for gi, g in enumerate(gold):
            if gi in consumed:
                continue
            if (g.start, g.end) == m.span and g.type == m.stix_type:
                consumed.add(gi)
                alignment[m] = gi
                break
    order = sorted(range(len(gold)), key=lambda gi: gold[gi].start)
    for m in spanless:
        for gi in order:
            if gi in consumed:
                continue
            if gold[gi].type == m.stix_type:
                consumed.add(gi)
                alignment[m] = gi
                break
    return alignment


def score_entities(pred: list[EntityMention], report: AnnotatedReport,
                   document_text: str | None = None) -> Scores:
    if document_text is not None and document_text != report.document:
        raise EvalError("prediction document text differs from gold document")
    alignment = align_entities(pred, report.entities)
    tp = len(alignment)
    fp = len(pred) - tp
    fn = len(report.entities) - tp
    return Scores.from_counts(tp, fp, fn)


def score_relations(pred: list[RelationCandidate], report: AnnotatedReport,
                    alignment: dict[EntityMention, int],
                    mode: str = "standard") -> Scores:
    """Relation scoring on top of an entity alignment.

    standard: a predicted relation with any unaligned (misclassified)
    endpoint is a false positive. no-error-prop: such predictions are
    excluded entirely; gold relations stay in the false-negative pool either
    way.
    """
    if mode not in ("standard", "no-error-prop"):
        raise ValueError(f"unknown mode {mode!r}")
    consumed: set[int] = set()
    tp = fp = 0
    for cand in pred:
        src = alignment.get(cand.source)
        tgt = alignment.get(cand.target)
        if src is None or tgt is None:
            if mode == "standard":
                fp += 1
            continue
        hit = None
        for ri, rel in enumerate(report.relations):
            if ri in consumed:
                continue
            if rel.source == src and rel.target == tgt and rel.type == cand.relationship_type:
                hit = ri
                break
        if hit is None:
            fp += 1
        else:
            consumed.add(hit)
            tp += 1
    fn = len(report.relations) - tp
    return Scores.from_counts(tp, fp, fn)


@dataclass
class ReportEvaluation:
    report: AnnotatedReport
    result: ExtractionResult
    entity_scores: Scores
    relation_scores: Scores


def evaluate_report(report: AnnotatedReport, result: ExtractionResult,
                    mode: str = "standard") -> ReportEvaluation:
    entity_scores = score_entities(result.mentions, report)
    alignment = align_entities(result.mentions, report.entities)
    relation_scores = score_relations(result.relations, report, alignment, mode)
    return ReportEvaluation(report, result, entity_scores, relation_scores)


# ------------------------------------------------------------- temporal


def _accept_matching_candidates(kb: KnowledgeBase, result: ExtractionResult,
                                report: AnnotatedReport, auto_accept: bool) -> int:
    """Simulated analyst pass: accept candidates that exactly match a gold
    entity (span and type), reject the rest. With auto_accept=False every
    pending candidate is accepted unvalidated."""
    accepted = 0
    gold_spans = {(g.start, g.end): g.type for g in report.entities}
    for cand in result.candidates:
        stored = kb.add_candidate(cand)
        if stored.status != "pending":
            continue
        if not auto_accept:
            kb.review_candidate(stored.id, "accept")
            accepted += 1
            continue
        gold_type = gold_spans.get(tuple(cand.span))
        if gold_type is not None and gold_type == cand.proposed_type:
            kb.review_candidate(stored.id, "accept")
            accepted += 1
        else:
            kb.review_candidate(stored.id, "reject")
    return accepted


def temporal_experiment(
    reports: list[AnnotatedReport],
    kb: KnowledgeBase,
    batch_size: int = 5,
    augment: bool = True,
    auto_accept: bool = True,
    config: PipelineConfig | None = None,
) -> list[Scores]:
    """Batched evaluation with (optionally) a growing knowledge base.

    Per batch: extract each report against the batch's snapshot and score
    entities (micro-aggregated over the batch); then, in augment mode, run
    the simulated analyst over the new candidates before the next batch.
    """
    out: list[Scores] = []
    for lo in range(0, len(reports), batch_size):
        batch = reports[lo:lo + batch_size]
        snap = kb.snapshot()
        batch_scores = Scores.from_counts(0, 0, 0)
        results = []
        for report in batch:
            doc = RawDocument(id=report.report_id or f"report-{lo}",
                              content=report.document.encode("utf-8"),
                              format=DocFormat.PLAIN_TEXT)
            result = run(doc, snap, config)
            batch_scores = batch_scores + score_entities(result.mentions, report)
            results.append(result)
        out.append(batch_scores)
        if augment:
            for report, result in zip(batch, results):
                _accept_matching_candidates(kb, result, report, auto_accept)
    return out


def shuffled_experiment_means(
    reports: list[AnnotatedReport],
    kb_factory,
    n_shuffles: int = 10,
    seed: int = 0,
    batch_size: int = 5,
    augment: bool = True,
    config: PipelineConfig | None = None,
) -> list[float]:
    """Mean-over-batches F1 for each shuffled order (order-independence check)."""
    rng = random.Random(seed)
    means = []
    for _ in range(n_shuffles):
        order = list(reports)
        rng.shuffle(order)
        scores = temporal_experiment(order, kb_factory(), batch_size=batch_size,
                                     augment=augment, config=config)
        means.append(sum(s.f1 for s in scores) / len(scores))
    return means


# ------------------------------------------------------------- bundled corpus


def load_temporal_corpus(path: str | None = None
                         ) -> tuple[list[dict], list[AnnotatedReport]]:
    """(seed entity specs, annotated reports) from the bundled corpus file."""
    if path is None:
        from importlib import resources
        text = resources.files("stixpipe.data").joinpath("temporal_corpus.json").read_text("utf-8")
        raw = json.loads(text)
    else:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    reports = [AnnotatedReport.from_dict(r, report_id=f"report-{i}")
               for i, r in enumerate(raw["reports"])]
    return raw["seed_entities"], reports


def seed_kb_from_specs(specs: list[dict], path=None) -> KnowledgeBase:
    kb = KnowledgeBase(path)
    for spec in specs:
        kb.add_entity(spec["stix_type"], spec["name"], aliases=spec.get("aliases", []))
    return kb
