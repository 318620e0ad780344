"""Typed STIX relationship extraction between co-sentential mentions.

Two methods produce candidates that are then merged by maximum confidence:

* rule-based: shortest dependency path between the two mentions, path verbs
  compared against the SRO catalog verb via exact lemma match (confidence
  1.0) or Wu-Palmer similarity over the bundled verb taxonomy;
* embedding: cosine similarity between a hashed character-n-gram embedding
  of the sentence (mention surfaces replaced by their STIX types) and of the
  catalog entry rendered as "<source> <rel> <target>".

Acceptance is inclusive at the 0.5 threshold.
"""

from __future__ import annotations

import json
import logging
from collections import deque
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .lingua import DependencyGraph, head_token_index
from .matcher import EntityMention

log = logging.getLogger(__name__)

DEFAULT_THRESHOLD = 0.5

EMBED_DIM = 512
_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class SroEntry:
    source: str
    rel: str
    target: str
    verb: str


@dataclass(frozen=True)
class SroCatalog:
    entries: tuple[SroEntry, ...]

    def for_pair(self, type_a: str, type_b: str) -> list[tuple[SroEntry, bool]]:
        """Entries whose endpoint types match (entry, flipped); ``flipped``
        means the pair (a, b) maps to (target, source)."""
        out = []
        for e in self.entries:
            if e.source == type_a and e.target == type_b:
                out.append((e, False))
            if e.source == type_b and e.target == type_a and type_a != type_b:
                out.append((e, True))
        return out


@dataclass(frozen=True)
class RelationCandidate:
    source: EntityMention
    target: EntityMention
    relationship_type: str
    confidence: float
    method: str  # rule | embedding


class Taxonomy:
    """Verb synset forest with Wu-Palmer similarity."""

    def __init__(self, synsets: list[dict]):
        self._parent: dict[str, str | None] = {}
        self._depth: dict[str, int] = {}
        self.lemma_index: dict[str, list[str]] = {}
        for s in synsets:
            self._parent[s["id"]] = s.get("parent")
            for lemma in s["lemmas"]:
                self.lemma_index.setdefault(lemma.lower(), []).append(s["id"])
        for sid in self._parent:
            self._depth[sid] = self._compute_depth(sid)

    def _compute_depth(self, sid: str) -> int:
        d = 1
        cur = self._parent[sid]
        while cur is not None:
            d += 1
            cur = self._parent[cur]
        return d

    def depth(self, sid: str) -> int:
        return self._depth[sid]

    def _ancestors(self, sid: str) -> list[str]:
        chain = [sid]
        cur = self._parent[sid]
        while cur is not None:
            chain.append(cur)
            cur = self._parent[cur]
        return chain

    def _wup_synsets(self, a: str, b: str) -> float:
        anc_a = self._ancestors(a)
        set_a = set(anc_a)
        lcs = next((s for s in self._ancestors(b) if s in set_a), None)
        if lcs is None:
            return 0.0
        return 2.0 * self._depth[lcs] / (self._depth[a] + self._depth[b])

    def wup(self, lemma_a: str, lemma_b: str) -> float:
        """Max Wu-Palmer similarity over the lemmas' synset pairs, in [0,1];
        0 when either lemma is unknown or the synsets share no tree."""
        sa = self.lemma_index.get(lemma_a.lower(), [])
        sb = self.lemma_index.get(lemma_b.lower(), [])
        if not sa or not sb:
            return 0.0
        return max(self._wup_synsets(a, b) for a in sa for b in sb)


def load_taxonomy(path: str | None = None) -> Taxonomy:
    if path is None:
        text = resources.files("stixpipe.data").joinpath("taxonomy.json").read_text("utf-8")
        raw = json.loads(text)
    else:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    return Taxonomy(raw["synsets"])


def load_catalog(path: str | None = None) -> SroCatalog:
    if path is None:
        text = resources.files("stixpipe.data").joinpath("sro_catalog.json").read_text("utf-8")
        raw = json.loads(text)
    else:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    entries = tuple(SroEntry(e["source"], e["rel"], e["target"], e["verb"])
                    for e in raw["entries"])
    return SroCatalog(entries)


_TAXONOMY: Taxonomy | None = None
_CATALOG: SroCatalog | None = None


def default_taxonomy() -> Taxonomy:
    global _TAXONOMY
    if _TAXONOMY is None:
        _TAXONOMY = load_taxonomy()
    return _TAXONOMY


def default_catalog() -> SroCatalog:
    global _CATALOG
    if _CATALOG is None:
        _CATALOG = load_catalog()
    return _CATALOG


def wup_similarity(lemma_a: str, lemma_b: str, tax: Taxonomy | None = None) -> float:
    tax = tax or default_taxonomy()
    return tax.wup(lemma_a, lemma_b)


# ---------------------------------------------------------------- SDP


def shortest_dependency_path(graph: DependencyGraph, a: int, b: int) -> list[int]:
    """Token indices of the shortest undirected path from a to b, endpoints
    included; ties resolved to the lexicographically smallest index sequence.
    """
    if a == b:
        return [a]
    adj = graph.neighbors()
    dist = {b: 0}
    q = deque([b])
    while q:
        cur = q.popleft()
        for nxt in adj[cur]:
            if nxt not in dist:
                dist[nxt] = dist[cur] + 1
                q.append(nxt)
    if a not in dist:
        raise RuntimeError(f"tokens {a} and {b} are disconnected")
    path = [a]
    cur = a
    while cur != b:
        cur = min(n for n in adj[cur] if dist.get(n, 1 << 30) == dist[cur] - 1)
        path.append(cur)
    return path


def path_tokens(graph: DependencyGraph, a: int, b: int) -> list[str]:
    return [graph.nodes[i].text for i in shortest_dependency_path(graph, a, b)]


# ---------------------------------------------------------------- rule method


def _mention_token(graph: DependencyGraph, m: EntityMention) -> int | None:
    return head_token_index(graph, m.span[0], m.span[1])


def rule_based_extract(
    graph: DependencyGraph,
    mentions: list[EntityMention],
    catalog: SroCatalog | None = None,
    tax: Taxonomy | None = None,
    threshold: float = DEFAULT_THRESHOLD,
) -> list[RelationCandidate]:
    """SDP + verb-similarity labeling of each co-sentential mention pair."""
    catalog = catalog or default_catalog()
    tax = tax or default_taxonomy()
    spanned = [m for m in mentions if m.span is not None]
    out: list[RelationCandidate] = []
    for i in range(len(spanned)):
        for j in range(i + 1, len(spanned)):
            ma, mb = spanned[i], spanned[j]
            entries = catalog.for_pair(ma.stix_type, mb.stix_type)
            if not entries:
                continue
            ta = _mention_token(graph, ma)
            tb = _mention_token(graph, mb)
            if ta is None or tb is None:
                continue
            path = shortest_dependency_path(graph, ta, tb)
            verbs = [graph.nodes[k].lemma for k in path if graph.nodes[k].pos == "VERB"]
            best: tuple[float, str, SroEntry, bool] | None = None
            tied: list[str] = []
            for entry, flipped in entries:
                if any(v == entry.verb for v in verbs):
                    conf = 1.0
                else:
                    conf = max((tax.wup(v, entry.verb) for v in verbs), default=0.0)
                key = (conf, entry.rel)
                if best is None or conf > best[0]:
                    best = (conf, entry.rel, entry, flipped)
                    tied = [entry.rel]
                elif conf == best[0]:
                    tied.append(entry.rel)
                    if entry.rel < best[1]:
                        best = (conf, entry.rel, entry, flipped)
            if best is None or best[0] < threshold:
                continue
            if len(set(tied)) > 1:
                log.debug("relation tie at %.3f between %s; keeping %s",
                          best[0], sorted(set(tied)), best[1])
            conf, _, entry, flipped = best
            source, target = (mb, ma) if flipped else (ma, mb)
            out.append(RelationCandidate(source, target, entry.rel, conf, "rule"))
    return out


# ---------------------------------------------------------------- embeddings


def _fnv1a(data: bytes) -> int:
    h = _FNV_OFFSET
    for byte in data:
        h ^= byte
        h = (h * _FNV_PRIME) & _MASK64
    return h


class EmbeddingTable:
    """Optional exact-string vector lookup loaded from a TSV file."""

    def __init__(self, vectors: dict[str, np.ndarray] | None = None):
        self.vectors = vectors or {}

    @classmethod
    def load(cls, path: str) -> "EmbeddingTable":
        vectors = {}
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                line = line.rstrip("\n")
                if not line:
                    continue
                key, _, rest = line.partition("\t")
                vec = np.array([float(x) for x in rest.split()], dtype=np.float64)
                norm = np.linalg.norm(vec)
                if norm > 0:
                    vec = vec / norm
                vectors[key] = vec
        return cls(vectors)

    def get(self, text: str) -> np.ndarray | None:
        return self.vectors.get(text)


def embed(text: str, table: EmbeddingTable | None = None) -> np.ndarray:
    """Deterministic unit vector for a string.

    If an external table holds the exact string, that vector (normalized) is
    returned; otherwise character 3-5-grams of the lowercased string are
    hashed (FNV-1a 64-bit) into 512 buckets, term-frequency weighted and
    L2-normalized. Empty or too-short input gives the zero vector.
    """
    if table is not None:
        hit = table.get(text)
        if hit is not None:
            return hit
    vec = np.zeros(EMBED_DIM, dtype=np.float64)
    low = text.lower()
    for n in (3, 4, 5):
        for i in range(len(low) - n + 1):
            bucket = _fnv1a(low[i:i + n].encode("utf-8")) % EMBED_DIM
            vec[bucket] += 1.0
    norm = np.linalg.norm(vec)
    return vec / norm if norm > 0 else vec


def cosine_confidence(u: np.ndarray, v: np.ndarray) -> float:
    return (float(np.dot(u, v)) + 1.0) / 2.0


def _typed_sentence(sentence_text: str, sentence_start: int,
                    ma: EntityMention, mb: EntityMention) -> str:
    """Sentence with the two mention surfaces replaced by their STIX types."""
    pieces = sorted([(ma.span, ma.stix_type), (mb.span, mb.stix_type)],
                    key=lambda p: p[0][0], reverse=True)
    text = sentence_text
    for (s, e), stype in pieces:
        rel_s, rel_e = s - sentence_start, e - sentence_start
        if 0 <= rel_s <= rel_e <= len(text):
            text = text[:rel_s] + stype + text[rel_e:]
    return text


def embedding_extract(
    sentence_text: str,
    sentence_start: int,
    mentions: list[EntityMention],
    catalog: SroCatalog | None = None,
    threshold: float = DEFAULT_THRESHOLD,
    table: EmbeddingTable | None = None,
) -> list[RelationCandidate]:
    """Embedding-similarity labeling of each co-sentential mention pair."""
    catalog = catalog or default_catalog()
    spanned = [m for m in mentions if m.span is not None]
    out: list[RelationCandidate] = []
    for i in range(len(spanned)):
        for j in range(i + 1, len(spanned)):
            ma, mb = spanned[i], spanned[j]
            entries = catalog.for_pair(ma.stix_type, mb.stix_type)
            if not entries:
                continue
            sent_vec = embed(_typed_sentence(sentence_text, sentence_start, ma, mb), table)
            best: tuple[float, str, SroEntry, bool] | None = None
            for entry, flipped in entries:
                entry_vec = embed(f"{entry.source} {entry.rel} {entry.target}", table)
                conf = cosine_confidence(sent_vec, entry_vec)
                if best is None or conf > best[0] or (conf == best[0] and entry.rel < best[1]):
                    best = (conf, entry.rel, entry, flipped)
            if best is None or best[0] < threshold:
                continue
            conf, _, entry, flipped = best
            source, target = (mb, ma) if flipped else (ma, mb)
            out.append(RelationCandidate(source, target, entry.rel, conf, "embedding"))
    return out


# ---------------------------------------------------------------- merge


def merge_relations(
    rule_cands: list[RelationCandidate],
    emb_cands: list[RelationCandidate],
    threshold: float = DEFAULT_THRESHOLD,
) -> list[RelationCandidate]:
    """Keep the maximum-confidence candidate per ordered mention pair.

    Ties prefer the rule method, then the lexicographically first
    relationship type; candidates below the (inclusive) threshold drop.
    """
    method_rank = {"rule": 0, "embedding": 1}
    grouped: dict[tuple, RelationCandidate] = {}
    for cand in list(rule_cands) + list(emb_cands):
        if cand.confidence < threshold:
            continue
        key = (cand.source, cand.target)
        cur = grouped.get(key)
        if cur is None:
            grouped[key] = cand
            continue
        better = (
            cand.confidence > cur.confidence
            or (cand.confidence == cur.confidence
                and (method_rank[cand.method], cand.relationship_type)
                < (method_rank[cur.method], cur.relationship_type))
        )
        if better:
            grouped[key] = cand
    ordered = sorted(grouped.values(),
                     key=lambda c: (c.source.span or (1 << 30, 0), c.target.span or (1 << 30, 0)))
    return ordered
