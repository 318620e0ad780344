"""Deterministic POS tagging, lemmatization and heuristic dependency parsing.

The tag set is a 14-tag subset of Universal POS. Tagging consults the bundled
lexicon first, then suffix rules, then a capitalization rule; everything is
data-driven from ``pos_lexicon.tsv`` / ``lemma_exceptions.tsv`` so behaviour
can be tuned without code changes. The parser is a rule-based attacher that
always produces a single-rooted, acyclic, connected graph; gold parses in
CoNLL-U format can replace it via :func:`ingest_conllu`.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from importlib import resources

TAGS = frozenset({
    "NOUN", "PROPN", "VERB", "AUX", "PRON", "DET", "ADP", "ADJ", "ADV",
    "NUM", "PART", "CCONJ", "PUNCT", "X",
})

DEP_LABELS = frozenset({
    "nsubj", "obj", "obl", "amod", "det", "appos", "prep", "pobj", "conj",
    "aux", "punct", "dep",
})

_NOMINAL = {"NOUN", "PROPN", "PRON"}


@dataclass
class Token:
    index: int
    text: str
    span: tuple[int, int]
    pos: str = "X"
    lemma: str = ""


@dataclass
class DependencyGraph:
    sentence_index: int
    nodes: list[Token]
    edges: list[tuple[int, int, str]]  # (head, dependent, label)
    root: int

    def neighbors(self) -> dict[int, set[int]]:
        adj: dict[int, set[int]] = {t.index: set() for t in self.nodes}
        for h, d, _ in self.edges:
            adj[h].add(d)
            adj[d].add(h)
        return adj


class AlignmentError(ValueError):
    pass


def head_token_index(graph: DependencyGraph, start: int, end: int) -> int | None:
    """Index of the head-most token covered by the character span.

    The head-most token is the one whose head lies outside the span; falls
    back to the last covered token, or None when nothing overlaps.
    """
    inside = [t for t in graph.nodes if t.span[0] >= start and t.span[1] <= end]
    if not inside:
        inside = [t for t in graph.nodes if t.span[0] < end and t.span[1] > start]
        if not inside:
            return None
    if len(inside) == 1:
        return inside[0].index
    indices = {t.index for t in inside}
    heads = {d: h for h, d, _ in graph.edges}
    for t in inside:
        if heads.get(t.index) not in indices:
            return t.index
    return inside[-1].index


def _load_lexicon() -> tuple[dict[str, tuple[str, str]], dict[str, str]]:
    lex: dict[str, tuple[str, str]] = {}
    text = resources.files("stixpipe.data").joinpath("pos_lexicon.tsv").read_text("utf-8")
    for line in text.splitlines():
        if not line or line.startswith("#"):
            continue
        word, pos, lemma = line.split("\t")
        lex[word] = (pos, lemma)
    exceptions: dict[str, str] = {}
    text = resources.files("stixpipe.data").joinpath("lemma_exceptions.tsv").read_text("utf-8")
    for line in text.splitlines():
        if not line or line.startswith("#"):
            continue
        form, lemma = line.split("\t")
        exceptions[form] = lemma
    return lex, exceptions


_LEXICON, _LEMMA_EXC = _load_lexicon()
_VERB_STEMS = {lemma for _, (pos, lemma) in _LEXICON.items() if pos == "VERB"}
_NOUN_STEMS = {lemma for w, (pos, lemma) in _LEXICON.items() if pos == "NOUN" and w == lemma}

_PUNCT_RE = re.compile(r"^\W+$", re.UNICODE)
_NUMBER_RE = re.compile(r"^\d[\d.,:%]*$")


def _case_plain(text: str, sentence_initial: bool) -> bool:
    if text.islower():
        return True
    return sentence_initial and text.istitle()


def pos_tag(tokens: list[Token], sentence_initial_index: int = 0) -> list[Token]:
    """Assign POS tags in place and return the tokens.

    Lookup order: closed/open-class lexicon (only for lowercase or
    sentence-initial title-case forms), suffix rules, capitalization and
    digit/hyphen cues, fallback X. "to" is PART before a verb, ADP otherwise.
    """
    for tok in tokens:
        text = tok.text
        low = text.lower()
        initial = tok.index == sentence_initial_index

        if _PUNCT_RE.match(text):
            tok.pos = "PUNCT"
            continue
        if _NUMBER_RE.match(text):
            tok.pos = "NUM"
            continue
        if _case_plain(text, initial) and low in _LEXICON:
            tok.pos = _LEXICON[low][0]
            continue
        if _case_plain(text, initial):
            if low.endswith("ly") and len(low) > 3:
                tok.pos = "ADV"
                continue
            stem = _verb_stem(low)
            if (low.endswith("ing") or low.endswith("ed")) and stem:
                tok.pos = "VERB"
                continue
            if low.endswith("s") and not low.endswith("ss") and low[:-1] in _NOUN_STEMS:
                tok.pos = "NOUN"
                continue
        upper_acronym = text.isupper() and len(text) >= 2
        capitalized = text[:1].isupper() and not initial
        has_letter = any(c.isalpha() for c in text)
        mixed = has_letter and (any(c.isdigit() for c in text) or "-" in text.strip("-"))
        if upper_acronym or capitalized or mixed:
            tok.pos = "PROPN"
            continue
        tok.pos = "X"

    # contextual refinement for "to": PART before a verbal form, else ADP
    for i, tok in enumerate(tokens):
        if tok.text.lower() == "to":
            nxt = tokens[i + 1] if i + 1 < len(tokens) else None
            if nxt is not None and (nxt.pos in ("VERB", "AUX") or nxt.text.lower() in _VERB_STEMS):
                tok.pos = "PART"
            else:
                tok.pos = "ADP"
    return tokens


def _verb_stem(word: str) -> str | None:
    """Stem repair for -ing/-ed forms against the known verb stems."""
    for suffix in ("ing", "ed"):
        if not word.endswith(suffix) or len(word) <= len(suffix) + 1:
            continue
        cut = word[: -len(suffix)]
        for cand in (cut, cut + "e", cut[:-1] if len(cut) > 2 and cut[-1] == cut[-2] else None,
                     cut[:-1] + "y" if cut.endswith("i") else None):
            if cand and cand in _VERB_STEMS:
                return cand
    return None


def lemmatize(token: Token) -> str:
    """Lemma for a tagged token; proper nouns keep their surface form."""
    text = token.text
    low = text.lower()
    if token.pos in ("PROPN", "X", "PUNCT", "NUM"):
        token.lemma = text
        return text
    if low in _LEMMA_EXC:
        token.lemma = _LEMMA_EXC[low]
        return token.lemma
    if low in _LEXICON:
        token.lemma = _LEXICON[low][1]
        return token.lemma
    lemma = low
    if low.endswith("ies") and len(low) > 4:
        lemma = low[:-3] + "y"
    elif (low.endswith("ing") or low.endswith("ed")) and token.pos in ("VERB", "AUX"):
        lemma = _verb_stem(low) or (low[:-3] if low.endswith("ing") else low[:-2])
    elif low.endswith("es") and len(low) > 3 and low[:-2] in _NOUN_STEMS | _VERB_STEMS:
        lemma = low[:-2]
    elif low.endswith("s") and not low.endswith("ss") and len(low) > 3:
        lemma = low[:-1]
    token.lemma = lemma or low
    return token.lemma


def _next_index(tokens: list[Token], start: int, poses: set[str]) -> int | None:
    for t in tokens[start + 1:]:
        if t.pos in poses:
            return t.index
    return None


def _prev_index(tokens: list[Token], start: int, poses: set[str]) -> int | None:
    for t in reversed(tokens[:start]):
        if t.pos in poses:
            return t.index
    return None


def parse_dependencies(tokens: list[Token], sentence_index: int = 0) -> DependencyGraph:
    """Heuristic attachment producing one connected, single-rooted graph.

    Root is the first finite verb (an infinitive after "to" does not count),
    else the first auxiliary, nominal, or non-punctuation token. Determiners
    and adjectives attach forward to the next nominal, adpositions head the
    following nominal (pobj) and hang off the nearest preceding verb or
    nominal (prep), pre-root nominals become nsubj, post-verbal nominals obj
    then obl, "to"+verb chains attach to the governing verb, and a proper
    noun right after a common noun is its appositive.
    """
    if not tokens:
        return DependencyGraph(sentence_index, [], [], 0)

    def is_nominal(t: Token) -> bool:
        return t.pos in _NOMINAL or (t.pos == "X" and t.text[:1].isupper())

    root = None
    for i, t in enumerate(tokens):
        if t.pos == "VERB" and not (i > 0 and tokens[i - 1].pos == "PART"
                                    and tokens[i - 1].text.lower() == "to"):
            root = t.index
            break
    if root is None:
        for pred in (lambda t: t.pos == "AUX", is_nominal, lambda t: t.pos != "PUNCT"):
            cand = next((t.index for t in tokens if pred(t)), None)
            if cand is not None:
                root = cand
                break
    if root is None:
        root = tokens[0].index

    head: dict[int, tuple[int, str]] = {}
    verbs_seen: list[int] = []
    obj_given: set[int] = set()

    by_index = {t.index: t for t in tokens}

    for i, tok in enumerate(tokens):
        idx = tok.index
        if idx == root:
            verbs_seen.append(idx) if tok.pos in ("VERB", "AUX") else None
            continue
        if tok.pos == "PUNCT":
            head[idx] = (root, "punct")
            continue
        if tok.pos in ("DET", "ADJ", "NUM"):
            target = _next_index(tokens, i, {"NOUN", "PROPN"})
            label = "det" if tok.pos == "DET" else "amod"
            head[idx] = (target, label) if target is not None else (root, "dep")
            continue
        if tok.pos == "PART" and tok.text.lower() == "to":
            target = _next_index(tokens, i, {"VERB", "AUX"})
            head[idx] = (target, "aux") if target is not None else (root, "dep")
            continue
        if tok.pos == "AUX":
            target = _next_index(tokens, i, {"VERB"})
            head[idx] = (target, "aux") if target is not None else (root, "dep")
            continue
        if tok.pos == "ADP":
            gov = _prev_index(tokens, i, {"VERB", "AUX", "NOUN", "PROPN", "PRON"})
            head[idx] = (gov, "prep") if gov is not None else (root, "dep")
            continue
        if tok.pos == "VERB":
            if i > 0 and tokens[i - 1].pos == "PART" and tokens[i - 1].text.lower() == "to":
                gov = _prev_index(tokens, i - 1, {"VERB", "AUX"})
                head[idx] = (gov, "dep") if gov is not None else (root, "dep")
            else:
                gov = _prev_index(tokens, i, {"VERB"})
                head[idx] = (gov, "conj") if gov is not None and gov != idx else (root, "dep")
            verbs_seen.append(idx)
            continue
        if is_nominal(tok):
            prev = tokens[i - 1] if i > 0 else None
            if (tok.pos in ("PROPN", "X") and prev is not None and prev.pos == "NOUN"):
                head[idx] = (prev.index, "appos")
                continue
            if prev is not None and prev.pos == "CCONJ":
                earlier = _prev_index(tokens, i - 1, _NOMINAL | {"X"})
                if earlier is not None:
                    head[idx] = (earlier, "conj")
                    continue
            adp = None
            for t in reversed(tokens[:i]):
                if t.pos == "ADP":
                    adp = t.index
                    break
                if t.pos not in ("DET", "ADJ", "NUM", "ADV"):
                    break
            if adp is not None:
                head[idx] = (adp, "pobj")
                continue
            gov_verb = _prev_index(tokens, i, {"VERB", "AUX"})
            if gov_verb is None:
                if idx < root:
                    head[idx] = (root, "nsubj")
                else:
                    head[idx] = (root, "dep")
                continue
            if gov_verb not in obj_given:
                head[idx] = (gov_verb, "obj")
                obj_given.add(gov_verb)
            else:
                head[idx] = (gov_verb, "obl")
            continue
        if tok.pos == "ADV":
            gov = _prev_index(tokens, i, {"VERB", "AUX"}) or _next_index(tokens, i, {"VERB", "AUX"})
            head[idx] = (gov, "dep") if gov is not None else (root, "dep")
            continue
        if tok.pos == "CCONJ":
            head[idx] = (root, "dep")
            continue
        head[idx] = (root, "dep")

    # pre-root nominal closest to the root becomes its subject, unless it is
    # already bound tighter (appositive, prepositional object, conjunct)
    pre_root = [t for t in tokens if t.index < root and is_nominal(t)
                and head.get(t.index, (None, ""))[1] not in ("appos", "pobj", "conj")]
    if pre_root and by_index[root].pos in ("VERB", "AUX"):
        subj = pre_root[-1]
        head[subj.index] = (root, "nsubj")

    # safety: break any accidental cycle by re-rooting the offender
    for idx in list(head):
        seen = {idx}
        cur = idx
        while cur in head:
            cur = head[cur][0]
            if cur in seen:
                head[idx] = (root, "dep")
                break
            seen.add(cur)

    edges = [(h, d, label) for d, (h, label) in sorted(head.items())]
    return DependencyGraph(sentence_index, list(tokens), edges, root)


def analyze_sentence(token_triples: list[tuple[str, int, int]],
                     sentence_index: int = 0) -> DependencyGraph:
    """Tag, lemmatize and parse one tokenized sentence."""
    tokens = [Token(index=i, text=t, span=(s, e))
              for i, (t, s, e) in enumerate(token_triples)]
    pos_tag(tokens)
    for tok in tokens:
        lemmatize(tok)
    return parse_dependencies(tokens, sentence_index)


def load_conllu(text: str) -> list[DependencyGraph]:
    """Parse CoNLL-U content into dependency graphs.

    Uses columns ID/FORM/LEMMA/UPOS/HEAD/DEPREL; unknown UPOS tags map to X,
    unknown relations to ``dep``. Multiword-token and empty-node lines are
    skipped.
    """
    graphs: list[DependencyGraph] = []
    rows: list[list[str]] = []

    def flush():
        nonlocal rows
        if not rows:
            return
        tokens: list[Token] = []
        edges: list[tuple[int, int, str]] = []
        root = 0
        offset = 0
        heads: list[tuple[int, int, str]] = []
        for cols in rows:
            tid = int(cols[0]) - 1
            form, lemma, upos = cols[1], cols[2], cols[3]
            head, deprel = int(cols[6]), cols[7]
            tok = Token(index=tid, text=form, span=(offset, offset + len(form)),
                        pos=upos if upos in TAGS else "X",
                        lemma=lemma if lemma and lemma != "_" else form)
            offset += len(form) + 1
            tokens.append(tok)
            heads.append((tid, head, deprel))
        for tid, head, deprel in heads:
            if head == 0:
                root = tid
            else:
                label = deprel.split(":")[0]
                edges.append((head - 1, tid, label if label in DEP_LABELS else "dep"))
        graphs.append(DependencyGraph(len(graphs), tokens, edges, root))
        rows = []

    for line in text.splitlines():
        line = line.strip("\n")
        if not line.strip():
            flush()
            continue
        if line.startswith("#"):
            continue
        cols = line.split("\t")
        if len(cols) < 8 or "-" in cols[0] or "." in cols[0]:
            continue
        rows.append(cols)
    flush()
    return graphs


def ingest_conllu(path: str, sentences: list[list[tuple[str, int, int]]] | None = None
                  ) -> list[DependencyGraph]:
    """Load graphs from a CoNLL-U file, optionally aligning spans to our
    tokenizer output (token texts must match exactly)."""
    with open(path, encoding="utf-8") as fh:
        graphs = load_conllu(fh.read())
    if sentences is not None:
        if len(graphs) != len(sentences):
            raise AlignmentError(
                f"sentence count mismatch: conllu has {len(graphs)}, got {len(sentences)}")
        for si, (graph, toks) in enumerate(zip(graphs, sentences)):
            if len(graph.nodes) != len(toks):
                raise AlignmentError(f"token count mismatch in sentence {si}")
            for node, (text, s, e) in zip(graph.nodes, toks):
                if node.text != text:
                    raise AlignmentError(
                        f"token mismatch in sentence {si}: {node.text!r} != {text!r}")
                node.span = (s, e)
    return graphs
