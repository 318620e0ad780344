"""Report text normalization: HTML stripping, edit-tracked cleanup, refanging,
sentence segmentation and tokenization.

All downstream modules operate on :class:`NormalizedText`; spans everywhere in
the pipeline index into its ``text`` attribute. ``offset_map`` maps each
normalized character back to the offset of the character it came from in the
input string (for HTML documents, the input of :func:`normalize` is the output
of :func:`strip_html`).
"""

from __future__ import annotations

import html as _html
import re
import unicodedata
from dataclasses import dataclass, field, replace
from enum import Enum


class DecodeError(ValueError):
    """Raised when a document's bytes are not valid UTF-8."""


class DocFormat(Enum):
    PLAIN_TEXT = "text"
    HTML = "html"


@dataclass(frozen=True)
class RawDocument:
    id: str
    content: bytes
    format: DocFormat = DocFormat.PLAIN_TEXT

    def decoded(self) -> str:
        try:
            return self.content.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise DecodeError(f"document {self.id!r} is not valid UTF-8: {exc}") from exc


@dataclass(frozen=True)
class RefangEdit:
    """One refang replacement: ``span`` indexes the final normalized text."""

    span: tuple[int, int]
    original: str
    replacement: str


@dataclass(frozen=True)
class NormalizedText:
    text: str
    sentences: tuple[tuple[int, int], ...] = ()
    offset_map: tuple[int, ...] = ()
    refang_log: tuple[RefangEdit, ...] = ()

    def sentence_at(self, offset: int) -> int | None:
        """Index of the sentence containing ``offset``, or None."""
        for i, (s, e) in enumerate(self.sentences):
            if s <= offset < e:
                return i
        return None


# Fixed, ordered refang rule table. Applied case-insensitively, first rule first.
REFANG_RULES: tuple[tuple[str, str], ...] = (
    ("hxxp", "http"),
    ("hXXp", "http"),
    ("[.]", "."),
    ("(.)", "."),
    ("[dot]", "."),
    ("[at]", "@"),
    ("[@]", "@"),
    ("[:]", ":"),
    ("[://]", "://"),
)

_BLOCK_TAGS = {
    "p", "div", "br", "li", "ul", "ol", "table", "tr", "td", "th",
    "h1", "h2", "h3", "h4", "h5", "h6", "blockquote", "pre", "section",
    "article", "header", "footer", "title",
}

_SCRIPT_RE = re.compile(r"<(script|style)\b[^>]*>.*?</\1\s*>", re.IGNORECASE | re.DOTALL)
_COMMENT_RE = re.compile(r"<!--.*?-->", re.DOTALL)
_TAG_RE = re.compile(r"</?([a-zA-Z][a-zA-Z0-9-]*)[^>]*>")


def strip_html(doc: RawDocument) -> str:
    """Best-effort extraction of visible text from simple HTML.

    Script/style contents are dropped, closing block-level tags (and <br>)
    become newlines, all other tags are removed, entities are decoded.
    Malformed or unclosed tags are tolerated.
    """
    if doc.format is not DocFormat.HTML:
        raise ValueError("strip_html expects an HTML document")
    text = doc.decoded()
    text = _SCRIPT_RE.sub("", text)
    text = _COMMENT_RE.sub("", text)

    def _tag(m: re.Match) -> str:
        name = m.group(1).lower()
        closing = m.group(0).startswith("</")
        if name == "br" or (closing and name in _BLOCK_TAGS):
            return "\n"
        return ""

    text = _TAG_RE.sub(_tag, text)
    return _html.unescape(text)


class _Cell:
    """One character of the working text plus its provenance."""

    __slots__ = ("char", "src", "tag")

    def __init__(self, char: str, src: int, tag: int | None = None):
        self.char = char
        self.src = src
        self.tag = tag


def _nfc_cells(text: str) -> list[_Cell]:
    # Cluster-wise NFC keeps a per-character source map: each composed cluster
    # maps all its output characters to the cluster's first input offset.
    cells: list[_Cell] = []
    i = 0
    n = len(text)
    while i < n:
        j = i + 1
        while j < n and unicodedata.combining(text[j]):
            j += 1
        cluster = unicodedata.normalize("NFC", text[i:j])
        for ch in cluster:
            cells.append(_Cell(ch, i))
        i = j
    return cells


_DEHYPHEN_RE = re.compile(r"[^\W\d_]-\n[^\W\d_]", re.UNICODE)


def normalize(text: str) -> NormalizedText:
    """Clean raw report text, tracking every edit.

    In order: NFC normalization, CRLF -> LF, de-hyphenation of line-broken
    words, collapse of 3+ newlines to 2, refanging per REFANG_RULES. The
    returned ``offset_map`` is monotone non-decreasing and maps normalized
    offsets to offsets of ``text``.
    """
    cells = _nfc_cells(text)

    # CRLF -> LF
    out: list[_Cell] = []
    i = 0
    while i < len(cells):
        if cells[i].char == "\r" and i + 1 < len(cells) and cells[i + 1].char == "\n":
            out.append(cells[i + 1])
            i += 2
        else:
            out.append(cells[i])
            i += 1
    cells = out

    # de-hyphenation: letter '-' '\n' letter  ->  drop the '-\n'
    s = "".join(c.char for c in cells)
    drop: set[int] = set()
    for m in _DEHYPHEN_RE.finditer(s):
        drop.add(m.start() + 1)
        drop.add(m.start() + 2)
    cells = [c for k, c in enumerate(cells) if k not in drop]

    # collapse runs of 3+ newlines to 2
    out = []
    run = 0
    for c in cells:
        if c.char == "\n":
            run += 1
            if run > 2:
                continue
        else:
            run = 0
        out.append(c)
    cells = out

    # refanging, rule table order; replacement cells tagged with a log id
    log: list[tuple[str, str]] = []
    for pattern, repl in REFANG_RULES:
        pat = re.compile(re.escape(pattern), re.IGNORECASE)
        while True:
            s = "".join(c.char for c in cells)
            m = pat.search(s)
            if m is None:
                break
            tag = len(log)
            log.append((m.group(0), repl))
            span_cells = cells[m.start():m.end()]
            new = [_Cell(ch, span_cells[min(k, len(span_cells) - 1)].src, tag)
                   for k, ch in enumerate(repl)]
            cells[m.start():m.end()] = new

    final_text = "".join(c.char for c in cells)
    offset_map = tuple(c.src for c in cells)

    spans: dict[int, list[int]] = {}
    for k, c in enumerate(cells):
        if c.tag is not None:
            spans.setdefault(c.tag, []).append(k)
    refang_log = tuple(
        RefangEdit((min(ks), max(ks) + 1), log[tag][0], log[tag][1])
        for tag, ks in sorted(spans.items(), key=lambda kv: min(kv[1]))
    )
    return NormalizedText(text=final_text, offset_map=offset_map, refang_log=refang_log)


_ABBREVIATIONS = {"e.g", "i.e", "etc", "mr", "mrs", "dr", "no", "vs", "fig", "al"}

_SENT_PUNCT = ".!?"


def split_sentences(nt: NormalizedText) -> NormalizedText:
    """Populate sentence spans on a normalized text.

    Boundary at ., ! or ? followed by whitespace and an uppercase letter,
    digit or end of text; suppressed for known abbreviations, for periods
    inside refang replacements and for periods flanked by non-space on both
    sides (IOC-like tokens). A blank line also ends a sentence.
    """
    text = nt.text
    n = len(text)
    if not text.strip():
        return replace(nt, sentences=())

    refang_spans = [e.span for e in nt.refang_log]

    def in_refang(i: int) -> bool:
        return any(s <= i < e for s, e in refang_spans)

    boundaries: list[int] = []  # index one past the sentence-final character
    i = 0
    while i < n:
        ch = text[i]
        if ch in _SENT_PUNCT:
            nxt = i + 1
            while nxt < n and text[nxt] in " \t\n":
                nxt += 1
            at_eof = nxt >= n
            follows = at_eof or (
                nxt > i + 1 and (text[nxt].isupper() or text[nxt].isdigit())
            )
            if follows and not in_refang(i):
                ok = True
                if ch == "." and i + 1 < n and text[i + 1] not in " \t\n":
                    ok = False  # mid-token period (192.168.1.1, evil.com)
                if ch == ".":
                    m = re.search(r"[\w.]+$", text[:i])
                    if m and m.group(0).lower().rstrip(".") in _ABBREVIATIONS:
                        ok = False
                if ok:
                    boundaries.append(i + 1)
        elif ch == "\n":
            j = i
            while j < n and text[j] == "\n":
                j += 1
            if j - i >= 2 or j >= n:
                boundaries.append(i)
            i = j - 1
        i += 1

    sentences: list[tuple[int, int]] = []
    start = 0
    for b in boundaries + [n]:
        seg = text[start:b]
        lead = len(seg) - len(seg.lstrip())
        trail = len(seg) - len(seg.rstrip())
        if seg.strip():
            sentences.append((start + lead, b - trail))
        start = b
    return replace(nt, sentences=tuple(sentences))


_PUNCT_STRIP = ".,;:!?\"'()[]{}<>«»“”‘’"


def tokenize(nt: NormalizedText, sentence: tuple[int, int]) -> list[tuple[str, int, int]]:
    """Tokenize one sentence span of ``nt``.

    Whitespace splitting, then leading/trailing punctuation split into
    separate one-character tokens. Internal punctuation (dots, slashes, @,
    hyphens) stays inside the token, which keeps IOC-like tokens intact.
    Returned spans are absolute offsets into ``nt.text``.
    """
    s, e = sentence
    tokens: list[tuple[str, int, int]] = []
    for m in re.finditer(r"\S+", nt.text[s:e]):
        start = s + m.start()
        word = m.group(0)
        lo, hi = 0, len(word)
        lead: list[int] = []
        while lo < hi and word[lo] in _PUNCT_STRIP:
            lead.append(lo)
            lo += 1
        trail: list[int] = []
        while hi > lo and word[hi - 1] in _PUNCT_STRIP:
            trail.append(hi - 1)
            hi -= 1
        for k in lead:
            tokens.append((word[k], start + k, start + k + 1))
        if hi > lo:
            tokens.append((word[lo:hi], start + lo, start + hi))
        for k in reversed(trail):
            tokens.append((word[k], start + k, start + k + 1))
    return tokens
