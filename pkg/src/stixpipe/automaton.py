"""Aho-Corasick multi-pattern string matching with span reporting.

The automaton is built once from a pattern set and is immutable afterwards,
so a compiled instance can be shared freely across threads. Matching is a
single pass over the text: time is O(len(text) + number of matches) for a
fixed pattern set.
"""

from __future__ import annotations

from collections import deque


def fold(s: str) -> str:
    """Length-preserving lowercase used for case-insensitive matching.

    Characters whose lowercase form changes the string length (a handful of
    Unicode oddities) are kept as-is so that match spans always index the
    original text.
    """
    out = []
    for ch in s:
        low = ch.lower()
        out.append(low if len(low) == 1 else ch)
    return "".join(out)


class Automaton:
    """Classic Aho-Corasick automaton over case-folded patterns."""

    def __init__(self, patterns: dict[str, object] | None = None):
        # state 0 is the root; goto maps (state, char) via per-state dicts
        self._goto: list[dict[str, int]] = [{}]
        self._fail: list[int] = [0]
        self._out: list[list[int]] = [[]]
        self._patterns: list[str] = []
        self._values: list[object] = []
        self._built = False
        if patterns:
            for pat, value in patterns.items():
                self.add(pat, value)
            self.build()

    def __len__(self) -> int:
        return len(self._patterns)

    @property
    def patterns(self) -> tuple[str, ...]:
        return tuple(self._patterns)

    def add(self, pattern: str, value: object = None) -> None:
        if self._built:
            raise RuntimeError("automaton already built")
        if not pattern:
            raise ValueError("empty pattern")
        folded = fold(pattern)
        state = 0
        for ch in folded:
            nxt = self._goto[state].get(ch)
            if nxt is None:
                nxt = len(self._goto)
                self._goto.append({})
                self._fail.append(0)
                self._out.append([])
                self._goto[state][ch] = nxt
            state = nxt
        idx = len(self._patterns)
        self._patterns.append(folded)
        self._values.append(value)
        self._out[state].append(idx)

    def build(self) -> None:
        """Compute failure links breadth-first."""
        queue: deque[int] = deque()
        for state in self._goto[0].values():
            self._fail[state] = 0
            queue.append(state)
        while queue:
            state = queue.popleft()
            for ch, nxt in self._goto[state].items():
                queue.append(nxt)
                f = self._fail[state]
                while f and ch not in self._goto[f]:
                    f = self._fail[f]
                self._fail[nxt] = self._goto[f].get(ch, 0)
                if self._fail[nxt] == nxt:
                    self._fail[nxt] = 0
                self._out[nxt] = self._out[nxt] + self._out[self._fail[nxt]]
        self._built = True

    def iter(self, text: str):
        """Yield (start, end, pattern, value) for every occurrence in ``text``.

        Matching is case-insensitive; spans index the text as given.
        """
        if not self._built:
            raise RuntimeError("automaton not built")
        folded = fold(text)
        state = 0
        for i, ch in enumerate(folded):
            while state and ch not in self._goto[state]:
                state = self._fail[state]
            state = self._goto[state].get(ch, 0)
            for idx in self._out[state]:
                pat = self._patterns[idx]
                yield i - len(pat) + 1, i + 1, pat, self._values[idx]
