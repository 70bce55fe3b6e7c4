"""Deterministic sentence splitting and tokenization.

Every token or sentence count in this package — matching scores, length
statistics, ROUGE inputs, the summary-not-longer-than-document filter —
derives from these two functions, so their behavior is pinned by tests.
"""

from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass

_TOKEN_RE = re.compile(r"[^\W_]+")

# Words that end with a period without ending a sentence. Lowercased,
# trailing period included. Dotted initialisms ("U.S.") are also caught
# by the initials rule below.
_ABBREVIATIONS = frozenset({
    "mr.", "mrs.", "ms.", "dr.", "prof.", "st.", "jr.", "sr.", "rev.",
    "gen.", "col.", "lt.", "sgt.", "capt.", "hon.", "gov.", "sen.",
    "vs.", "etc.", "e.g.", "i.e.", "cf.", "ca.", "approx.", "no.",
    "vol.", "pp.", "p.", "fig.", "al.", "inc.", "ltd.", "co.", "corp.",
})

# Single capital + period, possibly repeated: "A.", "U.S.", "J.R.R."
_INITIALS_RE = re.compile(r"^(?:[A-Z]\.)+$")

# Terminal punctuation, optional closing quotes/brackets, then spacing.
_BOUNDARY_RE = re.compile(r"([.!?]+)([\"”'’)\]]*)[ \t]+")

_LAST_WORD_RE = re.compile(r"(\S+)$")

_SENTENCE_OPENERS = "\"“'‘("

# A split is never placed inside a balanced quote span whose contents are
# shorter than this many characters.
_MAX_PROTECTED_QUOTE = 40


@dataclass(frozen=True)
class Sentence:
    """A sentence with its lowercase token sequence."""

    text: str
    tokens: tuple[str, ...]


def tokenize(text: str) -> list[str]:
    """NFC-normalize, lowercase, and split on runs of non-alphanumerics.

    Digits count as alphanumeric; underscores do not. May return [].
    """
    normalized = unicodedata.normalize("NFC", text)
    return _TOKEN_RE.findall(normalized.lower())


def make_sentence(text: str) -> Sentence:
    return Sentence(text=text, tokens=tuple(tokenize(text)))


def split_sentences(text: str) -> list[Sentence]:
    """Split markup-free text into sentences.

    Newlines are hard boundaries. Within a line, a sentence ends at
    terminal punctuation followed by whitespace and an uppercase letter,
    digit, or opening quote, unless the preceding word is a known
    abbreviation or dotted initialism, or the boundary falls inside a
    short balanced quote. Sentences with no tokens are dropped.
    """
    sentences: list[Sentence] = []
    for line in text.split("\n"):
        sentences.extend(_split_line(line.strip()))
    return sentences


def _split_line(line: str) -> list[Sentence]:
    if not line:
        return []
    spans = _quote_spans(line)
    cuts: list[int] = []
    for match in _BOUNDARY_RE.finditer(line):
        nxt = match.end()
        if nxt >= len(line):
            continue
        lead = line[nxt]
        if not (lead.isupper() or lead.isdigit() or lead in _SENTENCE_OPENERS):
            continue
        word_match = _LAST_WORD_RE.search(line, 0, match.end(1))
        if word_match:
            word = word_match.group(1).lstrip("\"“'‘([")
            if word.lower() in _ABBREVIATIONS or _INITIALS_RE.match(word):
                continue
        # Boundary (after any closing quotes) still inside a protected span.
        boundary = match.end(2)
        punct = match.start(1)
        if any(open_ < punct and boundary <= close for open_, close in spans):
            continue
        cuts.append(nxt)
    pieces = []
    start = 0
    for cut in cuts:
        pieces.append(line[start:cut])
        start = cut
    pieces.append(line[start:])
    out = []
    for piece in pieces:
        sentence = make_sentence(piece.strip())
        if sentence.tokens:
            out.append(sentence)
    return out


def _quote_spans(line: str) -> list[tuple[int, int]]:
    """(open, close) index pairs of balanced short quotes in a line."""
    spans: list[tuple[int, int]] = []
    straight = [i for i, ch in enumerate(line) if ch == '"']
    for k in range(0, len(straight) - 1, 2):
        spans.append((straight[k], straight[k + 1]))
    opens: list[int] = []
    for i, ch in enumerate(line):
        if ch == "“":
            opens.append(i)
        elif ch == "”" and opens:
            spans.append((opens.pop(), i))
    return [(o, c) for o, c in spans if c - o - 1 < _MAX_PROTECTED_QUOTE]
