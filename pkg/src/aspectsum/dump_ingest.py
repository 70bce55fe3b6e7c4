"""Streaming ingestion of MediaWiki pages-articles XML dumps.

Parses pages one at a time in constant memory (plain or bz2-compressed),
strips wiki markup down to plain text, and carves each page into lead text
plus a tree of sections.

Malformed markup inside a page is never fatal: unbalanced constructs are
consumed to end-of-text and tallied in a diagnostics counter. Malformed
XML is fatal and reported with an approximate byte offset.
"""

from __future__ import annotations

import bz2
import html
import re
import unicodedata
import xml.etree.ElementTree as ET
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Iterator

# Section headings whose whole subtree is boilerplate, not article content.
STRUCTURAL_HEADINGS = frozenset({
    "references", "see also", "external links", "further reading", "bibliography",
})

_LIST_MARKERS = "*#;:"

_REDIRECT_RE = re.compile(r"\s*#REDIRECT", re.IGNORECASE)
_HEADING_RE = re.compile(r"^(=+)\s*(.*?)\s*(=+)\s*$")
_COMMENT_RE = re.compile(r"<!--.*?-->", re.DOTALL)
_REF_RE = re.compile(r"<ref[^<>/]*/\s*>|<ref[^<>]*>.*?</\s*ref\s*>", re.DOTALL | re.IGNORECASE)
_UNCLOSED_REF_RE = re.compile(r"<ref[^<>]*>", re.IGNORECASE)
_TAG_RE = re.compile(r"<[^<>]+>")
_WIKILINK_RE = re.compile(r"\[\[([^\[\]]*)\]\]")
_EXTLINK_LABELED_RE = re.compile(r"\[(?:https?|ftp)://[^\]\s]*[ \t]+([^\]]*)\]", re.IGNORECASE)
_EXTLINK_BARE_RE = re.compile(r"\[(?:https?|ftp)://[^\]\s]*\]", re.IGNORECASE)
_QUOTE_RUN_RE = re.compile(r"''+")
_DROPPED_LINK_RE = re.compile(r"(?:file|image|category)\s*:", re.IGNORECASE)


class DumpFormatError(Exception):
    """The XML stream itself is malformed (not just a page's wikitext)."""


@dataclass(frozen=True)
class RawPage:
    page_id: int
    title: str
    namespace: int
    is_redirect: bool
    wikitext: str


@dataclass(frozen=True)
class SectionNode:
    heading: str
    depth: int  # 1 for top-level sections; children are parent depth + 1
    raw_text: str  # the section's own text, heading line excluded
    children: tuple["SectionNode", ...]


@dataclass(frozen=True)
class CleanPage:
    page_id: int
    title: str
    abstract_text: str  # content before the first heading
    sections: tuple[SectionNode, ...]


class _CountingReader:
    """File-like wrapper that tracks how many bytes were handed out."""

    def __init__(self, stream: IO[bytes]):
        self._stream = stream
        self.bytes_read = 0

    def read(self, size: int = -1) -> bytes:
        data = self._stream.read(size)
        self.bytes_read += len(data)
        return data


def _local(tag: str) -> str:
    return tag.rpartition("}")[2]


def _open_dump(path: Path) -> IO[bytes]:
    raw = open(path, "rb")
    magic = raw.read(3)
    raw.seek(0)
    if magic == b"BZh":
        return bz2.BZ2File(raw)
    return raw


def stream_pages(path: str | Path) -> Iterator[RawPage]:
    """Yield every page in the dump, in file order, in constant memory."""
    reader = _CountingReader(_open_dump(Path(path)))
    try:
        context = ET.iterparse(reader, events=("start", "end"))
        _, root = next(context)
        for event, elem in context:
            if event == "end" and _local(elem.tag) == "page":
                yield _extract_page(elem)
                root.clear()
    except ET.ParseError as exc:
        raise DumpFormatError(
            f"malformed XML near byte offset {reader.bytes_read}: {exc}"
        ) from exc


def _extract_page(elem: ET.Element) -> RawPage:
    title = ""
    namespace = 0
    page_id = -1
    is_redirect = False
    text = ""
    for child in elem:
        name = _local(child.tag)
        if name == "title":
            title = child.text or ""
        elif name == "ns":
            namespace = int(child.text or 0)
        elif name == "id" and page_id < 0:
            page_id = int(child.text or -1)
        elif name == "redirect":
            is_redirect = True
        elif name == "revision":
            for sub in child:
                if _local(sub.tag) == "text":
                    text = sub.text or ""
    return RawPage(page_id=page_id, title=title, namespace=namespace,
                   is_redirect=is_redirect, wikitext=text)


def _drop_nested(text: str, open_tok: str, close_tok: str,
                 counters: Counter, key: str) -> str:
    """Remove balanced open/close spans (nesting-aware). An unmatched open
    consumes to end-of-text and bumps the diagnostics counter."""
    if open_tok not in text:
        return text
    out: list[str] = []
    i = 0
    depth = 0
    n = len(text)
    while i < n:
        if text.startswith(open_tok, i):
            depth += 1
            i += len(open_tok)
        elif depth and text.startswith(close_tok, i):
            depth -= 1
            i += len(close_tok)
        elif depth:
            i += 1
        else:
            j = text.find(open_tok, i)
            if j < 0:
                out.append(text[i:])
                break
            out.append(text[i:j])
            i = j
            continue
    if depth:
        counters[key] += 1
    return "".join(out)


def _drop_special_links(text: str, counters: Counter) -> str:
    """Remove [[File:...]], [[Image:...]], [[Category:...]] entirely,
    including nested brackets inside captions."""
    out: list[str] = []
    i = 0
    n = len(text)
    while i < n:
        j = text.find("[[", i)
        if j < 0:
            out.append(text[i:])
            break
        if not _DROPPED_LINK_RE.match(text, j + 2):
            out.append(text[i:j + 2])
            i = j + 2
            continue
        out.append(text[i:j])
        depth = 1
        k = j + 2
        while k < n and depth:
            if text.startswith("[[", k):
                depth += 1
                k += 2
            elif text.startswith("]]", k):
                depth -= 1
                k += 2
            else:
                k += 1
        if depth:
            counters["unbalanced_link"] += 1
        i = k
    return "".join(out)


def _replace_wikilinks(text: str, counters: Counter) -> str:
    """[[target|label]] -> label, [[target]] -> target, innermost first.
    A dangling "[[" (no closing brackets) consumes to end-of-text."""
    def repl(match: re.Match) -> str:
        inner = match.group(1)
        _, pipe, label = inner.partition("|")
        return label if pipe else inner

    while True:
        text, count = _WIKILINK_RE.subn(repl, text)
        if not count:
            break
    head, sep, _ = text.partition("[[")
    if sep:
        counters["unbalanced_link"] += 1
        return head
    return text


def _strip_inline_markup(text: str, counters: Counter) -> str:
    text = unicodedata.normalize("NFC", html.unescape(text))
    if "<!--" in text:
        text = _COMMENT_RE.sub("", text)
        head, sep, _ = text.partition("<!--")
        if sep:
            counters["unclosed_comment"] += 1
            text = head
    text = _REF_RE.sub("", text)
    match = _UNCLOSED_REF_RE.search(text)
    if match:
        counters["unclosed_ref"] += 1
        text = text[:match.start()]
    text = _drop_nested(text, "{{", "}}", counters, "unbalanced_template")
    text = _drop_nested(text, "{|", "|}", counters, "unbalanced_table")
    text = _drop_special_links(text, counters)
    text = _replace_wikilinks(text, counters)
    text = _EXTLINK_LABELED_RE.sub(lambda m: m.group(1), text)
    text = _EXTLINK_BARE_RE.sub("", text)
    text = _TAG_RE.sub(" ", text)
    text = _QUOTE_RUN_RE.sub("", text)
    return text


class _TempNode:
    __slots__ = ("heading", "depth", "lines", "children")

    def __init__(self, heading: str, depth: int):
        self.heading = heading
        self.depth = depth
        self.lines: list[str] = []
        self.children: list[_TempNode] = []

    def freeze(self) -> SectionNode:
        return SectionNode(
            heading=self.heading,
            depth=self.depth,
            raw_text="\n".join(self.lines),
            children=tuple(child.freeze() for child in self.children),
        )


def strip_markup(wikitext: str,
                 counters: Counter | None = None) -> tuple[str, tuple[SectionNode, ...]]:
    """Reduce wikitext to plain text carved at heading boundaries.

    Returns (lead text, top-level section nodes). Heading lines are section
    boundaries, never section text. A heading nested deeper than its parent
    allows is clamped to parent depth + 1.
    """
    if counters is None:
        counters = Counter()
    text = _strip_inline_markup(wikitext, counters)
    lead_lines: list[str] = []
    roots: list[_TempNode] = []
    stack: list[_TempNode] = []
    for line in text.split("\n"):
        match = _HEADING_RE.match(line.strip())
        if match and match.group(2):
            level = min(len(match.group(1)), len(match.group(3)))
            target = max(level - 1, 1)
            while stack and stack[-1].depth >= target:
                stack.pop()
            depth = min(target, (stack[-1].depth if stack else 0) + 1)
            node = _TempNode(heading=match.group(2), depth=depth)
            if stack:
                stack[-1].children.append(node)
            else:
                roots.append(node)
            stack.append(node)
        elif stack:
            stack[-1].lines.append(line)
        else:
            lead_lines.append(line)
    return "\n".join(lead_lines), tuple(node.freeze() for node in roots)


def remove_list_lines(text: str, counters: Counter | None = None) -> str:
    """Drop every line that starts (after trimming) with *, #, ; or :."""
    if counters is None:
        counters = Counter()
    kept: list[str] = []
    for line in text.split("\n"):
        stripped = line.lstrip()
        if stripped and stripped[0] in _LIST_MARKERS:
            counters["removed_list_lines"] += 1
        else:
            kept.append(line)
    return "\n".join(kept)


def drop_structural(sections: tuple[SectionNode, ...],
                    counters: Counter | None = None) -> tuple[SectionNode, ...]:
    """Remove structural sections (with their subtrees) and item-list lines."""
    if counters is None:
        counters = Counter()
    kept: list[SectionNode] = []
    for node in sections:
        if node.heading.strip().lower() in STRUCTURAL_HEADINGS:
            counters["removed_structural_sections"] += 1 + _subtree_size(node.children)
            continue
        kept.append(SectionNode(
            heading=node.heading,
            depth=node.depth,
            raw_text=remove_list_lines(node.raw_text, counters),
            children=drop_structural(node.children, counters),
        ))
    return tuple(kept)


def _subtree_size(nodes: tuple[SectionNode, ...]) -> int:
    return sum(1 + _subtree_size(node.children) for node in nodes)


def _any_section_text(nodes: tuple[SectionNode, ...]) -> bool:
    return any(node.raw_text.strip() or _any_section_text(node.children)
               for node in nodes)


def to_clean_page(raw: RawPage, counters: Counter | None = None) -> CleanPage | None:
    """Clean one page; None (with a tallied reason) when it contributes
    nothing to the corpus."""
    if counters is None:
        counters = Counter()
    if raw.namespace != 0:
        counters["dropped_namespace"] += 1
        return None
    if raw.is_redirect or _REDIRECT_RE.match(raw.wikitext):
        counters["dropped_redirect"] += 1
        return None
    lead, sections = strip_markup(raw.wikitext, counters)
    sections = drop_structural(sections, counters)
    lead = remove_list_lines(lead, counters)
    if not lead.strip():
        counters["dropped_empty_abstract"] += 1
        return None
    if not _any_section_text(sections):
        counters["dropped_empty_body"] += 1
        return None
    counters["pages_kept"] += 1
    return CleanPage(page_id=raw.page_id, title=raw.title,
                     abstract_text=lead, sections=sections)


def clean_pages(path: str | Path, counters: Counter | None = None,
                max_pages: int | None = None) -> Iterator[CleanPage]:
    """Stream, clean, and filter pages. ``max_pages`` caps *kept* pages."""
    kept = 0
    for raw in stream_pages(path):
        page = to_clean_page(raw, counters)
        if page is not None:
            yield page
            kept += 1
            if max_pages is not None and kept >= max_pages:
                return
