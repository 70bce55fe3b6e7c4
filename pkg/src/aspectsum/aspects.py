"""Constructing aspect-based summarization instances from cleaned pages.

Each section of a page (at any nesting depth, provided its subtree has any
text) is an *aspect*, labeled by its heading path. Abstract sentences are
greedily mapped onto the page body once; each abstract sentence is then
scored against the part of its mapped set that falls inside an aspect's
subtree, and sentences scoring at or above the threshold form that
aspect's summary. The instance's document is the whole page body.

All scores are exact rationals so that selection and tie-breaking are
identical across platforms, worker counts, and runs.
"""

from __future__ import annotations

import json
import random
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .dump_ingest import CleanPage, SectionNode
from .segmentation import Sentence, split_sentences
from .rouge import rouge1_recall_against_set

ASPECT_PATH_SEPARATOR = " ; "

SPLIT_NAMES = ("train", "valid", "test")
DEFAULT_SPLIT_RATIOS = (0.94, 0.03, 0.03)
DEFAULT_SPLIT_SEED = 13
DEFAULT_THRESHOLD = Fraction(1, 2)


def _tokens_of(item) -> Sequence[str]:
    return getattr(item, "tokens", item)


@dataclass(frozen=True)
class BuildConfig:
    threshold: Fraction = DEFAULT_THRESHOLD
    split_ratios: tuple[float, float, float] = DEFAULT_SPLIT_RATIOS
    split_seed: int = DEFAULT_SPLIT_SEED


@dataclass(frozen=True)
class GreedyStep:
    chosen: int  # candidate sentence index
    improvement: Fraction  # strictly positive recall gain


@dataclass(frozen=True)
class GreedyMapTrace:
    abstract_index: int
    mapped: tuple[int, ...]  # candidate indices in pick order
    final_score: Fraction
    steps: tuple[GreedyStep, ...]


@dataclass(frozen=True)
class Aspect:
    ordinal: int  # position among the page's aspects, pre-order
    label: str  # headings of ancestors and self, path-joined
    start: int  # [start, end) span of body sentences in the subtree
    end: int


@dataclass(frozen=True)
class PageScores:
    """Everything threshold filtering needs, computed once per page so a
    sweep over several thresholds never re-runs the mapping."""

    page_id: int
    page_title: str
    abstract: tuple[Sentence, ...]
    body: tuple[Sentence, ...]
    aspects: tuple[Aspect, ...]
    traces: tuple[GreedyMapTrace, ...]  # one per abstract sentence
    scores: tuple[tuple[Fraction, ...], ...]  # [aspect][abstract sentence]


@dataclass(frozen=True)
class AspectInstance:
    instance_id: str
    page_id: int
    page_title: str
    aspect: str
    document: str  # whole page body, sentences joined in document order
    summary_sentences: tuple[str, ...]
    sentence_scores: tuple[Fraction, ...]  # one per summary sentence
    split: str


def greedy_map(x, candidates: Sequence, abstract_index: int = 0) -> GreedyMapTrace:
    """Greedily pick candidate sentences while each pick strictly raises
    the unigram recall of x against the picked pool.

    Each round scans candidates in document order and a later candidate
    must *beat* the current best, so ties go to the earliest sentence.
    Gains are compared as integer coverage increments, which is exact.
    """
    x_tokens = _tokens_of(x)
    total = len(x_tokens)
    if total == 0:
        return GreedyMapTrace(abstract_index=abstract_index, mapped=(),
                              final_score=Fraction(0), steps=())
    x_counts = Counter(x_tokens)
    restricted = [
        Counter(tok for tok in _tokens_of(cand) if tok in x_counts)
        for cand in candidates
    ]
    pool: Counter = Counter()
    mapped: list[int] = []
    chosen_set: set[int] = set()
    steps: list[GreedyStep] = []
    score = Fraction(0)
    while True:
        best_index = -1
        best_gain = 0
        for i, cand in enumerate(restricted):
            if not cand or i in chosen_set:
                continue
            gain = 0
            for tok, count in cand.items():
                missing = x_counts[tok] - pool[tok]
                if missing > 0:
                    gain += count if count < missing else missing
            if gain > best_gain:
                best_gain = gain
                best_index = i
        if best_index < 0:
            break
        pool.update(restricted[best_index])
        chosen_set.add(best_index)
        mapped.append(best_index)
        delta = Fraction(best_gain, total)
        score += delta
        steps.append(GreedyStep(chosen=best_index, improvement=delta))
    return GreedyMapTrace(abstract_index=abstract_index, mapped=tuple(mapped),
                          final_score=score, steps=tuple(steps))


def matching_score(x, aspect_sentences: Iterable[tuple[int, Sequence[str]]],
                   trace: GreedyMapTrace) -> Fraction:
    """Unigram recall of x against the aspect's share of its mapped set.

    ``aspect_sentences`` pairs each aspect sentence with its id in the
    candidate list the trace was computed over.
    """
    mapped = set(trace.mapped)
    inside = [tokens for i, tokens in aspect_sentences if i in mapped]
    return rouge1_recall_against_set(_tokens_of(x), inside)


def _walk_sections(nodes: Sequence[SectionNode], path: list[str],
                   body: list[Sentence], out: list[list]) -> None:
    for node in nodes:
        path.append(node.heading)
        entry = [ASPECT_PATH_SEPARATOR.join(path), len(body), len(body)]
        out.append(entry)
        body.extend(split_sentences(node.raw_text))
        _walk_sections(node.children, path, body, out)
        entry[2] = len(body)  # subtree end, now that descendants are flattened
        path.pop()


def collect_aspects(page: CleanPage) -> tuple[tuple[Sentence, ...], tuple[Aspect, ...]]:
    """Flatten the page body (pre-order) and derive one aspect per section
    whose subtree has any sentence.

    Returns the body sentences in page order and the aspects, each with a
    path label ("History ; Founding") and the contiguous body span covered
    by its subtree. Aspect ordinals follow pre-order document position
    (parents before children).
    """
    body: list[Sentence] = []
    spans: list[list] = []
    _walk_sections(page.sections, [], body, spans)
    aspects = []
    for label, start, end in spans:
        if end > start:
            aspects.append(Aspect(ordinal=len(aspects), label=label,
                                  start=start, end=end))
    return tuple(body), tuple(aspects)


def score_page(page: CleanPage) -> PageScores:
    """Run the greedy mapping once per abstract sentence and score every
    (aspect, abstract sentence) pair."""
    abstract = tuple(split_sentences(page.abstract_text))
    body, aspects = collect_aspects(page)
    body_tokens = [s.tokens for s in body]
    traces = tuple(greedy_map(x, body_tokens, abstract_index=i)
                   for i, x in enumerate(abstract))
    scores = []
    for aspect in aspects:
        inside_ids = range(aspect.start, aspect.end)
        pairs = [(i, body_tokens[i]) for i in inside_ids]
        scores.append(tuple(matching_score(x, pairs, trace)
                            for x, trace in zip(abstract, traces)))
    return PageScores(
        page_id=page.page_id,
        page_title=page.title,
        abstract=abstract,
        body=body,
        aspects=aspects,
        traces=traces,
        scores=tuple(scores),
    )


def build_instances(scores: PageScores, threshold: Fraction, split: str,
                    counters: Counter | None = None) -> list[AspectInstance]:
    """Apply the threshold to precomputed page scores.

    An aspect is emitted only when at least one abstract sentence reaches
    the threshold and the summary is not longer (in tokens) than the
    document (the whole page body).
    """
    if counters is None:
        counters = Counter()
    document = " ".join(s.text for s in scores.body)
    document_tokens = sum(len(s.tokens) for s in scores.body)
    out: list[AspectInstance] = []
    for aspect, row in zip(scores.aspects, scores.scores):
        chosen = [(x, s) for x, s in zip(scores.abstract, row) if s >= threshold]
        if not chosen:
            counters["skipped_no_summary"] += 1
            continue
        summary_tokens = sum(len(x.tokens) for x, _ in chosen)
        if summary_tokens > document_tokens:
            counters["skipped_summary_longer"] += 1
            continue
        counters["instances_kept"] += 1
        out.append(AspectInstance(
            instance_id=f"{scores.page_id}-{aspect.ordinal}",
            page_id=scores.page_id,
            page_title=scores.page_title,
            aspect=aspect.label,
            document=document,
            summary_sentences=tuple(x.text for x, _ in chosen),
            sentence_scores=tuple(s for _, s in chosen),
            split=split,
        ))
    return out


def page_instances(page: CleanPage, config: BuildConfig = BuildConfig(),
                   split: str = "train",
                   counters: Counter | None = None) -> list[AspectInstance]:
    return build_instances(score_page(page), config.threshold, split, counters)


def assign_splits(page_ids: Iterable[int],
                  ratios: Sequence[float] = DEFAULT_SPLIT_RATIOS,
                  seed: int = DEFAULT_SPLIT_SEED) -> dict[int, str]:
    """Deterministic page-level split assignment.

    Page ids are sorted, shuffled with a seeded generator, and cut into
    contiguous blocks at round(n * cumulative ratio). Every run with the
    same ids, ratios, and seed produces the same assignment.
    """
    if len(ratios) != len(SPLIT_NAMES):
        raise ValueError(f"expected {len(SPLIT_NAMES)} ratios, got {len(ratios)}")
    if abs(sum(ratios) - 1.0) > 1e-9:
        raise ValueError(f"split ratios must sum to 1, got {sum(ratios)}")
    ids = sorted(page_ids)
    random.Random(seed).shuffle(ids)
    n = len(ids)
    assignment: dict[int, str] = {}
    cumulative = 0.0
    start = 0
    for name, ratio in zip(SPLIT_NAMES, ratios):
        cumulative += ratio
        end = n if name == SPLIT_NAMES[-1] else round(n * cumulative)
        for page_id in ids[start:end]:
            assignment[page_id] = name
        start = end
    return assignment


def to_record(instance: AspectInstance) -> dict:
    """Plain-JSON form; scores serialize as exact fraction strings."""
    return {
        "instance_id": instance.instance_id,
        "page_id": instance.page_id,
        "page_title": instance.page_title,
        "aspect": instance.aspect,
        "document": instance.document,
        "summary_sentences": list(instance.summary_sentences),
        "sentence_scores": [str(s) for s in instance.sentence_scores],
        "split": instance.split,
    }


def from_record(record: Mapping) -> AspectInstance:
    return AspectInstance(
        instance_id=record["instance_id"],
        page_id=record["page_id"],
        page_title=record["page_title"],
        aspect=record["aspect"],
        document=record["document"],
        summary_sentences=tuple(record["summary_sentences"]),
        sentence_scores=tuple(Fraction(s) for s in record["sentence_scores"]),
        split=record["split"],
    )


def dump_record(instance: AspectInstance) -> str:
    return json.dumps(to_record(instance), ensure_ascii=False)


def load_record(line: str) -> AspectInstance:
    return from_record(json.loads(line))
