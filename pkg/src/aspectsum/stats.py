"""Corpus-level statistics: lengths, compression, novel n-grams, and
extractive-fragment coverage/density, with plot-ready CSV emission.

Aggregation is a mergeable single pass so shards can be reduced in any
order; finalize() sorts per-instance rows by instance id, making the
result independent of processing order.
"""

from __future__ import annotations

import csv
import json
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence

from .aspects import AspectInstance, from_record
from .segmentation import split_sentences, tokenize

Unit = object  # tokens (str) in unigram mode, token pairs in bigram mode


def novel_ngram_ratio(document_tokens: Sequence[str],
                      summary_tokens: Sequence[str], n: int) -> Fraction:
    """Share of the summary's unique n-grams that never occur in the
    document; 0 when the summary has no n-grams."""
    if n < 1:
        raise ValueError("n must be >= 1")
    summary_grams = {tuple(summary_tokens[i:i + n])
                     for i in range(len(summary_tokens) - n + 1)}
    if not summary_grams:
        return Fraction(0)
    document_grams = {tuple(document_tokens[i:i + n])
                      for i in range(len(document_tokens) - n + 1)}
    novel = sum(1 for gram in summary_grams if gram not in document_grams)
    return Fraction(novel, len(summary_grams))


def extractive_fragments(article_units: Sequence[Unit],
                         summary_units: Sequence[Unit]) -> list[tuple[Unit, ...]]:
    """Greedy left-to-right maximal shared fragments.

    At each summary position, take the longest run that appears anywhere
    in the article; otherwise advance one unit. Fragments never overlap in
    the summary.
    """
    fragments: list[tuple[Unit, ...]] = []
    s_len = len(summary_units)
    a_len = len(article_units)
    i = 0
    while i < s_len:
        best = 0
        for j in range(a_len):
            if summary_units[i] != article_units[j]:
                continue
            k = 1
            while (i + k < s_len and j + k < a_len
                   and summary_units[i + k] == article_units[j + k]):
                k += 1
            if k > best:
                best = k
        if best:
            fragments.append(tuple(summary_units[i:i + best]))
            i += best
        else:
            i += 1
    return fragments


def coverage_density(fragments: Sequence[Sequence[Unit]],
                     summary_unit_count: int) -> tuple[Fraction, Fraction]:
    """coverage = Σ|f| / |S|; density = Σ|f|² / |S|; (0, 0) for |S| = 0."""
    if summary_unit_count == 0:
        return Fraction(0), Fraction(0)
    coverage = Fraction(sum(len(f) for f in fragments), summary_unit_count)
    density = Fraction(sum(len(f) ** 2 for f in fragments), summary_unit_count)
    return coverage, density


def bigram_units(tokens: Sequence[str]) -> list[tuple[str, str]]:
    """Adjacent-token pairs; a summary of m tokens yields m-1 units."""
    return list(zip(tokens, tokens[1:]))


def compression_ratio(document_tokens: Sequence[str],
                      summary_tokens: Sequence[str]) -> Fraction:
    """Document length over summary length, in tokens. May be < 1."""
    if not summary_tokens:
        raise ValueError("compression ratio undefined for an empty summary")
    return Fraction(len(document_tokens), len(summary_tokens))


_LENGTH_KINDS = ("input_tokens", "input_sentences", "output_tokens", "output_sentences")
_NGRAM_ORDERS = (1, 2, 3, 4)


@dataclass(frozen=True)
class CorpusStats:
    instances: int
    pages: int
    per_split: dict[str, int]
    length_histograms: dict[str, Counter]
    mean_lengths: dict[str, Fraction]
    compression_ratios: list[Fraction]  # instance-id order
    novel_ngram_ratios: dict[int, Fraction]  # macro mean per n
    coverage_density_points: list[tuple[str, Fraction, Fraction]]  # bigram units
    aspect_frequency: Counter
    aspects_per_article: Counter  # instances-per-page histogram
    skipped_records: int


@dataclass
class StatsAccumulator:
    """Mergeable partial aggregate over instances."""

    instances: int = 0
    per_split: Counter = field(default_factory=Counter)
    length_histograms: dict[str, Counter] = field(
        default_factory=lambda: {kind: Counter() for kind in _LENGTH_KINDS})
    length_sums: Counter = field(default_factory=Counter)
    ratio_rows: list[tuple[str, Fraction]] = field(default_factory=list)
    novel_sums: dict[int, Fraction] = field(
        default_factory=lambda: {n: Fraction(0) for n in _NGRAM_ORDERS})
    novel_counts: Counter = field(default_factory=Counter)
    points: list[tuple[str, Fraction, Fraction]] = field(default_factory=list)
    aspect_frequency: Counter = field(default_factory=Counter)
    page_instances: Counter = field(default_factory=Counter)
    skipped_records: int = 0

    def add(self, instance: AspectInstance) -> None:
        doc_tokens = tokenize(instance.document)
        doc_sentences = len(split_sentences(instance.document))
        summary_text = " ".join(instance.summary_sentences)
        sum_tokens = tokenize(summary_text)
        lengths = {
            "input_tokens": len(doc_tokens),
            "input_sentences": doc_sentences,
            "output_tokens": len(sum_tokens),
            "output_sentences": len(instance.summary_sentences),
        }
        for kind, value in lengths.items():
            self.length_histograms[kind][value] += 1
            self.length_sums[kind] += value
        if sum_tokens:
            self.ratio_rows.append(
                (instance.instance_id, compression_ratio(doc_tokens, sum_tokens)))
        for n in _NGRAM_ORDERS:
            if len(sum_tokens) >= n:
                self.novel_sums[n] += novel_ngram_ratio(doc_tokens, sum_tokens, n)
                self.novel_counts[n] += 1
        doc_units = bigram_units(doc_tokens)
        sum_units = bigram_units(sum_tokens)
        cov, dens = coverage_density(
            extractive_fragments(doc_units, sum_units), len(sum_units))
        self.points.append((instance.instance_id, cov, dens))
        self.aspect_frequency[instance.aspect] += 1
        self.page_instances[instance.page_id] += 1
        self.per_split[instance.split] += 1
        self.instances += 1

    def merge(self, other: "StatsAccumulator") -> None:
        self.instances += other.instances
        self.per_split += other.per_split
        for kind in _LENGTH_KINDS:
            self.length_histograms[kind] += other.length_histograms[kind]
        self.length_sums += other.length_sums
        self.ratio_rows.extend(other.ratio_rows)
        for n in _NGRAM_ORDERS:
            self.novel_sums[n] += other.novel_sums[n]
        self.novel_counts += other.novel_counts
        self.points.extend(other.points)
        self.aspect_frequency += other.aspect_frequency
        self.page_instances += other.page_instances
        self.skipped_records += other.skipped_records

    def finalize(self) -> CorpusStats:
        ratio_rows = sorted(self.ratio_rows)
        points = sorted(self.points)
        mean_lengths = {
            kind: (Fraction(self.length_sums[kind], self.instances)
                   if self.instances else Fraction(0))
            for kind in _LENGTH_KINDS
        }
        novel = {
            n: (self.novel_sums[n] / self.novel_counts[n]
                if self.novel_counts[n] else Fraction(0))
            for n in _NGRAM_ORDERS
        }
        per_article = Counter(self.page_instances.values())
        return CorpusStats(
            instances=self.instances,
            pages=len(self.page_instances),
            per_split=dict(sorted(self.per_split.items())),
            length_histograms={k: Counter(v) for k, v in self.length_histograms.items()},
            mean_lengths=mean_lengths,
            compression_ratios=[r for _, r in ratio_rows],
            novel_ngram_ratios=novel,
            coverage_density_points=points,
            aspect_frequency=Counter(self.aspect_frequency),
            aspects_per_article=per_article,
            skipped_records=self.skipped_records,
        )


def aggregate(lines: Iterable[str]) -> StatsAccumulator:
    """Single-pass aggregation over corpus JSONL lines; unreadable records
    are skipped and counted."""
    acc = StatsAccumulator()
    for line in lines:
        if not line.strip():
            continue
        try:
            instance = from_record(json.loads(line))
        except (ValueError, KeyError, TypeError):
            acc.skipped_records += 1
            continue
        acc.add(instance)
    return acc


def aggregate_files(paths: Sequence[str | Path]) -> StatsAccumulator:
    acc = StatsAccumulator()
    for path in paths:
        with open(path, encoding="utf-8") as handle:
            acc.merge(aggregate(handle))
    return acc


def _central_mass(points: list[tuple[str, Fraction, Fraction]],
                  keep: float = 0.95) -> list[tuple[str, Fraction, Fraction]]:
    """Points whose coverage and density both lie inside the central
    ``keep`` mass of their own marginal distributions."""
    if not points:
        return []
    tail = (1.0 - keep) / 2.0

    def bounds(values: list[Fraction]) -> tuple[Fraction, Fraction]:
        ordered = sorted(values)
        lo = min(int(tail * len(ordered)), len(ordered) - 1)
        hi = max(len(ordered) - 1 - lo, lo)
        return ordered[lo], ordered[hi]

    cov_lo, cov_hi = bounds([c for _, c, _ in points])
    den_lo, den_hi = bounds([d for _, _, d in points])
    return [(i, c, d) for i, c, d in points
            if cov_lo <= c <= cov_hi and den_lo <= d <= den_hi]


def write_stats(stats: CorpusStats, outdir: str | Path) -> None:
    """Emit stats.json plus one CSV per figure-style distribution."""
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    top_aspects = stats.aspect_frequency.most_common(10)
    summary = {
        "instances": stats.instances,
        "pages": stats.pages,
        "per_split": stats.per_split,
        "mean_lengths": {k: float(v) for k, v in stats.mean_lengths.items()},
        "mean_compression_ratio": (
            float(sum(stats.compression_ratios) / len(stats.compression_ratios))
            if stats.compression_ratios else 0.0),
        "novel_ngram_percent": {
            str(n): float(v * 100) for n, v in stats.novel_ngram_ratios.items()},
        "mean_bigram_coverage": (
            float(sum(c for _, c, _ in stats.coverage_density_points)
                  / len(stats.coverage_density_points))
            if stats.coverage_density_points else 0.0),
        "mean_bigram_density": (
            float(sum(d for _, _, d in stats.coverage_density_points)
                  / len(stats.coverage_density_points))
            if stats.coverage_density_points else 0.0),
        "distinct_aspects": len(stats.aspect_frequency),
        "mean_aspects_per_article": (
            float(Fraction(stats.instances, stats.pages)) if stats.pages else 0.0),
        "top_aspects": [{"aspect": a, "count": c} for a, c in top_aspects],
        "skipped_records": stats.skipped_records,
    }
    (out / "stats.json").write_text(
        json.dumps(summary, ensure_ascii=False, indent=2) + "\n", encoding="utf-8")

    with open(out / "lengths_pdf.csv", "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["kind", "value", "count"])
        for kind in _LENGTH_KINDS:
            for value, count in sorted(stats.length_histograms[kind].items()):
                writer.writerow([kind, value, count])

    with open(out / "coverage_density.csv", "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["instance_id", "coverage", "density"])
        for instance_id, cov, dens in stats.coverage_density_points:
            writer.writerow([instance_id, float(cov), float(dens)])

    with open(out / "coverage_density_95.csv", "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["instance_id", "coverage", "density"])
        for instance_id, cov, dens in _central_mass(stats.coverage_density_points):
            writer.writerow([instance_id, float(cov), float(dens)])

    with open(out / "aspect_curve.csv", "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["rank", "aspect", "count", "cumulative_proportion"])
        total = sum(stats.aspect_frequency.values())
        running = 0
        ranked = sorted(stats.aspect_frequency.items(), key=lambda kv: (-kv[1], kv[0]))
        for rank, (aspect, count) in enumerate(ranked, start=1):
            running += count
            writer.writerow([rank, aspect, count,
                             float(Fraction(running, total))])

    with open(out / "aspects_per_article.csv", "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["aspects_per_article", "num_pages"])
        for value, count in sorted(stats.aspects_per_article.items()):
            writer.writerow([value, count])
