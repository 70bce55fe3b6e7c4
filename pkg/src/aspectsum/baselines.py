"""Heuristic and unsupervised extractive summarization baselines.

Every baseline returns an ExtractiveSelection: unique sentence indices in
document order plus the joined candidate text. Unless stated otherwise,
ties are broken toward the earlier document position, and the summary
budget n is the number of reference sentences.
"""

from __future__ import annotations

import math
import random
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .rouge import ngram_counts, overlap_count, f1_fraction
from .segmentation import Sentence

METHOD_NAMES = ("oracle", "lead", "random", "sumbasic", "textrank", "lexrank", "klsum")

PAGERANK_DAMPING = 0.85
PAGERANK_TOL = 1e-6
PAGERANK_MAX_ITER = 200
LEXRANK_EDGE_THRESHOLD = 0.1
LEXRANK_REDUNDANCY_COSINE = 0.95
KLSUM_SMOOTHING = 0.001


@dataclass(frozen=True)
class ExtractiveSelection:
    method: str
    indices: tuple[int, ...]  # unique, ascending (document order)
    text: str  # selected sentences joined in document order


def _selection(method: str, doc_sentences: Sequence[Sentence],
               indices: Sequence[int]) -> ExtractiveSelection:
    ordered = tuple(sorted(set(indices)))
    return ExtractiveSelection(
        method=method,
        indices=ordered,
        text=" ".join(doc_sentences[i].text for i in ordered),
    )


def oracle_extract(doc_sentences: Sequence[Sentence],
                   reference_sentences: Sequence[Sentence]) -> ExtractiveSelection:
    """Greedy upper bound: repeatedly add the sentence that most increases
    the mean of unigram and bigram F1 against the reference; stop when no
    sentence strictly increases it. Exact rational comparisons."""
    ref_tokens: list[str] = []
    for sent in reference_sentences:
        ref_tokens.extend(sent.tokens)
    ref_uni = ngram_counts(ref_tokens, 1)
    ref_bi = ngram_counts(ref_tokens, 2)
    ref_uni_total = sum(ref_uni.values())
    ref_bi_total = sum(ref_bi.values())

    def objective(indices: list[int]) -> Fraction:
        tokens: list[str] = []
        for i in indices:
            tokens.extend(doc_sentences[i].tokens)
        uni = ngram_counts(tokens, 1)
        bi = ngram_counts(tokens, 2)
        f1_uni = f1_fraction(overlap_count(uni, ref_uni),
                             sum(uni.values()), ref_uni_total)
        f1_bi = f1_fraction(overlap_count(bi, ref_bi),
                            sum(bi.values()), ref_bi_total)
        return (f1_uni + f1_bi) / 2

    selected: list[int] = []
    best_score = Fraction(0)
    remaining = list(range(len(doc_sentences)))
    while remaining:
        best_index = -1
        best_candidate = best_score
        for i in remaining:
            trial = objective(sorted(selected + [i]))
            if trial > best_candidate:
                best_candidate = trial
                best_index = i
        if best_index < 0:
            break
        selected.append(best_index)
        remaining.remove(best_index)
        best_score = best_candidate
    return _selection("oracle", doc_sentences, selected)


def lead_n(doc_sentences: Sequence[Sentence], n: int) -> ExtractiveSelection:
    return _selection("lead", doc_sentences, range(min(n, len(doc_sentences))))


def random_n(doc_sentences: Sequence[Sentence], n: int,
             seed: int | str = 0) -> ExtractiveSelection:
    """Seeded uniform sample without replacement, document order preserved.
    String seeds hash identically on every platform."""
    count = min(n, len(doc_sentences))
    indices = random.Random(seed).sample(range(len(doc_sentences)), count)
    return _selection("random", doc_sentences, indices)


def sumbasic(doc_sentences: Sequence[Sentence], n: int) -> ExtractiveSelection:
    """Frequency-driven selection: pick the highest-probability word (ties
    to the lexicographically smallest), take the best-average-probability
    sentence containing it, then square that sentence's word probabilities."""
    totals: Counter = Counter()
    for sent in doc_sentences:
        totals.update(sent.tokens)
    total = sum(totals.values())
    if total == 0:
        return _selection("sumbasic", doc_sentences, [])
    probs: dict[str, Fraction] = {
        word: Fraction(count, total) for word, count in totals.items()
    }
    selected: list[int] = []
    available = set(range(len(doc_sentences)))
    while len(selected) < n and available:
        candidate_words = {tok for i in available for tok in doc_sentences[i].tokens}
        if not candidate_words:
            break
        top_word = min(candidate_words, key=lambda w: (-probs[w], w))
        best_index = -1
        best_weight = Fraction(-1)
        for i in sorted(available):
            tokens = doc_sentences[i].tokens
            if top_word not in tokens:
                continue
            weight = sum((probs[t] for t in tokens), Fraction(0)) / len(tokens)
            if weight > best_weight:
                best_weight = weight
                best_index = i
        selected.append(best_index)
        available.discard(best_index)
        for tok in set(doc_sentences[best_index].tokens):
            probs[tok] = probs[tok] * probs[tok]
    return _selection("sumbasic", doc_sentences, selected)


def pagerank(weights: np.ndarray,
             damping: float = PAGERANK_DAMPING,
             tol: float = PAGERANK_TOL,
             max_iter: int = PAGERANK_MAX_ITER) -> tuple[np.ndarray, int, bool]:
    """Power iteration over a row-weighted graph.

    Rows are normalized to transition probabilities; rows with no outgoing
    weight redistribute uniformly, so the scores always sum to 1. Returns
    (scores, iterations used, converged-under-L1-tolerance).
    """
    n = weights.shape[0]
    if n == 0:
        return np.zeros(0), 0, True
    row_sums = weights.sum(axis=1)
    has_out = row_sums > 0
    p = np.full(n, 1.0 / n)
    base = (1.0 - damping) / n
    for iteration in range(1, max_iter + 1):
        contrib = np.zeros(n)
        contrib[has_out] = p[has_out] / row_sums[has_out]
        dangling = p[~has_out].sum()
        new = base + damping * (weights.T @ contrib + dangling / n)
        if np.abs(new - p).sum() < tol:
            return new, iteration, True
        p = new
    return p, max_iter, False


def textrank_matrix(doc_sentences: Sequence[Sentence]) -> np.ndarray:
    """Shared-distinct-token similarity, length-normalized by log sentence
    lengths; 0 whenever either sentence has fewer than 2 tokens."""
    n = len(doc_sentences)
    token_sets = [set(s.tokens) for s in doc_sentences]
    lengths = [len(s.tokens) for s in doc_sentences]
    weights = np.zeros((n, n))
    for i in range(n):
        if lengths[i] < 2:
            continue
        for j in range(i + 1, n):
            if lengths[j] < 2:
                continue
            shared = len(token_sets[i] & token_sets[j])
            if shared:
                sim = shared / (math.log(lengths[i]) + math.log(lengths[j]))
                weights[i, j] = sim
                weights[j, i] = sim
    return weights


def _top_n_by_score(scores: np.ndarray, n: int) -> list[int]:
    """Best-first indices; equal scores fall back to document order."""
    order = sorted(range(len(scores)), key=lambda i: (-scores[i], i))
    return order[:n]


def textrank(doc_sentences: Sequence[Sentence], n: int) -> ExtractiveSelection:
    scores, _, _ = pagerank(textrank_matrix(doc_sentences))
    return _selection("textrank", doc_sentences, _top_n_by_score(scores, n))


def tfidf_vectors(doc_sentences: Sequence[Sentence]) -> list[dict[str, float]]:
    """TF-IDF with the document's sentences as the IDF corpus;
    idf = ln(#sentences / #sentences containing the word)."""
    n = len(doc_sentences)
    df: Counter = Counter()
    for sent in doc_sentences:
        df.update(set(sent.tokens))
    vectors: list[dict[str, float]] = []
    for sent in doc_sentences:
        tf = Counter(sent.tokens)
        vectors.append({
            word: count * math.log(n / df[word]) for word, count in tf.items()
        })
    return vectors


def cosine(a: dict[str, float], b: dict[str, float]) -> float:
    if len(b) < len(a):
        a, b = b, a
    dot = sum(value * b[word] for word, value in a.items() if word in b)
    norm_a = math.sqrt(sum(v * v for v in a.values()))
    norm_b = math.sqrt(sum(v * v for v in b.values()))
    if norm_a == 0 or norm_b == 0:
        return 0.0
    return dot / (norm_a * norm_b)


def lexrank_matrix(doc_sentences: Sequence[Sentence]) -> tuple[np.ndarray, np.ndarray]:
    """(full cosine matrix, thresholded edge weights without self-loops)."""
    n = len(doc_sentences)
    vectors = tfidf_vectors(doc_sentences)
    cosines = np.zeros((n, n))
    weights = np.zeros((n, n))
    for i in range(n):
        cosines[i, i] = 1.0
        for j in range(i + 1, n):
            sim = cosine(vectors[i], vectors[j])
            cosines[i, j] = cosines[j, i] = sim
            if sim >= LEXRANK_EDGE_THRESHOLD:
                weights[i, j] = weights[j, i] = sim
    return cosines, weights


def lexrank(doc_sentences: Sequence[Sentence], n: int) -> ExtractiveSelection:
    """Degree-normalized PageRank over thresholded TF-IDF cosine edges,
    then rank-order selection that skips near-duplicates (cosine > 0.95)
    of already-selected sentences. Skipped candidates are not backfilled."""
    cosines, weights = lexrank_matrix(doc_sentences)
    scores, _, _ = pagerank(weights)
    selected: list[int] = []
    for i in _top_n_by_score(scores, len(doc_sentences)):
        if len(selected) >= n:
            break
        if any(cosines[i, j] > LEXRANK_REDUNDANCY_COSINE for j in selected):
            continue
        selected.append(i)
    return _selection("lexrank", doc_sentences, selected)


def kl_divergence(doc_counts: Counter, summary_counts: Counter,
                  smoothing: float = KLSUM_SMOOTHING) -> float:
    """KL(document ‖ summary) over the document vocabulary, both sides
    add-smoothed. Summation in sorted-word order for reproducible floats."""
    vocab = sorted(doc_counts)
    doc_total = sum(doc_counts.values()) + smoothing * len(vocab)
    sum_total = (sum(summary_counts[w] for w in vocab)
                 + smoothing * len(vocab))
    divergence = 0.0
    for word in vocab:
        p = (doc_counts[word] + smoothing) / doc_total
        q = (summary_counts[word] + smoothing) / sum_total
        divergence += p * math.log(p / q)
    return divergence


def klsum(doc_sentences: Sequence[Sentence], n: int) -> ExtractiveSelection:
    """Greedy selection minimizing KL(document ‖ summary) at each step."""
    doc_counts: Counter = Counter()
    for sent in doc_sentences:
        doc_counts.update(sent.tokens)
    selected: list[int] = []
    summary_counts: Counter = Counter()
    available = set(range(len(doc_sentences)))
    while len(selected) < n and available:
        best_index = -1
        best_kl = math.inf
        for i in sorted(available):
            trial = summary_counts + Counter(doc_sentences[i].tokens)
            divergence = kl_divergence(doc_counts, trial)
            if divergence < best_kl:
                best_kl = divergence
                best_index = i
        selected.append(best_index)
        available.discard(best_index)
        summary_counts.update(doc_sentences[best_index].tokens)
    return _selection("klsum", doc_sentences, selected)


def run_baseline(method: str, doc_sentences: Sequence[Sentence],
                 reference_sentences: Sequence[Sentence],
                 seed: int | str = 0) -> ExtractiveSelection:
    """Dispatch by method name with n = number of reference sentences."""
    n = len(reference_sentences)
    if method == "oracle":
        return oracle_extract(doc_sentences, reference_sentences)
    if method == "lead":
        return lead_n(doc_sentences, n)
    if method == "random":
        return random_n(doc_sentences, n, seed)
    if method == "sumbasic":
        return sumbasic(doc_sentences, n)
    if method == "textrank":
        return textrank(doc_sentences, n)
    if method == "lexrank":
        return lexrank(doc_sentences, n)
    if method == "klsum":
        return klsum(doc_sentences, n)
    raise ValueError(f"unknown baseline method: {method!r}")
