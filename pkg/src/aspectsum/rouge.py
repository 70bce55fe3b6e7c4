"""Exact ROUGE-N, ROUGE-L, ROUGE-Lsum, and the pooled unigram-recall primitive.

All scores are exact rationals (``fractions.Fraction``), so comparisons made
by the corpus builder and the oracle baseline are platform-independent.
Convert to float only at reporting boundaries.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

TokenSeq = Sequence[str]


def _tokens_of(item) -> TokenSeq:
    """Accept either a token sequence or any object with a .tokens field."""
    return getattr(item, "tokens", item)


@dataclass(frozen=True)
class RougeScore:
    precision: Fraction
    recall: Fraction
    f1: Fraction


def _score(overlap: int, candidate_total: int, reference_total: int) -> RougeScore:
    p = Fraction(overlap, candidate_total) if candidate_total else Fraction(0)
    r = Fraction(overlap, reference_total) if reference_total else Fraction(0)
    f = 2 * p * r / (p + r) if p + r else Fraction(0)
    return RougeScore(precision=p, recall=r, f1=f)


def f1_fraction(overlap: int, candidate_total: int, reference_total: int) -> Fraction:
    p = Fraction(overlap, candidate_total) if candidate_total else Fraction(0)
    r = Fraction(overlap, reference_total) if reference_total else Fraction(0)
    return 2 * p * r / (p + r) if p + r else Fraction(0)


def ngram_counts(tokens: TokenSeq, n: int) -> Counter:
    if n < 1:
        raise ValueError("n must be >= 1")
    return Counter(tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1))


def overlap_count(candidate: Counter, reference: Counter) -> int:
    """Clipped multiset overlap."""
    return sum(min(count, reference[gram]) for gram, count in candidate.items() if gram in reference)


def rouge_n(candidate: TokenSeq, reference: TokenSeq, n: int) -> RougeScore:
    cand = ngram_counts(candidate, n)
    ref = ngram_counts(reference, n)
    return _score(overlap_count(cand, ref), sum(cand.values()), sum(ref.values()))


def rouge1_recall(x_tokens: TokenSeq, pool: Counter) -> Fraction:
    """Unigram recall of x against a pooled token multiset; 0 when x is empty."""
    if not x_tokens:
        return Fraction(0)
    x_counts = Counter(x_tokens)
    covered = sum(min(count, pool[tok]) for tok, count in x_counts.items() if tok in pool)
    return Fraction(covered, len(x_tokens))


def rouge1_recall_against_set(x, sentences: Iterable) -> Fraction:
    """Unigram recall of x against the concatenation of a set of sentences.

    ``x`` and each member of ``sentences`` may be token sequences or
    Sentence objects. Returns 0 when x has no tokens or the set is empty.
    """
    pool: Counter = Counter()
    for sent in sentences:
        pool.update(_tokens_of(sent))
    if not pool:
        return Fraction(0)
    return rouge1_recall(_tokens_of(x), pool)


def lcs_length(a: TokenSeq, b: TokenSeq) -> int:
    if not a or not b:
        return 0
    prev = [0] * (len(b) + 1)
    for i in range(1, len(a) + 1):
        cur = [0] * (len(b) + 1)
        ai = a[i - 1]
        for j in range(1, len(b) + 1):
            if ai == b[j - 1]:
                cur[j] = prev[j - 1] + 1
            else:
                cur[j] = cur[j - 1] if cur[j - 1] >= prev[j] else prev[j]
        prev = cur
    return prev[len(b)]


def rouge_l(candidate: TokenSeq, reference: TokenSeq) -> RougeScore:
    return _score(lcs_length(candidate, reference), len(candidate), len(reference))


def _lcs_hit_positions(reference: TokenSeq, candidate: TokenSeq) -> set[int]:
    """Positions in reference marked by one standard LCS backtrace."""
    m, n = len(reference), len(candidate)
    if m == 0 or n == 0:
        return set()
    table = [[0] * (n + 1) for _ in range(m + 1)]
    for i in range(1, m + 1):
        ri = reference[i - 1]
        row = table[i]
        above = table[i - 1]
        for j in range(1, n + 1):
            if ri == candidate[j - 1]:
                row[j] = above[j - 1] + 1
            else:
                row[j] = row[j - 1] if row[j - 1] > above[j] else above[j]
    positions: set[int] = set()
    i, j = m, n
    while i > 0 and j > 0:
        if reference[i - 1] == candidate[j - 1]:
            positions.add(i - 1)
            i -= 1
            j -= 1
        elif table[i][j - 1] > table[i - 1][j]:
            j -= 1
        else:
            i -= 1
    return positions


def rouge_lsum(candidate_sentences: Sequence[TokenSeq],
               reference_sentences: Sequence[TokenSeq]) -> RougeScore:
    """Summary-level LCS: per reference sentence, the union of LCS hits
    across candidate sentences; each token creditable at most as often as
    it occurs on either side."""
    cands = [_tokens_of(s) for s in candidate_sentences]
    refs = [_tokens_of(s) for s in reference_sentences]
    ref_total = sum(len(s) for s in refs)
    cand_total = sum(len(s) for s in cands)
    if ref_total == 0 or cand_total == 0:
        return _score(0, cand_total, ref_total)
    cand_budget: Counter = Counter()
    ref_budget: Counter = Counter()
    for sent in cands:
        cand_budget.update(sent)
    for sent in refs:
        ref_budget.update(sent)
    hits = 0
    for ref_sent in refs:
        marked: set[int] = set()
        for cand_sent in cands:
            marked |= _lcs_hit_positions(ref_sent, cand_sent)
        for pos in sorted(marked):
            tok = ref_sent[pos]
            if cand_budget[tok] > 0 and ref_budget[tok] > 0:
                hits += 1
                cand_budget[tok] -= 1
                ref_budget[tok] -= 1
    return _score(hits, cand_total, ref_total)
