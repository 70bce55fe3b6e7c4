"""Independent reference implementations used as test oracles.

Deliberately written in a different style from the library (full
recomputation instead of incremental bookkeeping) so that agreement is
meaningful.
"""

from __future__ import annotations

from collections import Counter
from fractions import Fraction


def recall_of_selection(x_tokens, candidates, selection) -> Fraction:
    """Unigram recall of x against the pooled tokens of selected candidates,
    recomputed from scratch."""
    if not x_tokens:
        return Fraction(0)
    pool: Counter = Counter()
    for index in selection:
        pool.update(candidates[index])
    x_counts = Counter(x_tokens)
    covered = sum(min(count, pool[token]) for token, count in x_counts.items())
    return Fraction(covered, len(x_tokens))


def naive_greedy_map(x_tokens, candidates):
    """Quadratic greedy mapping: every round, try every unchosen candidate
    and recompute the full recall of the would-be selection.

    Returns (chosen indices in pick order, per-step scores, final score).
    """
    chosen: list[int] = []
    chosen_set: set[int] = set()
    score = Fraction(0)
    step_scores: list[Fraction] = []
    while True:
        best_index = -1
        best_score = score
        for i in range(len(candidates)):
            if i in chosen_set:
                continue
            trial = recall_of_selection(x_tokens, candidates, chosen + [i])
            if trial > best_score:
                best_index = i
                best_score = trial
        if best_index < 0:
            break
        chosen.append(best_index)
        chosen_set.add(best_index)
        score = best_score
        step_scores.append(score)
    return chosen, step_scores, score


def brute_fragments(article_units, summary_units):
    """Exhaustive greedy-maximal fragment decomposition: at each summary
    position, test windows by descending length for containment anywhere in
    the article; no shared fragment means advancing one position."""
    article = list(article_units)
    summary = list(summary_units)
    fragments = []
    i = 0
    while i < len(summary):
        taken = 0
        for k in range(len(summary) - i, 0, -1):
            window = summary[i:i + k]
            if any(article[j:j + k] == window
                   for j in range(len(article) - k + 1)):
                taken = k
                break
        if taken:
            fragments.append(tuple(summary[i:i + taken]))
            i += taken
        else:
            i += 1
    return fragments
