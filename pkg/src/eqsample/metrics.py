"""Repetition metrics over generated token sequences.

rep-n is the percentage of n-gram slots occupied by a repeat of an earlier
n-gram; the diversity score multiplies the non-repeated fractions for
n = 2..4. Both operate on token ids: callers must tokenize consistently, the
library ships no tokenizer.
"""

from __future__ import annotations

from typing import Sequence


def rep_n(tokens: Sequence[int], n: int) -> float:
    """Percentage of repeated n-grams: 100 * (1 - unique/total).

    Sequences shorter than n have no n-grams and score 0 (no repetition
    observed).
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    total = len(tokens) - n + 1
    if total <= 0:
        return 0.0
    grams = {tuple(tokens[i : i + n]) for i in range(total)}
    return 100.0 * (1.0 - len(grams) / total)


def diversity(tokens: Sequence[int]) -> float:
    """Product over n = 2..4 of (1 - rep_n/100); 1 means no repeats at all.

    The empty sequence scores 1.0 (empty product).
    """
    score = 1.0
    for n in range(2, 5):
        score *= 1.0 - rep_n(tokens, n) / 100.0
    return score
