"""Logit-to-distribution plumbing: temperature softmax and descending sort.

Every truncation rule in this package consumes a :class:`SortedDistribution`,
so all numerical hygiene (max-logit subtraction, zero dropping, stable
tie-breaking) is concentrated here. All arithmetic is 64-bit float even when
trace files carry 32-bit payloads; entropy sums downstream are
cancellation-prone.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInputError, InvalidParameterError

# Tolerance for the "probabilities sum to 1" precondition of sort_descending.
# Matches the stored-distribution invariant; values are never renormalized
# (the sorted probabilities must map back to the input bit-for-bit), so
# callers holding reduced-precision probabilities should renormalize first.
SUM_TOLERANCE = 1e-9


@dataclass(frozen=True)
class SortedDistribution:
    """Probabilities sorted descending, with a map back to original token ids.

    Invariants (guaranteed by :func:`sort_descending`):
      * ``probs`` strictly positive and non-increasing, summing to 1 within 1e-9
      * ``token_ids`` aligned with ``probs``; a duplicate-free subset of the
        original vocabulary indices
      * ``temperature`` is the positive scaling used to produce the probabilities
    """

    probs: np.ndarray
    token_ids: np.ndarray
    temperature: float = 1.0

    def __len__(self) -> int:
        return int(self.probs.size)

    @property
    def n(self) -> int:
        """Number of positive-probability tokens."""
        return int(self.probs.size)


def temperature_softmax(logits, tau: float) -> np.ndarray:
    """Temperature-scaled softmax aligned with the input order.

    ``-inf`` entries are treated as masked tokens and map to exactly 0.
    The maximum finite logit is subtracted before exponentiation, which is
    mathematically exact and prevents overflow.

    Raises InvalidParameterError for non-positive ``tau`` or NaN/+inf logits,
    DegenerateInputError when no logit is finite.
    """
    if not tau > 0:
        raise InvalidParameterError(f"temperature must be positive, got {tau}")
    scores = np.asarray(logits, dtype=np.float64)
    if scores.ndim != 1 or scores.size == 0:
        raise DegenerateInputError("logits must be a non-empty 1-D sequence")
    if np.isnan(scores).any() or np.isposinf(scores).any():
        raise InvalidParameterError("logits must be finite or -inf")
    finite = np.isfinite(scores)
    if not finite.any():
        raise DegenerateInputError("all logits are masked (-inf)")
    shifted = (scores - scores[finite].max()) / tau
    weights = np.exp(shifted)  # exp(-inf) == 0.0, so masked tokens drop out
    return weights / weights.sum()


def sort_descending(probs, temperature: float = 1.0) -> SortedDistribution:
    """Sort a probability vector descending into a :class:`SortedDistribution`.

    Ties are broken by ascending original token id (stable), which keeps
    replay traces reproducible. Zero-probability entries are removed.
    """
    p = np.asarray(probs, dtype=np.float64)
    if p.ndim != 1 or p.size == 0:
        raise DegenerateInputError("probability vector must be non-empty and 1-D")
    if np.isnan(p).any():
        raise InvalidParameterError("probabilities must not contain NaN")
    if (p < 0).any():
        raise InvalidParameterError("probabilities must be non-negative")
    total = p.sum()
    if abs(total - 1.0) > SUM_TOLERANCE:
        raise InvalidParameterError(f"probabilities must sum to 1, got {total!r}")
    if not temperature > 0:
        raise InvalidParameterError(f"temperature must be positive, got {temperature}")
    # Stable sort on the negated values: equal probabilities keep ascending
    # original-index order.
    order = np.argsort(-p, kind="stable")
    ranked = p[order]
    keep = ranked > 0.0
    return SortedDistribution(
        probs=ranked[keep],
        token_ids=order[keep].astype(np.int64),
        temperature=float(temperature),
    )


def distribution_from_logits(logits, tau: float) -> SortedDistribution:
    """Softmax then sort: the canonical per-step preprocessing pipeline."""
    return sort_descending(temperature_softmax(logits, tau), temperature=tau)
