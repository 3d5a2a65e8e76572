"""Shared fixtures: the Dirichlet test corpus and adversarial distributions."""

from __future__ import annotations

import numpy as np
import pytest

from eqsample import distribution_from_logits, select_threshold_naive, sort_descending

CORPUS_SEED = 20260810
CORPUS_SIZE = 10_000
CONCENTRATIONS = (0.1, 1.0, 10.0)
MAX_SUPPORT = 512


def make_dist(probs):
    return sort_descending(np.asarray(probs, dtype=np.float64))


@pytest.fixture(scope="session")
def corpus():
    """10,000 Dirichlet-random sorted distributions, fixed seed."""
    rng = np.random.default_rng(CORPUS_SEED)
    dists = []
    for i in range(CORPUS_SIZE):
        alpha = CONCENTRATIONS[i % len(CONCENTRATIONS)]
        n = int(rng.integers(2, MAX_SUPPORT + 1))
        probs = rng.dirichlet(np.full(n, alpha))
        dists.append(make_dist(probs))
    return dists


@pytest.fixture(scope="session")
def corpus_naive(corpus):
    """Full naive scan per corpus entry: (k*, per-k direct entropies)."""
    results = []
    for dist in corpus:
        ref = select_threshold_naive(dist, record_trajectory=True)
        entropies = np.array([point.entropy for point in ref.trajectory])
        results.append((ref.k_star, entropies))
    return results


@pytest.fixture(scope="session")
def adversarial_dists():
    """Boundary-shaped distributions: uniform, near-delta, two-token,
    geometric decay, and masked-token cases."""
    cases = {}
    for n in (2, 3, 16, 100, 512):
        cases[f"uniform_{n}"] = make_dist(np.full(n, 1.0 / n))
    cases["two_token_even"] = make_dist([0.5, 0.5])
    cases["two_token_skew"] = make_dist([0.9, 0.1])
    cases["two_token_extreme"] = make_dist([0.999, 0.001])
    cases["near_delta"] = make_dist([1.0 - 1e-9, 1e-9])
    tail = np.full(49, 1e-9 / 49)
    cases["near_delta_wide"] = make_dist(np.concatenate([[1.0 - 1e-9], tail]))
    for ratio in (0.3, 0.7, 0.95):
        weights = ratio ** np.arange(300, dtype=np.float64)
        cases[f"geometric_{ratio}"] = make_dist(weights / weights.sum())
    masked = np.full(16, -np.inf)
    masked[:4] = [5.0, 4.0, 3.0, 2.0]
    cases["masked"] = distribution_from_logits(masked, 1.0)
    single = np.full(8, -np.inf)
    single[3] = 0.5
    cases["masked_single"] = distribution_from_logits(single, 1.0)
    peaked = np.zeros(100)
    peaked[0] = 10.0
    cases["peaked_softmax"] = distribution_from_logits(peaked, 1.0)
    return cases
