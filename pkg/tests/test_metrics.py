"""Tests for rep-n and the product diversity metric."""

import pytest

import oracles
from eqsample import diversity, rep_n


class TestRepN:
    def test_all_distinct_bigrams(self):
        assert rep_n([1, 2, 3, 4], 2) == 0.0

    def test_constant_sequence(self):
        # 3 bigram slots, 1 unique bigram.
        assert rep_n([1, 1, 1, 1], 2) == pytest.approx(100 * (1 - 1 / 3), abs=1e-9)

    def test_empty_sequence(self):
        assert rep_n([], 2) == 0.0

    def test_short_sequence_has_no_ngrams(self):
        assert rep_n([5], 2) == 0.0
        assert rep_n([5, 6, 7], 4) == 0.0

    def test_rejects_bad_n(self):
        with pytest.raises(ValueError):
            rep_n([1, 2], 0)

    def test_bounds(self):
        assert 0.0 <= rep_n([1, 2, 1, 2, 1, 2], 2) <= 100.0

    def test_matches_enumeration_oracle(self):
        import random

        rng = random.Random(99)
        for _ in range(50):
            tokens = [rng.randrange(6) for _ in range(rng.randrange(0, 40))]
            for n in (2, 3, 4):
                assert rep_n(tokens, n) == pytest.approx(
                    oracles.rep_n_enumerated(tokens, n), abs=1e-12
                )


class TestDiversity:
    def test_all_distinct_is_exactly_one(self):
        assert diversity([1, 2, 3, 4, 5, 6]) == 1.0
        # repeated unigrams alone leave every higher-order n-gram distinct
        assert diversity([3, 1, 4, 1, 5, 9, 2, 6]) == 1.0

    def test_constant_sequence_by_enumeration(self):
        # rep-2 = 75, rep-3 = 66.67, rep-4 = 50 over [1]*5: product 1/24.
        assert diversity([1, 1, 1, 1, 1]) == pytest.approx(1 / 24, abs=1e-12)
        assert diversity([1, 1, 1, 1, 1]) == pytest.approx(
            oracles.diversity_enumerated([1, 1, 1, 1, 1]), abs=1e-15
        )

    def test_empty_sequence_is_one(self):
        assert diversity([]) == 1.0

    def test_bounds(self):
        assert 0.0 <= diversity([1, 1, 2, 1, 2, 2, 1]) <= 1.0

    def test_relabeling_invariance(self):
        tokens = [0, 1, 0, 2, 1, 0, 3, 2]
        relabeled = [{0: 7, 1: 5, 2: 9, 3: 0}[t] for t in tokens]
        assert diversity(tokens) == diversity(relabeled)
        for n in (2, 3, 4):
            assert rep_n(tokens, n) == rep_n(relabeled, n)

    def test_appending_fresh_token_cannot_increase_rep_n(self):
        tokens = [1, 2, 1, 2, 1]
        extended = tokens + [777]
        for n in (2, 3, 4):
            assert rep_n(extended, n) <= rep_n(tokens, n) + 1e-12
