"""Tests for temperature softmax and descending sort."""

import numpy as np
import pytest

from eqsample import (
    DegenerateInputError,
    InvalidParameterError,
    sort_descending,
    temperature_softmax,
)


class TestTemperatureSoftmax:
    def test_symmetric_logits_give_uniform(self):
        np.testing.assert_allclose(
            temperature_softmax([0.0, 0.0, 0.0], 1.0), [1 / 3, 1 / 3, 1 / 3], atol=1e-15
        )

    @pytest.mark.parametrize("x", [-100.0, -3.5, 0.0, 7.25, 500.0])
    def test_single_token_normalizes_to_one(self, x):
        np.testing.assert_array_equal(temperature_softmax([x], 0.5), [1.0])

    def test_matches_direct_evaluation(self):
        # Frozen from evaluating exp(s_i)/sum(exp(s_j)) at high precision.
        result = temperature_softmax([2.0, 1.0, 0.0], 1.0)
        np.testing.assert_allclose(result, [0.66524, 0.24473, 0.09003], atol=1e-5)

    @pytest.mark.parametrize("tau", [0.01, 0.5, 1.0, 2.0, 50.0])
    def test_valid_distribution_for_any_temperature(self, tau):
        rng = np.random.default_rng(1)
        logits = rng.normal(scale=5.0, size=200)
        probs = temperature_softmax(logits, tau)
        assert (probs >= 0).all()
        assert abs(probs.sum() - 1.0) < 1e-9

    def test_masked_tokens_map_to_exact_zero(self):
        probs = temperature_softmax([1.0, -np.inf, 0.5, -np.inf], 1.0)
        assert probs[1] == 0.0
        assert probs[3] == 0.0
        assert abs(probs.sum() - 1.0) < 1e-9

    def test_low_temperature_concentrates_on_argmax(self):
        logits = [2.0, 1.0, 0.0, -1.0]
        probs = temperature_softmax(logits, 0.01)
        assert probs[0] > 0.999

    @pytest.mark.parametrize("tau", [0.01, 0.3, 1.0, 4.0])
    def test_argmax_invariant_under_temperature(self, tau):
        rng = np.random.default_rng(7)
        logits = rng.normal(size=64)
        assert int(np.argmax(temperature_softmax(logits, tau))) == int(np.argmax(logits))

    @pytest.mark.parametrize("tau", [0.0, -1.0])
    def test_rejects_non_positive_temperature(self, tau):
        with pytest.raises(InvalidParameterError):
            temperature_softmax([1.0, 2.0], tau)

    def test_rejects_all_masked(self):
        with pytest.raises(DegenerateInputError):
            temperature_softmax([-np.inf, -np.inf], 1.0)

    def test_rejects_empty(self):
        with pytest.raises(DegenerateInputError):
            temperature_softmax([], 1.0)

    @pytest.mark.parametrize("bad", [np.nan, np.inf])
    def test_rejects_nan_and_positive_infinity(self, bad):
        with pytest.raises(InvalidParameterError):
            temperature_softmax([1.0, bad], 1.0)

    def test_extreme_logits_do_not_overflow(self):
        probs = temperature_softmax([1e8, 1e8 - 1.0, 0.0], 1.0)
        assert np.isfinite(probs).all()
        assert abs(probs.sum() - 1.0) < 1e-9


class TestSortDescending:
    def test_sorts_and_maps_ids(self):
        dist = sort_descending([0.2, 0.5, 0.3])
        np.testing.assert_array_equal(dist.probs, [0.5, 0.3, 0.2])
        np.testing.assert_array_equal(dist.token_ids, [1, 2, 0])

    def test_ties_break_by_ascending_token_id(self):
        dist = sort_descending([0.25, 0.25, 0.25, 0.25])
        np.testing.assert_array_equal(dist.token_ids, [0, 1, 2, 3])

    def test_zero_probability_entries_dropped(self):
        dist = sort_descending([0.5, 0.0, 0.5])
        np.testing.assert_array_equal(dist.probs, [0.5, 0.5])
        np.testing.assert_array_equal(dist.token_ids, [0, 2])

    def test_inverse_mapping_reproduces_input_exactly(self):
        rng = np.random.default_rng(3)
        probs = temperature_softmax(rng.normal(size=50), 0.8)
        dist = sort_descending(probs, temperature=0.8)
        rebuilt = np.zeros_like(probs)
        rebuilt[dist.token_ids] = dist.probs
        np.testing.assert_array_equal(rebuilt, probs)

    def test_records_temperature(self):
        assert sort_descending([1.0], temperature=0.5).temperature == 0.5

    def test_rejects_empty(self):
        with pytest.raises(DegenerateInputError):
            sort_descending([])

    def test_rejects_negative(self):
        with pytest.raises(InvalidParameterError):
            sort_descending([1.1, -0.1])

    def test_rejects_bad_total(self):
        with pytest.raises(InvalidParameterError):
            sort_descending([0.4, 0.4])

    def test_rejects_nan(self):
        with pytest.raises(InvalidParameterError):
            sort_descending([np.nan, 1.0])

    def test_invariants_hold(self):
        rng = np.random.default_rng(11)
        probs = rng.dirichlet(np.full(40, 0.3))
        dist = sort_descending(probs)
        assert (dist.probs > 0).all()
        assert (np.diff(dist.probs) <= 0).all()
        assert abs(dist.probs.sum() - 1.0) < 1e-9
        assert len(set(dist.token_ids.tolist())) == dist.n
