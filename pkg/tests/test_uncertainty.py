import math

import pytest
from hypothesis import given, strategies as st

from annosplit.errors import ConfigError, EmptyResponses, MissingResponses
from annosplit.model import AMBIGUOUS, Estimator, ResponseSet
from annosplit.uncertainty import (
    MISSING_CONFIDENCE,
    ResponseDistribution,
    batch_uncertainty,
    entropy_uncertainty,
    scores_by_id,
    self_eval_uncertainty,
)

from .helpers import response_set, tiny_dataset


def entropy_oracle(counts) -> float:
    # direct summation over the frequency table
    total = sum(counts)
    return -sum((c / total) * math.log(c / total) for c in counts if c > 0)


class TestEntropy:
    def test_pure_set_is_zero(self):
        rs = response_set("x", ["world"] * 7)
        assert entropy_uncertainty(rs).u == 0.0

    def test_four_three_split(self):
        rs = response_set("x", ["paraphrase"] * 4 + ["not paraphrase"] * 3)
        score = entropy_uncertainty(rs)
        assert score.u == pytest.approx(entropy_oracle([4, 3]), abs=1e-12)
        assert score.u == pytest.approx(0.682908, abs=1e-6)
        assert score.k_used == 7
        assert score.estimator is Estimator.ENTROPY

    def test_seven_distinct_reaches_ln7(self):
        labels = [f"label{i}" for i in range(6)] + [AMBIGUOUS]
        rs = response_set("x", labels)
        assert entropy_uncertainty(rs).u == pytest.approx(math.log(7), abs=1e-9)

    def test_ambiguous_counts_as_its_own_class(self):
        rs = response_set("x", ["world"] * 4 + [AMBIGUOUS] * 3)
        assert entropy_uncertainty(rs).u == pytest.approx(entropy_oracle([4, 3]), abs=1e-12)

    def test_empty_raises(self):
        with pytest.raises(EmptyResponses):
            entropy_uncertainty(ResponseSet("x", ()))

    @given(st.lists(st.sampled_from(["a", "b", "c", AMBIGUOUS]), min_size=1, max_size=9))
    def test_permutation_invariance_and_bounds(self, labels):
        u = entropy_uncertainty(response_set("x", labels)).u
        assert u == pytest.approx(
            entropy_uncertainty(response_set("x", list(reversed(labels)))).u, abs=1e-12
        )
        assert 0.0 <= u <= math.log(len(labels)) + 1e-12

    @given(
        st.lists(st.integers(min_value=0, max_value=9), min_size=2, max_size=6).filter(
            lambda v: sum(v) >= 1
        ),
        st.data(),
    )
    def test_coarsening_never_increases_entropy(self, counts, data):
        i = data.draw(st.integers(0, len(counts) - 1))
        j = data.draw(st.integers(0, len(counts) - 1).filter(lambda x: x != i))
        merged = [c for idx, c in enumerate(counts) if idx not in (i, j)]
        merged.append(counts[i] + counts[j])
        assert entropy_oracle(merged) <= entropy_oracle(counts) + 1e-12


class TestSelfEvaluation:
    def test_full_confidence_is_zero_uncertainty(self):
        rs = response_set("x", ["a"] * 7, [1.0] * 7)
        assert self_eval_uncertainty(rs).u == 0.0

    def test_mean_confidence_oracle(self):
        confs = [0.9, 0.8, 1.0, 0.7, 0.9, 0.8, 0.9]
        rs = response_set("x", ["a"] * 7, confs)
        score = self_eval_uncertainty(rs)
        assert score.u == pytest.approx(1 - sum(confs) / 7, abs=1e-12)
        assert score.u == pytest.approx(0.142857, abs=1e-6)
        assert not score.imputed

    def test_missing_confidences_substituted_and_flagged(self):
        rs = response_set("x", ["a"] * 7)
        score = self_eval_uncertainty(rs)
        assert score.u == pytest.approx(1 - MISSING_CONFIDENCE, abs=1e-12)
        assert score.imputed

    def test_partial_missing_flags_imputed(self):
        rs = response_set("x", ["a", "b"], [0.9, None])
        score = self_eval_uncertainty(rs)
        assert score.u == pytest.approx(1 - (0.9 + 0.5) / 2, abs=1e-12)
        assert score.imputed

    def test_empty_raises(self):
        with pytest.raises(EmptyResponses):
            self_eval_uncertainty(ResponseSet("x", ()))

    @given(st.lists(st.floats(min_value=0.0, max_value=1.0), min_size=1, max_size=9))
    def test_bounds(self, confs):
        rs = response_set("x", ["a"] * len(confs), confs)
        assert 0.0 <= self_eval_uncertainty(rs).u <= 1.0


class TestBatch:
    def test_batch_matches_per_instance(self):
        ds = tiny_dataset(["a", "b", "c"])
        sets = {
            "a": response_set("a", ["x"] * 7),
            "b": response_set("b", ["x"] * 4 + ["y"] * 3),
            "c": response_set("c", ["x", "y", "z"]),
        }
        scores = batch_uncertainty(ds, sets, Estimator.ENTROPY)
        assert [s.instance_id for s in scores] == ["a", "b", "c"]
        for s in scores:
            assert s.u == pytest.approx(entropy_uncertainty(sets[s.instance_id]).u, abs=1e-12)

    def test_empty_dataset_gives_empty_list(self):
        assert batch_uncertainty(tiny_dataset([]), {}, Estimator.ENTROPY) == []

    def test_missing_responses_named(self):
        ds = tiny_dataset(["x1", "x2"])
        with pytest.raises(MissingResponses) as err:
            batch_uncertainty(ds, {"x1": response_set("x1", ["a"])}, Estimator.ENTROPY)
        assert err.value.instance_ids == ["x2"]

    def test_self_eval_batch(self):
        ds = tiny_dataset(["a", "b"])
        sets = {
            "a": response_set("a", ["x"] * 2, [0.8, 0.6]),
            "b": response_set("b", ["x"] * 2, [1.0, 1.0]),
        }
        scores = batch_uncertainty(ds, sets, Estimator.SELF_EVALUATION)
        assert scores[0].u == pytest.approx(0.3, abs=1e-12)
        assert scores[1].u == 0.0


class TestScoresIndex:
    def test_rejects_mixed_estimators(self):
        ds = tiny_dataset(["a"])
        sets = {"a": response_set("a", ["x"], [0.5])}
        entropy = batch_uncertainty(ds, sets, Estimator.ENTROPY)
        with pytest.raises(ConfigError):
            scores_by_id(entropy, Estimator.SELF_EVALUATION)


def test_response_distribution_counts():
    rs = response_set("x", ["a", "a", "b", AMBIGUOUS])
    dist = ResponseDistribution.from_response_set(rs)
    assert dist.counts == {"a": 2, "b": 1, AMBIGUOUS: 1}
    assert dist.k_used == 4
    assert sum(dist.counts.values()) == dist.k_used
