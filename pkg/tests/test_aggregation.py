import random

import pytest

from annosplit.aggregation import escalated_ids, majority_vote, merge_labels
from annosplit.errors import EmptyResponses, IncompleteLabels, InvalidLabel
from annosplit.model import AMBIGUOUS, AllocationPlan, ResponseSet, Source, Strategy

from .helpers import response_set, tiny_dataset


class TestMajorityVote:
    def test_strict_majority_wins(self):
        vote = majority_vote(response_set("x", ["a"] * 5 + ["b"] * 2))
        assert vote.label == "a"
        assert not vote.tied
        assert not vote.escalated
        assert vote.counts == {"a": 5, "b": 2}

    def test_tie_escalates_with_flag(self):
        vote = majority_vote(response_set("x", ["a"] * 3 + ["b"] * 3 + [AMBIGUOUS]))
        assert vote.label is None
        assert vote.tied
        assert vote.escalated

    def test_ambiguous_winner_escalates(self):
        vote = majority_vote(response_set("x", [AMBIGUOUS] * 7))
        assert vote.label == AMBIGUOUS
        assert not vote.tied
        assert vote.escalated

    def test_empty_raises(self):
        with pytest.raises(EmptyResponses):
            majority_vote(ResponseSet("x", ()))

    def test_absolute_majority_always_wins(self):
        rng = random.Random(0)
        for _ in range(100):
            k = rng.randint(1, 7)
            majority_label = "win"
            others = [rng.choice(["b", "c", AMBIGUOUS]) for _ in range((k - 1) // 2)]
            labels = [majority_label] * (k - len(others)) + others
            rng.shuffle(labels)
            vote = majority_vote(response_set("x", labels))
            assert vote.label == majority_label

    def test_permutation_invariance(self):
        labels = ["a", "b", "a", AMBIGUOUS, "a", "b", "b"]
        base = majority_vote(response_set("x", labels))
        rng = random.Random(4)
        for _ in range(10):
            rng.shuffle(labels)
            vote = majority_vote(response_set("x", labels))
            assert (vote.label, vote.tied, vote.counts) == (base.label, base.tied, base.counts)


def make_plan(llm, human):
    return AllocationPlan(
        Strategy.ENTROPY, len(llm), frozenset(llm), frozenset(human)
    )


class TestMergeLabels:
    def test_composition_with_provenance(self):
        ds = tiny_dataset(["a", "b", "c"])
        plan = make_plan({"a", "b"}, {"c"})
        votes = {
            "a": majority_vote(response_set("a", ["x"] * 7)),
            "b": majority_vote(response_set("b", ["y"] * 4 + ["x"] * 3)),
        }
        records = merge_labels(plan, votes, {"c": "z"}, ds)
        assert len(records) == ds.m
        by_id = {r.instance_id: r for r in records}
        assert by_id["a"].label == "x" and by_id["a"].source is Source.LLM
        assert by_id["b"].label == "y" and by_id["b"].vote_detail == {"y": 4, "x": 3}
        assert by_id["c"].label == "z" and by_id["c"].source is Source.HUMAN
        assert by_id["c"].vote_detail is None

    def test_escalated_tie_without_human_label_fails(self):
        ds = tiny_dataset(["a"])
        plan = make_plan({"a"}, set())
        votes = {"a": majority_vote(response_set("a", ["x", "y"]))}
        with pytest.raises(IncompleteLabels) as err:
            merge_labels(plan, votes, {}, ds)
        assert err.value.instance_ids == ["a"]

    def test_escalated_then_human_labeled(self):
        ds = tiny_dataset(["a"])
        plan = make_plan({"a"}, set())
        votes = {"a": majority_vote(response_set("a", [AMBIGUOUS] * 3))}
        records = merge_labels(plan, votes, {"a": "x"}, ds)
        assert records[0].source is Source.HUMAN
        assert records[0].escalated
        assert records[0].label == "x"
        assert records[0].vote_detail == {AMBIGUOUS: 3}

    def test_missing_vote_fails(self):
        ds = tiny_dataset(["a"])
        with pytest.raises(IncompleteLabels):
            merge_labels(make_plan({"a"}, set()), {}, {}, ds)

    def test_missing_human_label_fails(self):
        ds = tiny_dataset(["a"])
        with pytest.raises(IncompleteLabels):
            merge_labels(make_plan(set(), {"a"}), {}, {}, ds)

    def test_human_label_outside_label_set_rejected(self):
        ds = tiny_dataset(["a"])
        with pytest.raises(InvalidLabel):
            merge_labels(
                make_plan(set(), {"a"}), {}, {"a": "bogus"}, ds, label_set=("x", "y")
            )

    def test_output_covers_dataset_exactly_once(self):
        ds = tiny_dataset(["a", "b", "c", "d"])
        plan = make_plan({"a", "b"}, {"c", "d"})
        votes = {
            "a": majority_vote(response_set("a", ["x"] * 3)),
            "b": majority_vote(response_set("b", ["x", "y"])),  # tie -> escalates
        }
        records = merge_labels(plan, votes, {"b": "y", "c": "x", "d": "y"}, ds)
        assert [r.instance_id for r in records] == ["a", "b", "c", "d"]
        assert escalated_ids(votes) == {"b"}
