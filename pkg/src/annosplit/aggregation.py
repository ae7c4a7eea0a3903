"""Final label production: majority vote per instance, then channel merge.

A vote with a unique strictly-greatest count wins. Ties and ambiguous
winners are never broken arbitrarily: the instance escalates to the human
channel and must carry a human label before the merge completes.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

from .errors import EmptyResponses, IncompleteLabels, InvalidLabel
from .model import (
    AMBIGUOUS,
    AllocationPlan,
    Dataset,
    ResponseSet,
    Source,
    normalize_label,
)


@dataclass(frozen=True)
class VoteResult:
    """Outcome of one instance's majority vote; label is None only on a tie."""

    instance_id: str
    label: str | None
    counts: dict[str, int]
    tied: bool
    escalated: bool

    def to_dict(self) -> dict:
        return {
            "instance_id": self.instance_id,
            "label": self.label,
            "counts": dict(self.counts),
            "tied": self.tied,
            "escalated": self.escalated,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "VoteResult":
        return cls(
            instance_id=d["instance_id"],
            label=d.get("label"),
            counts=dict(d["counts"]),
            tied=d["tied"],
            escalated=d["escalated"],
        )


def majority_vote(responses: ResponseSet) -> VoteResult:
    """Most frequent parsed label across the ensemble, with full count detail."""
    if responses.k_used == 0:
        raise EmptyResponses(f"no annotations for {responses.instance_id!r}")
    counts = Counter(responses.labels())
    top = max(counts.values())
    winners = [label for label, c in counts.items() if c == top]
    tied = len(winners) > 1
    label = None if tied else winners[0]
    return VoteResult(
        instance_id=responses.instance_id,
        label=label,
        counts=dict(counts),
        tied=tied,
        escalated=tied or label == AMBIGUOUS,
    )


@dataclass(frozen=True)
class LabeledRecord:
    """One instance of the final labeled dataset, with provenance."""

    instance_id: str
    fields: dict[str, str]
    label: str
    source: Source
    vote_detail: dict[str, int] | None
    escalated: bool

    def to_dict(self) -> dict:
        return {
            "instance_id": self.instance_id,
            "fields": dict(self.fields),
            "label": self.label,
            "source": self.source.value,
            "vote_detail": dict(self.vote_detail) if self.vote_detail is not None else None,
            "escalated": self.escalated,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "LabeledRecord":
        return cls(
            instance_id=d["instance_id"],
            fields=dict(d["fields"]),
            label=d["label"],
            source=Source(d["source"]),
            vote_detail=dict(d["vote_detail"]) if d.get("vote_detail") is not None else None,
            escalated=d.get("escalated", False),
        )


def escalated_ids(llm_votes: dict[str, VoteResult]) -> set[str]:
    return {iid for iid, vote in llm_votes.items() if vote.escalated}


def merge_labels(
    plan: AllocationPlan,
    llm_votes: dict[str, VoteResult],
    human_labels: dict[str, str],
    dataset: Dataset,
    label_set: tuple[str, ...] | None = None,
) -> list[LabeledRecord]:
    """Combine LLM votes and human labels into one labeled dataset.

    Escalated instances (tie or ambiguous winner) take their label from
    human_labels even though they sit in the plan's LLM channel. Raises
    IncompleteLabels listing every instance that cannot be resolved.
    """
    human_labels = {iid: normalize_label(label) for iid, label in human_labels.items()}
    if label_set is not None:
        for iid, label in human_labels.items():
            if label not in label_set:
                raise InvalidLabel(f"human label {label!r} for {iid!r} is not in the label set")

    unresolved: list[str] = []
    records: list[LabeledRecord] = []
    for inst in dataset.instances:
        iid = inst.instance_id
        if iid in plan.llm_ids:
            vote = llm_votes.get(iid)
            if vote is None:
                unresolved.append(iid)
                continue
            if vote.escalated:
                if iid not in human_labels:
                    unresolved.append(iid)
                    continue
                records.append(
                    LabeledRecord(iid, dict(inst.fields), human_labels[iid],
                                  Source.HUMAN, dict(vote.counts), True)
                )
            else:
                records.append(
                    LabeledRecord(iid, dict(inst.fields), vote.label,
                                  Source.LLM, dict(vote.counts), False)
                )
        elif iid in plan.human_ids:
            if iid not in human_labels:
                unresolved.append(iid)
                continue
            records.append(
                LabeledRecord(iid, dict(inst.fields), human_labels[iid],
                              Source.HUMAN, None, False)
            )
        else:
            unresolved.append(iid)

    if unresolved:
        raise IncompleteLabels(unresolved)
    return records
