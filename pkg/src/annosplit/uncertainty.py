"""Per-instance uncertainty estimators over a prompt-ensemble response set.

Two estimators: response entropy (frequency of each parsed label across the
k prompts, ambiguous answers counted as their own class) and self-evaluation
(one minus the mean self-reported confidence). Both are order-invariant in
the responses.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import ConfigError, EmptyResponses, MissingResponses
from .model import Dataset, Estimator, ResponseSet, UncertaintyScore

# Neutral midpoint of the confidence scale, substituted when a response
# carries no extractable confidence; such scores are flagged imputed.
MISSING_CONFIDENCE = 0.5


@dataclass(frozen=True)
class ResponseDistribution:
    """Occurrence counts of parsed labels for one instance."""

    instance_id: str
    counts: dict[str, int]
    k_used: int

    @classmethod
    def from_response_set(cls, responses: ResponseSet) -> "ResponseDistribution":
        counts = dict(Counter(responses.labels()))
        return cls(
            instance_id=responses.instance_id,
            counts=counts,
            k_used=responses.k_used,
        )


def counts_matrix(
    response_sets: list[ResponseSet], columns: tuple[str, ...]
) -> np.ndarray:
    """Stack per-instance label counts into an (m, L) float64 matrix."""
    index = {label: i for i, label in enumerate(columns)}
    out = np.zeros((len(response_sets), len(columns)), dtype=np.float64)
    for row, rs in enumerate(response_sets):
        for label in rs.labels():
            out[row, index[label]] += 1.0
    return out


def entropy_uncertainty(responses: ResponseSet) -> UncertaintyScore:
    """u = -sum p ln p over the parsed-label frequencies (natural log)."""
    if responses.k_used == 0:
        raise EmptyResponses(f"no annotations for {responses.instance_id!r}")
    counts = np.array(
        [list(Counter(responses.labels()).values())], dtype=np.float64
    )
    u = float(kernels.entropy_from_counts(counts)[0])
    return UncertaintyScore(
        instance_id=responses.instance_id,
        estimator=Estimator.ENTROPY,
        u=max(u, 0.0),
        k_used=responses.k_used,
    )


def self_eval_uncertainty(responses: ResponseSet) -> UncertaintyScore:
    """u = 1 - mean self-reported confidence; missing values become 0.5."""
    if responses.k_used == 0:
        raise EmptyResponses(f"no annotations for {responses.instance_id!r}")
    imputed = False
    total = 0.0
    for a in responses.annotations:
        if a.confidence is None:
            total += MISSING_CONFIDENCE
            imputed = True
        else:
            total += a.confidence
    u = 1.0 - total / responses.k_used
    return UncertaintyScore(
        instance_id=responses.instance_id,
        estimator=Estimator.SELF_EVALUATION,
        u=min(max(u, 0.0), 1.0),
        k_used=responses.k_used,
        imputed=imputed,
    )


def batch_uncertainty(
    dataset: Dataset,
    response_sets: dict[str, ResponseSet],
    estimator: Estimator,
) -> list[UncertaintyScore]:
    """Score every instance, in dataset order; every instance must have responses."""
    estimator = Estimator(estimator)
    missing = [iid for iid in dataset.instance_ids if iid not in response_sets]
    if missing:
        raise MissingResponses(missing)

    ordered = [response_sets[iid] for iid in dataset.instance_ids]
    if estimator is Estimator.SELF_EVALUATION:
        return [self_eval_uncertainty(rs) for rs in ordered]
    if not ordered:
        return []
    for rs in ordered:
        if rs.k_used == 0:
            raise EmptyResponses(f"no annotations for {rs.instance_id!r}")
    columns = tuple(sorted({label for rs in ordered for label in rs.labels()}))
    entropies = kernels.entropy_from_counts(counts_matrix(ordered, columns))
    return [
        UncertaintyScore(
            instance_id=rs.instance_id,
            estimator=Estimator.ENTROPY,
            u=max(float(h), 0.0),
            k_used=rs.k_used,
        )
        for rs, h in zip(ordered, entropies)
    ]


def scores_by_id(scores: list[UncertaintyScore], estimator: Estimator) -> dict[str, float]:
    """Index scores by instance, rejecting mixed estimators."""
    out: dict[str, float] = {}
    for s in scores:
        if s.estimator is not Estimator(estimator):
            raise ConfigError(
                f"expected {Estimator(estimator).value} scores, got {s.estimator.value}"
            )
        out[s.instance_id] = s.u
    return out
