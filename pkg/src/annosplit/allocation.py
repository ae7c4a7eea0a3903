"""Dataset splitting between the LLM and human channels.

Three strategies: random (baseline), confidence-guided (lowest self-eval
uncertainty first), entropy-guided (lowest entropy first). Guided strategies
depend only on the ordering of the scores, never their scale, and break
ties by ascending instance_id so plans replay identically.
"""

from __future__ import annotations

import random

from .errors import BudgetOutOfRange, MissingScores
from .model import AllocationPlan, Dataset, Estimator, Strategy, UncertaintyScore
from .uncertainty import scores_by_id


def _check_budget(n: int, m: int) -> None:
    if not 0 <= n <= m:
        raise BudgetOutOfRange(f"budget n={n} outside [0, {m}]")


def allocate_random(dataset: Dataset, n: int, seed: int) -> AllocationPlan:
    """Uniform sample without replacement of size n goes to the LLM."""
    _check_budget(n, dataset.m)
    ids = list(dataset.instance_ids)
    llm = set(random.Random(seed).sample(ids, n))
    return AllocationPlan(
        strategy=Strategy.RANDOM,
        n=n,
        llm_ids=frozenset(llm),
        human_ids=frozenset(set(ids) - llm),
        seed=seed,
    )


def _allocate_sorted(
    dataset: Dataset,
    scores: list[UncertaintyScore],
    n: int,
    estimator: Estimator,
    strategy: Strategy,
) -> AllocationPlan:
    _check_budget(n, dataset.m)
    by_id = scores_by_id(scores, estimator)
    missing = [iid for iid in dataset.instance_ids if iid not in by_id]
    if missing:
        raise MissingScores(missing)
    ranked = sorted(dataset.instance_ids, key=lambda iid: (by_id[iid], iid))
    llm = set(ranked[:n])
    return AllocationPlan(
        strategy=strategy,
        n=n,
        llm_ids=frozenset(llm),
        human_ids=frozenset(set(dataset.instance_ids) - llm),
    )


def allocate_by_confidence(
    dataset: Dataset, scores: list[UncertaintyScore], n: int
) -> AllocationPlan:
    """Most self-confident instances first (lowest u, ties by instance_id)."""
    return _allocate_sorted(
        dataset, scores, n, Estimator.SELF_EVALUATION, Strategy.SELF_EVALUATION
    )


def allocate_by_entropy(
    dataset: Dataset, scores: list[UncertaintyScore], n: int
) -> AllocationPlan:
    """Most consistent instances first (lowest entropy, ties by instance_id)."""
    return _allocate_sorted(dataset, scores, n, Estimator.ENTROPY, Strategy.ENTROPY)


def select_by_threshold(
    scores: list[UncertaintyScore], metric_kind: str, threshold: float
) -> set[str]:
    """Instances the model is certain enough about, by inclusive threshold.

    entropy kind keeps u <= threshold; confidence kind keeps 1 - u >= threshold.
    """
    if metric_kind == "entropy":
        return {s.instance_id for s in scores if s.u <= threshold}
    if metric_kind == "confidence":
        return {s.instance_id for s in scores if 1.0 - s.u >= threshold}
    raise ValueError(f"metric_kind must be 'entropy' or 'confidence', got {metric_kind!r}")
