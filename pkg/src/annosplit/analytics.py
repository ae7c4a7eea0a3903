"""Cost accounting, quality metrics, threshold sweeps, and Pareto analysis.

Costs are computed in decimal arithmetic so reported amounts are exact to
the smallest currency unit; they only become floats at the plot/point
boundary. Quality is measured as alignment with gold labels (or macro F1)
because the engine's output is the labeled dataset itself.
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import Decimal

import numpy as np

from . import kernels
from .aggregation import VoteResult, majority_vote
from .allocation import allocate_by_confidence, allocate_by_entropy, allocate_random, select_by_threshold
from .errors import EmptyPointSet, MissingGold, MissingTimeConfig
from .model import (
    AMBIGUOUS,
    CostModel,
    Dataset,
    Estimator,
    ParetoPoint,
    ResponseSet,
    Strategy,
    UncertaintyScore,
)
from .uncertainty import batch_uncertainty


def llm_cost(response_sets: list[ResponseSet], cost_model: CostModel) -> Decimal:
    """Token cost of every annotation: sum(tokens) / 1000 * price."""
    total_tokens = sum(a.token_count_in for rs in response_sets for a in rs.annotations)
    price = Decimal(str(cost_model.llm_price_per_1k_tokens))
    return Decimal(total_tokens) * price / Decimal(1000)


def human_cost(num_instances: int, cost_model: CostModel) -> Decimal:
    """Wage cost: instances * annotators * seconds / 3600 * hourly wage."""
    if cost_model.seconds_per_instance is None:
        raise MissingTimeConfig("cost model has no seconds_per_instance")
    wage = Decimal(str(cost_model.human_wage_per_hour))
    seconds = Decimal(str(cost_model.seconds_per_instance))
    return (
        Decimal(num_instances)
        * Decimal(cost_model.annotators_per_instance)
        * seconds
        * wage
        / Decimal(3600)
    )


def alignment(labels: dict[str, str | None], gold: dict[str, str]) -> float:
    """Fraction of produced labels equal to gold; ambiguous never matches."""
    if not labels:
        raise MissingGold("empty evaluation set")
    missing = [iid for iid in labels if iid not in gold]
    if missing:
        raise MissingGold(f"no gold label for: {', '.join(sorted(missing))}")
    hits = sum(
        1
        for iid, label in labels.items()
        if label is not None and label != AMBIGUOUS and label == gold[iid]
    )
    return hits / len(labels)


def macro_f1(
    labels: dict[str, str | None], gold: dict[str, str], label_set: tuple[str, ...]
) -> float:
    """Unweighted mean F1 over the declared label set.

    Classes absent from both predictions and gold contribute F1 = 0, which
    keeps the denominator stable across strategies. Ambiguous predictions
    are an always-wrong class outside the label set.
    """
    if not labels:
        raise MissingGold("empty evaluation set")
    missing = [iid for iid in labels if iid not in gold]
    if missing:
        raise MissingGold(f"no gold label for: {', '.join(sorted(missing))}")
    f1_total = 0.0
    for cls in label_set:
        tp = fp = fn = 0
        for iid, pred in labels.items():
            g = gold[iid]
            if pred == cls and g == cls:
                tp += 1
            elif pred == cls:
                fp += 1
            elif g == cls:
                fn += 1
        precision = tp / (tp + fp) if tp + fp else 0.0
        recall = tp / (tp + fn) if tp + fn else 0.0
        f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
        f1_total += f1
    return f1_total / len(label_set)


@dataclass(frozen=True)
class SweepRow:
    """One threshold setting: how much data is selected and how well it aligns."""

    threshold: float
    coverage: float
    alignment: float | None  # None when the selection is empty

    def to_dict(self) -> dict:
        return {
            "threshold": self.threshold,
            "coverage": self.coverage,
            "alignment": self.alignment,
        }


def threshold_sweep(
    scores: list[UncertaintyScore],
    response_sets: dict[str, ResponseSet],
    gold: dict[str, str],
    metric_kind: str,
    thresholds: list[float],
) -> list[SweepRow]:
    """Selected fraction and majority-vote alignment at each threshold."""
    votes = {iid: majority_vote(rs) for iid, rs in response_sets.items()}
    total = len(scores)
    rows = []
    for t in thresholds:
        selected = select_by_threshold(scores, metric_kind, t)
        coverage = len(selected) / total if total else 0.0
        if selected:
            picked = {iid: votes[iid].label for iid in selected}
            rows.append(SweepRow(t, coverage, alignment(picked, gold)))
        else:
            rows.append(SweepRow(t, coverage, None))
    return rows


def gold_labels(dataset: Dataset) -> dict[str, str]:
    gold = {
        inst.instance_id: inst.gold_label
        for inst in dataset.instances
        if inst.gold_label is not None
    }
    missing = [iid for iid in dataset.instance_ids if iid not in gold]
    if missing:
        raise MissingGold(f"instances without gold labels: {', '.join(missing[:5])}"
                          + ("..." if len(missing) > 5 else ""))
    return gold


def budget_for_fraction(fraction: float, m: int) -> int:
    # round() ties go to even budgets, matching the documented fraction grid
    return round(fraction * m)


@dataclass(frozen=True)
class PointBreakdown:
    """A Pareto point plus the channel accounting that produced it."""

    point: ParetoPoint
    llm_cost: Decimal
    human_cost: Decimal
    n_llm: int
    n_human: int
    n_escalated: int


def evaluate_configuration(
    dataset: Dataset,
    response_sets: dict[str, ResponseSet],
    strategy: Strategy,
    fraction: float,
    cost_model: CostModel,
    scores: list[UncertaintyScore] | None = None,
    seed: int = 0,
    quality_metric: str = "alignment",
) -> PointBreakdown:
    """Run one (strategy, fraction) split on pilot data and price it.

    The human channel and every escalated instance take their labels from
    gold (human annotation is the gold source on pilot data); the LLM
    channel takes majority votes. Cost counts tokens for every LLM-channel
    instance, escalated or not, plus wages for humans and escalations.
    """
    gold = gold_labels(dataset)
    m = dataset.m
    n = budget_for_fraction(fraction, m)
    strategy = Strategy(strategy)
    if strategy is Strategy.RANDOM:
        plan = allocate_random(dataset, n, seed)
    elif strategy is Strategy.ENTROPY:
        plan = allocate_by_entropy(dataset, scores or [], n)
    else:
        plan = allocate_by_confidence(dataset, scores or [], n)

    votes: dict[str, VoteResult] = {
        iid: majority_vote(response_sets[iid]) for iid in plan.llm_ids
    }
    escalated = {iid for iid, v in votes.items() if v.escalated}

    merged: dict[str, str | None] = {}
    for iid in dataset.instance_ids:
        if iid in plan.llm_ids and iid not in escalated:
            merged[iid] = votes[iid].label
        else:
            merged[iid] = gold[iid]

    llm = llm_cost([response_sets[iid] for iid in sorted(plan.llm_ids)], cost_model)
    human = human_cost(len(plan.human_ids) + len(escalated), cost_model)

    if quality_metric == "macro_f1":
        label_set = tuple(sorted(set(gold.values())))
        quality = macro_f1(merged, gold, label_set)
    else:
        quality = alignment(merged, gold)

    point = ParetoPoint(
        strategy=strategy,
        llm_fraction=fraction,
        total_cost=float(llm + human),
        quality=quality,
    )
    return PointBreakdown(
        point=point,
        llm_cost=llm,
        human_cost=human,
        n_llm=len(plan.llm_ids),
        n_human=len(plan.human_ids),
        n_escalated=len(escalated),
    )


def build_points(
    dataset: Dataset,
    response_sets: dict[str, ResponseSet],
    strategies: list[Strategy],
    fractions: list[float],
    cost_model: CostModel,
    seed: int = 0,
    quality_metric: str = "alignment",
) -> list[ParetoPoint]:
    """The full (strategy x fraction) grid of cost-quality points."""
    scores_cache: dict[Estimator, list[UncertaintyScore]] = {}

    def scores_for(strategy: Strategy) -> list[UncertaintyScore] | None:
        if strategy is Strategy.RANDOM:
            return None
        estimator = (
            Estimator.ENTROPY if strategy is Strategy.ENTROPY else Estimator.SELF_EVALUATION
        )
        if estimator not in scores_cache:
            scores_cache[estimator] = batch_uncertainty(dataset, response_sets, estimator)
        return scores_cache[estimator]

    points = []
    for strategy in strategies:
        strategy = Strategy(strategy)
        for fraction in fractions:
            points.append(
                evaluate_configuration(
                    dataset,
                    response_sets,
                    strategy,
                    fraction,
                    cost_model,
                    scores=scores_for(strategy),
                    seed=seed,
                    quality_metric=quality_metric,
                ).point
            )
    return points


@dataclass(frozen=True)
class ParetoResult:
    """Every point with its efficiency flag, plus the ordered frontier."""

    points: list[ParetoPoint]
    frontier: list[ParetoPoint]  # efficient points sorted by cost


def pareto_frontier(points: list[ParetoPoint]) -> ParetoResult:
    """Flag non-dominated points and return the cost-ordered frontier."""
    if not points:
        raise EmptyPointSet("no points to analyze")
    costs = np.array([p.total_cost for p in points], dtype=np.float64)
    qualities = np.array([p.quality for p in points], dtype=np.float64)
    flags = kernels.dominance_flags(costs, qualities)
    flagged = [p.with_efficient(bool(f)) for p, f in zip(points, flags)]
    frontier = sorted(
        (p for p in flagged if p.efficient), key=lambda p: (p.total_cost, p.quality)
    )
    return ParetoResult(points=flagged, frontier=frontier)


def frontier_quality_at(frontier: list[ParetoPoint], cost: float) -> float:
    """Linear interpolation along the frontier polyline, clamped at the ends."""
    if not frontier:
        raise EmptyPointSet("empty frontier")
    xs = np.array([p.total_cost for p in frontier])
    ys = np.array([p.quality for p in frontier])
    return float(np.interp(cost, xs, ys))
