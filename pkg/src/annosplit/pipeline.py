"""End-to-end orchestration: annotate a dataset, score it, price the grid.

Also home of the seeded simulation: a synthetic gold-labeled pilot dataset
annotated by the mock backend, which exercises every stage of the engine
offline and reproduces the qualitative uncertainty-quality relationship
(alignment falls as the entropy threshold rises; entropy-guided allocation
beats random at equal budgets).
"""

from __future__ import annotations

import math
import random
from pathlib import Path

from .analytics import (
    build_points,
    pareto_frontier,
    threshold_sweep,
)
from .gateway import Gateway, GatewayConfig, MockAnnotatorSpec
from .model import (
    CostModel,
    Dataset,
    Estimator,
    Instance,
    PerturbationMode,
    ResponseSet,
    Strategy,
    TaskConfig,
)
from .prompts import PromptSet, PromptTemplate, RenderedPrompt, confidence_suffix, render_prompt_set
from .storage import (
    save_dataset,
    save_points,
    save_response_sets,
    save_scores,
    save_task_config,
    write_jsonl,
)
from .uncertainty import batch_uncertainty

DEFAULT_FRACTIONS = (0.0, 0.2, 0.4, 0.6, 0.8, 1.0)
DEFAULT_STRATEGIES = (Strategy.RANDOM, Strategy.SELF_EVALUATION, Strategy.ENTROPY)


def with_confidence_request(prompt_set: PromptSet) -> PromptSet:
    """Ask every prompt in the ensemble for a self-reported confidence."""
    return PromptSet(
        instance_id=prompt_set.instance_id,
        prompts=tuple(
            RenderedPrompt(p.prompt_type, confidence_suffix(p.text))
            for p in prompt_set.prompts
        ),
    )


def annotate_dataset(
    config: TaskConfig,
    dataset: Dataset,
    gateway_config: GatewayConfig,
    mock_spec: MockAnnotatorSpec | None = None,
    ask_confidence: bool = True,
    templates: list[PromptTemplate] | None = None,
) -> dict[str, ResponseSet]:
    """Render and annotate every instance's prompt ensemble."""
    gold = {
        inst.instance_id: inst.gold_label
        for inst in dataset.instances
        if inst.gold_label is not None
    }
    gateway = Gateway(gateway_config, config, mock_spec, gold_labels=gold, templates=templates)
    out: dict[str, ResponseSet] = {}
    for inst in dataset.instances:
        prompt_set = render_prompt_set(inst, config, templates)
        if ask_confidence:
            prompt_set = with_confidence_request(prompt_set)
        out[inst.instance_id] = gateway.annotate(prompt_set)
    return out


def demo_task(
    k: int = 7, mode: PerturbationMode = PerturbationMode.DISTINCT_PROMPTS
) -> TaskConfig:
    """Binary sentence-pair task used by the simulation and the examples."""
    return TaskConfig(
        task_id="demo-pairs",
        label_set=("paraphrase", "not paraphrase"),
        instruction_text="Please label if the following two sentences are paraphrases of each other.",
        field_schema=("sentence1", "sentence2"),
        k=k,
        perturbation_mode=mode,
    )


_TOPICS = (
    "the quarterly budget", "the river cleanup", "a stadium proposal", "the transit strike",
    "a software release", "the harvest forecast", "an election recount", "the museum opening",
)
_VERBS = ("reviewed", "postponed", "approved", "disputed", "announced", "celebrated")


def synthetic_dataset(config: TaskConfig, num_instances: int, seed: int) -> Dataset:
    """Deterministic gold-labeled sentence pairs for pilot simulations."""
    rng = random.Random(seed)
    instances = []
    width = len(str(max(num_instances, 1)))
    for i in range(num_instances):
        topic = rng.choice(_TOPICS)
        verb = rng.choice(_VERBS)
        gold = rng.choice(config.label_set)
        first = f"The council {verb} {topic} on day {i + 1}."
        if gold == config.label_set[0]:
            second = f"On day {i + 1}, {topic} was {verb} by the council."
        else:
            second = f"The weather on day {i + 1} stayed calm near the coast."
        instances.append(
            Instance(
                instance_id=f"inst-{i + 1:0{width}d}",
                fields={"sentence1": first, "sentence2": second},
                gold_label=gold,
            )
        )
    return Dataset(tuple(instances))


def default_entropy_thresholds(k: int, steps: int = 9) -> list[float]:
    """Evenly spaced entropy cutoffs from 0 to ln(k)."""
    top = math.log(k)
    return [top * i / (steps - 1) for i in range(steps)]


def simulate_run(
    out_dir: str | Path,
    seed: int = 0,
    num_instances: int = 1000,
    fractions: tuple[float, ...] = DEFAULT_FRACTIONS,
    strategies: tuple[Strategy, ...] = DEFAULT_STRATEGIES,
    k: int = 7,
    cost_model: CostModel | None = None,
    ambiguous_rate: float = 0.03,
    quality_metric: str = "alignment",
) -> dict:
    """Mock-annotator end-to-end run; writes all artifacts under out_dir.

    Outputs are a pure function of the arguments: rerunning with the same
    seed produces byte-identical files.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    cost_model = cost_model or CostModel(seconds_per_instance=30.0)

    config = demo_task(k=k)
    dataset = synthetic_dataset(config, num_instances, seed)
    mock_spec = MockAnnotatorSpec(seed=seed, ambiguous_rate=ambiguous_rate)
    responses = annotate_dataset(
        config, dataset, GatewayConfig(backend="mock"), mock_spec, ask_confidence=True
    )

    entropy_scores = batch_uncertainty(dataset, responses, Estimator.ENTROPY)
    confidence_scores = batch_uncertainty(dataset, responses, Estimator.SELF_EVALUATION)

    gold = {inst.instance_id: inst.gold_label for inst in dataset.instances}
    sweep = threshold_sweep(
        entropy_scores, responses, gold, "entropy", default_entropy_thresholds(k)
    )

    points = build_points(
        dataset, responses, list(strategies), list(fractions), cost_model,
        seed=seed, quality_metric=quality_metric,
    )
    result = pareto_frontier(points)

    save_task_config(out / "task.json", config)
    save_dataset(out / "dataset.jsonl", dataset)
    save_response_sets(out / "responses.jsonl", responses)
    save_scores(out / "scores.jsonl", entropy_scores + confidence_scores)
    write_jsonl(out / "sweep.jsonl", [r.to_dict() for r in sweep])
    save_points(out / "points.jsonl", result.points)
    save_points(out / "frontier.jsonl", result.frontier)

    summary = {
        "task_id": config.task_id,
        "seed": seed,
        "num_instances": num_instances,
        "k": k,
        "strategies": [Strategy(s).value for s in strategies],
        "fractions": list(fractions),
        "num_points": len(result.points),
        "num_efficient": len(result.frontier),
        "quality_metric": quality_metric,
    }
    write_jsonl(out / "summary.json", [summary])
    return summary
