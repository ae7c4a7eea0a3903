from annosplit.aggregation import LabeledRecord
from annosplit.gateway import GatewayConfig, MockAnnotatorSpec
from annosplit.model import AllocationPlan, Source, Strategy
from annosplit.pipeline import annotate_dataset, demo_task, synthetic_dataset
from annosplit.storage import (
    load_dataset,
    load_plan,
    load_response_sets,
    load_scores,
    load_task_config,
    save_dataset,
    save_plan,
    save_response_sets,
    save_scores,
    save_task_config,
    save_labeled,
    load_labeled,
)
from annosplit.uncertainty import batch_uncertainty
from annosplit.model import Estimator


def test_file_round_trips(tmp_path):
    config = demo_task(k=3)
    dataset = synthetic_dataset(config, 4, seed=0)
    responses = annotate_dataset(config, dataset, GatewayConfig(), MockAnnotatorSpec(seed=0))
    scores = batch_uncertainty(dataset, responses, Estimator.ENTROPY)
    plan = AllocationPlan(
        Strategy.ENTROPY, 2,
        frozenset(dataset.instance_ids[:2]), frozenset(dataset.instance_ids[2:]),
    )
    labeled = [
        LabeledRecord("a", {"f": "v"}, "paraphrase", Source.LLM, {"paraphrase": 3}, False),
        LabeledRecord("b", {"f": "v"}, "not paraphrase", Source.HUMAN, None, True),
    ]

    save_task_config(tmp_path / "task.json", config)
    save_dataset(tmp_path / "d.jsonl", dataset)
    save_response_sets(tmp_path / "r.jsonl", responses)
    save_scores(tmp_path / "s.jsonl", scores)
    save_plan(tmp_path / "p.jsonl", plan)
    save_labeled(tmp_path / "l.jsonl", labeled)

    assert load_task_config(tmp_path / "task.json") == config
    assert load_dataset(tmp_path / "d.jsonl") == dataset
    assert load_response_sets(tmp_path / "r.jsonl") == responses
    assert load_scores(tmp_path / "s.jsonl") == scores
    assert load_plan(tmp_path / "p.jsonl") == plan
    assert load_labeled(tmp_path / "l.jsonl") == labeled


def test_writers_are_stable(tmp_path):
    config = demo_task(k=3)
    dataset = synthetic_dataset(config, 4, seed=0)
    responses = annotate_dataset(config, dataset, GatewayConfig(), MockAnnotatorSpec(seed=0))
    save_response_sets(tmp_path / "r1.jsonl", responses)
    save_response_sets(tmp_path / "r2.jsonl", dict(reversed(list(responses.items()))))
    assert (tmp_path / "r1.jsonl").read_bytes() == (tmp_path / "r2.jsonl").read_bytes()
