import json

import pytest

from annosplit.cli import main
from annosplit.model import Dataset, Instance
from annosplit.pipeline import demo_task, synthetic_dataset
from annosplit.storage import (
    load_labeled,
    load_plan,
    load_points,
    read_jsonl,
    save_dataset,
    save_task_config,
)


@pytest.fixture()
def workdir(tmp_path):
    config = demo_task()
    dataset = synthetic_dataset(config, 12, seed=6)
    save_task_config(tmp_path / "task.json", config)
    save_dataset(tmp_path / "dataset.jsonl", dataset)
    return tmp_path


def run(*argv):
    return main([str(a) for a in argv])


def test_validate_clean_dataset(workdir, capsys):
    assert run("validate", "--config", workdir / "task.json",
               "--dataset", workdir / "dataset.jsonl") == 0
    assert "no violations" in capsys.readouterr().out


def test_validate_reports_violations(workdir, capsys):
    bad = Dataset((
        Instance("x1", {"sentence1": "a", "sentence2": "b"}),
        Instance("x1", {"sentence1": "c"}),
    ))
    save_dataset(workdir / "bad.jsonl", bad)
    assert run("validate", "--config", workdir / "task.json",
               "--dataset", workdir / "bad.jsonl") == 1
    out = capsys.readouterr().out
    assert "duplicate_instance_id" in out and "missing_slot" in out


def annotate(workdir, *extra):
    assert run(
        "annotate-llm", "--config", workdir / "task.json",
        "--dataset", workdir / "dataset.jsonl",
        "--out", workdir / "responses.jsonl", "--mock-seed", "3", *extra,
    ) == 0


def test_full_pipeline_through_merge(workdir):
    annotate(workdir)
    assert run(
        "score", "--config", workdir / "task.json",
        "--dataset", workdir / "dataset.jsonl",
        "--responses", workdir / "responses.jsonl",
        "--out", workdir / "scores.jsonl",
    ) == 0
    rows = read_jsonl(workdir / "scores.jsonl")
    assert {r["estimator"] for r in rows} == {"entropy", "self_evaluation"}
    assert len(rows) == 24  # both estimators over 12 instances

    assert run(
        "allocate", "--config", workdir / "task.json",
        "--dataset", workdir / "dataset.jsonl",
        "--strategy", "entropy", "--fraction", "0.4",
        "--scores", workdir / "scores.jsonl",
        "--out", workdir / "plan.jsonl",
    ) == 0
    plan = load_plan(workdir / "plan.jsonl")
    assert plan.n == round(0.4 * 12)

    # human labels for the human channel and any escalations: use gold
    dataset_rows = read_jsonl(workdir / "dataset.jsonl")
    human = [
        {"instance_id": r["instance_id"], "label": r["gold_label"]}
        for r in dataset_rows
    ]
    with open(workdir / "human.jsonl", "w") as fh:
        for row in human:
            fh.write(json.dumps(row) + "\n")

    assert run(
        "merge", "--config", workdir / "task.json",
        "--dataset", workdir / "dataset.jsonl",
        "--plan", workdir / "plan.jsonl",
        "--responses", workdir / "responses.jsonl",
        "--human-labels", workdir / "human.jsonl",
        "--out", workdir / "labeled.jsonl",
    ) == 0
    labeled = load_labeled(workdir / "labeled.jsonl")
    assert len(labeled) == 12


def test_allocate_guided_requires_scores(workdir, capsys):
    assert run(
        "allocate", "--config", workdir / "task.json",
        "--dataset", workdir / "dataset.jsonl",
        "--strategy", "entropy", "--fraction", "0.5",
        "--out", workdir / "plan.jsonl",
    ) == 2
    assert "--scores" in capsys.readouterr().err


def test_allocate_needs_exactly_one_budget_flag(workdir, capsys):
    assert run(
        "allocate", "--config", workdir / "task.json",
        "--dataset", workdir / "dataset.jsonl",
        "--strategy", "random",
        "--out", workdir / "plan.jsonl",
    ) == 2


def test_sweep_table(workdir, capsys):
    annotate(workdir)
    assert run(
        "sweep", "--config", workdir / "task.json",
        "--dataset", workdir / "dataset.jsonl",
        "--responses", workdir / "responses.jsonl",
        "--metric", "entropy",
        "--out", workdir / "sweep.jsonl",
    ) == 0
    rows = read_jsonl(workdir / "sweep.jsonl")
    assert len(rows) == 9
    assert rows[-1]["coverage"] == 1.0


def test_pareto_grid_and_plot(workdir):
    annotate(workdir)
    assert run(
        "pareto", "--config", workdir / "task.json",
        "--dataset", workdir / "dataset.jsonl",
        "--responses", workdir / "responses.jsonl",
        "--seconds-per-instance", "12",
        "--out-dir", workdir / "analysis",
        "--plot", workdir / "analysis" / "pareto.png",
    ) == 0
    points = load_points(workdir / "analysis" / "points.jsonl")
    assert len(points) == 18
    assert any(p.efficient for p in points)
    assert (workdir / "analysis" / "pareto.png").stat().st_size > 0


def test_pareto_accepts_cost_model_file(workdir):
    annotate(workdir)
    (workdir / "costs.json").write_text(json.dumps({
        "llm_price_per_1k_tokens": 0.004,
        "human_wage_per_hour": 20,
        "annotators_per_instance": 3,
        "seconds_per_instance": 10,
    }))
    assert run(
        "pareto", "--config", workdir / "task.json",
        "--dataset", workdir / "dataset.jsonl",
        "--responses", workdir / "responses.jsonl",
        "--cost-model", workdir / "costs.json",
        "--out-dir", workdir / "analysis2",
    ) == 0
    points = load_points(workdir / "analysis2" / "points.jsonl")
    full_human = next(p for p in points if p.llm_fraction == 0.0)
    assert full_human.total_cost == pytest.approx(12 * 3 * 10 / 3600 * 20)


def test_pareto_without_gold_reports_missing_gold(workdir, capsys):
    config = demo_task()
    no_gold = Dataset(tuple(
        Instance(i.instance_id, dict(i.fields))
        for i in synthetic_dataset(config, 6, seed=1).instances
    ))
    save_dataset(workdir / "nogold.jsonl", no_gold)
    assert run(
        "annotate-llm", "--config", workdir / "task.json",
        "--dataset", workdir / "nogold.jsonl",
        "--out", workdir / "ng-responses.jsonl",
    ) == 0
    code = run(
        "pareto", "--config", workdir / "task.json",
        "--dataset", workdir / "nogold.jsonl",
        "--responses", workdir / "ng-responses.jsonl",
        "--seconds-per-instance", "12",
        "--out-dir", workdir / "analysis",
    )
    assert code == 2
    assert "MissingGold" in capsys.readouterr().err


def test_simulate_prints_point_table(workdir, capsys):
    assert run(
        "simulate", "--out", workdir / "sim", "--seed", "7",
        "--num-instances", "20",
    ) == 0
    out = capsys.readouterr().out
    assert out.count("\n") >= 19  # header + 18 point rows
    assert (workdir / "sim" / "points.jsonl").exists()
