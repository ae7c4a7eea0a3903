"""File formats for every pipeline artifact.

Everything is UTF-8: task configs are single JSON documents, all other
artifacts are line-delimited JSON so they stream and diff cleanly. Writers
sort keys and end lines with \\n, which keeps replayed runs byte-identical.
"""

from __future__ import annotations

import json
import os
from pathlib import Path

from .aggregation import LabeledRecord
from .model import (
    AllocationPlan,
    CostModel,
    Dataset,
    Instance,
    ParetoPoint,
    Strategy,
    TaskConfig,
    UncertaintyScore,
    ResponseSet,
)


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, ensure_ascii=False)


def read_jsonl(path: str | Path) -> list[dict]:
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                rows.append(json.loads(line))
    return rows


def write_jsonl(path: str | Path, rows: list[dict]) -> None:
    # write-then-rename so readers never observe a half-written artifact
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(path.suffix + ".tmp")
    with open(tmp, "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(dumps(row) + "\n")
    os.replace(tmp, path)


def load_task_config(path: str | Path) -> TaskConfig:
    return TaskConfig.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def save_task_config(path: str | Path, config: TaskConfig) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(config.to_dict()) + "\n", encoding="utf-8")


def load_dataset(path: str | Path) -> Dataset:
    return Dataset(tuple(Instance.from_dict(r) for r in read_jsonl(path)))


def save_dataset(path: str | Path, dataset: Dataset) -> None:
    write_jsonl(path, dataset.to_dicts())


def load_response_sets(path: str | Path) -> dict[str, ResponseSet]:
    sets = [ResponseSet.from_dict(r) for r in read_jsonl(path)]
    return {rs.instance_id: rs for rs in sets}


def save_response_sets(path: str | Path, response_sets: dict[str, ResponseSet]) -> None:
    write_jsonl(path, [response_sets[iid].to_dict() for iid in sorted(response_sets)])


def load_scores(path: str | Path) -> list[UncertaintyScore]:
    return [UncertaintyScore.from_dict(r) for r in read_jsonl(path)]


def save_scores(path: str | Path, scores: list[UncertaintyScore]) -> None:
    write_jsonl(path, [s.to_dict() for s in scores])


def save_plan(path: str | Path, plan: AllocationPlan) -> None:
    rows = [
        {
            "instance_id": iid,
            "channel": "llm" if iid in plan.llm_ids else "human",
            "strategy": plan.strategy.value,
            "n": plan.n,
            "seed": plan.seed,
        }
        for iid in sorted(plan.llm_ids | plan.human_ids)
    ]
    write_jsonl(path, rows)


def load_plan(path: str | Path) -> AllocationPlan:
    rows = read_jsonl(path)
    if not rows:
        raise ValueError(f"empty plan file: {path}")
    llm = frozenset(r["instance_id"] for r in rows if r["channel"] == "llm")
    human = frozenset(r["instance_id"] for r in rows if r["channel"] == "human")
    return AllocationPlan(
        strategy=Strategy(rows[0]["strategy"]),
        n=rows[0]["n"],
        llm_ids=llm,
        human_ids=human,
        seed=rows[0].get("seed"),
    )


def save_labeled(path: str | Path, records: list[LabeledRecord]) -> None:
    write_jsonl(path, [r.to_dict() for r in records])


def load_labeled(path: str | Path) -> list[LabeledRecord]:
    return [LabeledRecord.from_dict(r) for r in read_jsonl(path)]


def save_points(path: str | Path, points: list[ParetoPoint]) -> None:
    write_jsonl(path, [p.to_dict() for p in points])


def load_points(path: str | Path) -> list[ParetoPoint]:
    return [ParetoPoint.from_dict(r) for r in read_jsonl(path)]


def load_cost_model(path: str | Path) -> CostModel:
    return CostModel.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))
