"""Domain types shared across the engine.

Everything here is an immutable value with validation at construction and
dict round-trip serialization; behavior lives in the sibling modules.
Labels are case-normalized once, at load, so that membership tests and
vote counting never depend on surface form.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum

from .errors import ConfigError

# Sentinel label for non-answers ("I cannot determine ..."). Counted as its
# own class everywhere; never a member of a user label set.
AMBIGUOUS = "__ambiguous__"

# The prompt engine ships this many perturbation types; distinct-prompt
# ensembles cannot be larger.
N_PROMPT_TYPES = 7

_TRAILING_PUNCT = ".,;:!?\"'`)]}"


def normalize_label(s: str) -> str:
    """Lowercase, strip surrounding whitespace and trailing punctuation."""
    s = s.strip().lower()
    return s.rstrip(_TRAILING_PUNCT + " \t\r\n")


class PerturbationMode(str, Enum):
    DISTINCT_PROMPTS = "distinct_prompts"
    SAME_PROMPT = "same_prompt"


class Estimator(str, Enum):
    ENTROPY = "entropy"
    SELF_EVALUATION = "self_evaluation"


class Strategy(str, Enum):
    RANDOM = "random"
    SELF_EVALUATION = "self_evaluation"
    ENTROPY = "entropy"


class Source(str, Enum):
    LLM = "llm"
    HUMAN = "human"


@dataclass(frozen=True)
class TaskConfig:
    """One annotation task: labels, instruction, instance schema, ensemble size."""

    task_id: str
    label_set: tuple[str, ...]
    instruction_text: str
    field_schema: tuple[str, ...]
    k: int = 7
    perturbation_mode: PerturbationMode = PerturbationMode.DISTINCT_PROMPTS

    def __post_init__(self):
        if not self.task_id:
            raise ConfigError("task_id must be non-empty")
        labels = tuple(normalize_label(l) for l in self.label_set)
        object.__setattr__(self, "label_set", labels)
        if len(labels) < 2:
            raise ConfigError("label_set needs at least 2 labels")
        if any(not l for l in labels):
            raise ConfigError("label_set entries must be non-empty after normalization")
        if len(set(labels)) != len(labels):
            raise ConfigError("label_set entries must be unique after normalization")
        if AMBIGUOUS in labels:
            raise ConfigError(f"{AMBIGUOUS!r} is a reserved sentinel, not a usable label")
        schema = tuple(self.field_schema)
        object.__setattr__(self, "field_schema", schema)
        if not schema or any(not s for s in schema):
            raise ConfigError("field_schema must list non-empty slot names")
        if len(set(schema)) != len(schema):
            raise ConfigError("field_schema slot names must be unique")
        if self.k < 1:
            raise ConfigError("k must be >= 1")
        mode = PerturbationMode(self.perturbation_mode)
        object.__setattr__(self, "perturbation_mode", mode)
        if mode is PerturbationMode.DISTINCT_PROMPTS and self.k > N_PROMPT_TYPES:
            raise ConfigError(
                f"distinct_prompts mode supports k <= {N_PROMPT_TYPES}, got k={self.k}"
            )

    def to_dict(self) -> dict:
        return {
            "task_id": self.task_id,
            "label_set": list(self.label_set),
            "instruction_text": self.instruction_text,
            "field_schema": list(self.field_schema),
            "k": self.k,
            "perturbation_mode": self.perturbation_mode.value,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TaskConfig":
        return cls(
            task_id=d["task_id"],
            label_set=tuple(d["label_set"]),
            instruction_text=d["instruction_text"],
            field_schema=tuple(d["field_schema"]),
            k=d.get("k", 7),
            perturbation_mode=PerturbationMode(d.get("perturbation_mode", "distinct_prompts")),
        )


@dataclass(frozen=True)
class Instance:
    """One unlabeled text item; gold_label is present only in pilot data."""

    instance_id: str
    fields: dict[str, str]
    gold_label: str | None = None

    def __post_init__(self):
        if not self.instance_id:
            raise ConfigError("instance_id must be non-empty")
        if self.gold_label is not None:
            object.__setattr__(self, "gold_label", normalize_label(self.gold_label))

    def to_dict(self) -> dict:
        d = {"instance_id": self.instance_id, "fields": dict(self.fields)}
        if self.gold_label is not None:
            d["gold_label"] = self.gold_label
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "Instance":
        return cls(
            instance_id=d["instance_id"],
            fields=dict(d["fields"]),
            gold_label=d.get("gold_label"),
        )


@dataclass(frozen=True)
class Dataset:
    """Ordered collection of instances; uniqueness is checked by validate_dataset."""

    instances: tuple[Instance, ...]

    def __post_init__(self):
        object.__setattr__(self, "instances", tuple(self.instances))

    @property
    def m(self) -> int:
        return len(self.instances)

    @property
    def instance_ids(self) -> tuple[str, ...]:
        return tuple(inst.instance_id for inst in self.instances)

    def by_id(self) -> dict[str, Instance]:
        return {inst.instance_id: inst for inst in self.instances}

    def to_dicts(self) -> list[dict]:
        return [inst.to_dict() for inst in self.instances]

    @classmethod
    def from_dicts(cls, rows: list[dict]) -> "Dataset":
        return cls(instances=tuple(Instance.from_dict(r) for r in rows))


@dataclass(frozen=True)
class Annotation:
    """One parsed response to one prompt of an instance's ensemble."""

    instance_id: str
    prompt_index: int  # 1..k
    raw_response: str
    parsed_label: str  # member of label_set or AMBIGUOUS
    confidence: float | None = None
    token_count_in: int = 0
    source: Source = Source.LLM

    def __post_init__(self):
        if self.prompt_index < 1:
            raise ConfigError("prompt_index is 1-based")
        if self.confidence is not None and not 0.0 <= self.confidence <= 1.0:
            raise ConfigError(f"confidence must be in [0, 1], got {self.confidence}")
        if self.token_count_in < 0:
            raise ConfigError("token_count_in must be nonnegative")
        object.__setattr__(self, "source", Source(self.source))

    def to_dict(self) -> dict:
        return {
            "instance_id": self.instance_id,
            "prompt_index": self.prompt_index,
            "raw_response": self.raw_response,
            "parsed_label": self.parsed_label,
            "confidence": self.confidence,
            "token_count_in": self.token_count_in,
            "source": self.source.value,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Annotation":
        return cls(
            instance_id=d["instance_id"],
            prompt_index=d["prompt_index"],
            raw_response=d["raw_response"],
            parsed_label=d["parsed_label"],
            confidence=d.get("confidence"),
            token_count_in=d.get("token_count_in", 0),
            source=Source(d.get("source", "llm")),
        )


@dataclass(frozen=True)
class ResponseSet:
    """The k annotations gathered for one instance, in prompt order."""

    instance_id: str
    annotations: tuple[Annotation, ...]

    def __post_init__(self):
        object.__setattr__(self, "annotations", tuple(self.annotations))

    @property
    def k_used(self) -> int:
        return len(self.annotations)

    def labels(self) -> list[str]:
        return [a.parsed_label for a in self.annotations]

    def to_dict(self) -> dict:
        return {
            "instance_id": self.instance_id,
            "annotations": [a.to_dict() for a in self.annotations],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ResponseSet":
        return cls(
            instance_id=d["instance_id"],
            annotations=tuple(Annotation.from_dict(a) for a in d["annotations"]),
        )


@dataclass(frozen=True)
class UncertaintyScore:
    """Per-instance uncertainty u under a named estimator."""

    instance_id: str
    estimator: Estimator
    u: float
    k_used: int
    imputed: bool = False  # self-evaluation only: some confidences were substituted

    def __post_init__(self):
        object.__setattr__(self, "estimator", Estimator(self.estimator))
        if self.k_used < 1:
            raise ConfigError("k_used must be >= 1")
        if self.u < 0:
            raise ConfigError("uncertainty must be nonnegative")
        if self.estimator is Estimator.SELF_EVALUATION and self.u > 1.0:
            raise ConfigError("self-evaluation uncertainty must be in [0, 1]")

    def to_dict(self) -> dict:
        return {
            "instance_id": self.instance_id,
            "estimator": self.estimator.value,
            "u": self.u,
            "k_used": self.k_used,
            "imputed": self.imputed,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "UncertaintyScore":
        return cls(
            instance_id=d["instance_id"],
            estimator=Estimator(d["estimator"]),
            u=d["u"],
            k_used=d["k_used"],
            imputed=d.get("imputed", False),
        )


@dataclass(frozen=True)
class AllocationPlan:
    """A dataset split: llm_ids go to the LLM channel, human_ids to annotators."""

    strategy: Strategy
    n: int
    llm_ids: frozenset[str]
    human_ids: frozenset[str]
    seed: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "strategy", Strategy(self.strategy))
        object.__setattr__(self, "llm_ids", frozenset(self.llm_ids))
        object.__setattr__(self, "human_ids", frozenset(self.human_ids))
        if self.llm_ids & self.human_ids:
            raise ConfigError("llm_ids and human_ids must be disjoint")
        if len(self.llm_ids) != self.n:
            raise ConfigError(f"expected |llm_ids| == n == {self.n}, got {len(self.llm_ids)}")

    def covers(self, dataset: Dataset) -> bool:
        return self.llm_ids | self.human_ids == set(dataset.instance_ids)

    def to_dict(self) -> dict:
        return {
            "strategy": self.strategy.value,
            "n": self.n,
            "llm_ids": sorted(self.llm_ids),
            "human_ids": sorted(self.human_ids),
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "AllocationPlan":
        return cls(
            strategy=Strategy(d["strategy"]),
            n=d["n"],
            llm_ids=frozenset(d["llm_ids"]),
            human_ids=frozenset(d["human_ids"]),
            seed=d.get("seed"),
        )


@dataclass(frozen=True)
class CostModel:
    """Unit prices for the two annotation channels.

    seconds_per_instance has no stock value; computing human cost without
    configuring it raises MissingTimeConfig.
    """

    llm_price_per_1k_tokens: float = 0.002
    human_wage_per_hour: float = 15.0
    annotators_per_instance: int = 5
    seconds_per_instance: float | None = None

    def __post_init__(self):
        if self.llm_price_per_1k_tokens <= 0:
            raise ConfigError("llm_price_per_1k_tokens must be positive")
        if self.human_wage_per_hour <= 0:
            raise ConfigError("human_wage_per_hour must be positive")
        if self.annotators_per_instance <= 0:
            raise ConfigError("annotators_per_instance must be positive")
        if self.seconds_per_instance is not None and self.seconds_per_instance <= 0:
            raise ConfigError("seconds_per_instance must be positive when set")

    def to_dict(self) -> dict:
        return {
            "llm_price_per_1k_tokens": self.llm_price_per_1k_tokens,
            "human_wage_per_hour": self.human_wage_per_hour,
            "annotators_per_instance": self.annotators_per_instance,
            "seconds_per_instance": self.seconds_per_instance,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CostModel":
        return cls(
            llm_price_per_1k_tokens=d.get("llm_price_per_1k_tokens", 0.002),
            human_wage_per_hour=d.get("human_wage_per_hour", 15.0),
            annotators_per_instance=d.get("annotators_per_instance", 5),
            seconds_per_instance=d.get("seconds_per_instance"),
        )


@dataclass(frozen=True)
class ParetoPoint:
    """(total cost, quality) for one (strategy, LLM-fraction) configuration."""

    strategy: Strategy
    llm_fraction: float
    total_cost: float
    quality: float
    efficient: bool = False

    def __post_init__(self):
        object.__setattr__(self, "strategy", Strategy(self.strategy))
        if not 0.0 <= self.llm_fraction <= 1.0:
            raise ConfigError("llm_fraction must be in [0, 1]")
        if not 0.0 <= self.quality <= 1.0:
            raise ConfigError("quality must be in [0, 1]")

    def with_efficient(self, flag: bool) -> "ParetoPoint":
        return replace(self, efficient=flag)

    def to_dict(self) -> dict:
        return {
            "strategy": self.strategy.value,
            "llm_fraction": self.llm_fraction,
            "total_cost": self.total_cost,
            "quality": self.quality,
            "efficient": self.efficient,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ParetoPoint":
        return cls(
            strategy=Strategy(d["strategy"]),
            llm_fraction=d["llm_fraction"],
            total_cost=d["total_cost"],
            quality=d["quality"],
            efficient=d.get("efficient", False),
        )


@dataclass(frozen=True)
class Violation:
    """One dataset check failure; data, not a fault."""

    kind: str
    instance_id: str | None
    detail: str

    def to_dict(self) -> dict:
        return {"kind": self.kind, "instance_id": self.instance_id, "detail": self.detail}


def validate_dataset(dataset: Dataset, config: TaskConfig) -> list[Violation]:
    """Check every instance against the task config; empty list means clean."""
    violations: list[Violation] = []
    seen: set[str] = set()
    for inst in dataset.instances:
        if inst.instance_id in seen:
            violations.append(
                Violation("duplicate_instance_id", inst.instance_id,
                          f"instance_id {inst.instance_id!r} appears more than once")
            )
        seen.add(inst.instance_id)
        for slot in config.field_schema:
            if slot not in inst.fields:
                violations.append(
                    Violation("missing_slot", inst.instance_id,
                              f"slot {slot!r} is missing")
                )
            elif not inst.fields[slot].strip():
                violations.append(
                    Violation("empty_slot", inst.instance_id,
                              f"slot {slot!r} is empty")
                )
        if inst.gold_label is not None and inst.gold_label not in config.label_set:
            violations.append(
                Violation("unknown_gold_label", inst.instance_id,
                          f"gold_label {inst.gold_label!r} is not in the label set")
            )
    return violations
