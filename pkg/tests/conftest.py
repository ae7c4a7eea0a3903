import pytest

from annosplit import kernels
from annosplit.model import Dataset, Instance, TaskConfig


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    # compile jit kernels once so timed suites measure compute, not compilation
    kernels.warmup()


@pytest.fixture()
def pair_task() -> TaskConfig:
    return TaskConfig(
        task_id="pairs",
        label_set=("paraphrase", "not paraphrase"),
        instruction_text="Please label if the following two sentences are paraphrases of each other.",
        field_schema=("sentence1", "sentence2"),
        k=7,
    )


@pytest.fixture()
def topic_task() -> TaskConfig:
    return TaskConfig(
        task_id="topics",
        label_set=("world", "sports", "business", "science"),
        instruction_text="Please label the topic of the following news snippet.",
        field_schema=("title", "description"),
        k=7,
    )


@pytest.fixture()
def pair_dataset(pair_task) -> Dataset:
    rows = [
        ("p1", "The deal closed on Friday.", "On Friday the deal was closed.", "paraphrase"),
        ("p2", "Storms delayed every flight.", "The bakery sells rye bread.", "not paraphrase"),
        ("p3", "She signed the lease today.", "Today she signed the lease.", "paraphrase"),
    ]
    return Dataset(
        tuple(
            Instance(iid, {"sentence1": s1, "sentence2": s2}, gold_label=gold)
            for iid, s1, s2, gold in rows
        )
    )
