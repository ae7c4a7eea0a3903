from pathlib import Path

import pytest

from annosplit.errors import ConfigError, MissingSlot, TemplateArity, TooManyLabels
from annosplit.model import Instance, PerturbationMode, TaskConfig
from annosplit.prompts import (
    CONFIDENCE_REQUEST,
    AnswerFormat,
    PromptTemplate,
    PromptType,
    PROMPT_TYPE_ORDER,
    confidence_suffix,
    default_templates,
    load_templates,
    mcq_options,
    render_prompt_set,
)

GOLDEN = Path(__file__).parent / "golden" / "pair_prompts.txt"

PAIR_INSTANCE = Instance(
    "x1",
    {"sentence1": "The cat sat on the mat.", "sentence2": "A cat was sitting on the mat."},
)


def render_all(instance, config) -> str:
    ps = render_prompt_set(instance, config)
    blocks = [f"### {p.prompt_type.value}\n{p.text}" for p in ps.prompts]
    return "\n\n".join(blocks) + "\n"


def test_golden_pair_prompts(pair_task):
    # byte-exact comparison against the checked-in rendering
    assert render_all(PAIR_INSTANCE, pair_task) == GOLDEN.read_text(encoding="utf-8")


def test_instruction_prompt_shape(pair_task):
    ps = render_prompt_set(PAIR_INSTANCE, pair_task)
    text = ps.prompts[0].text
    assert text.startswith("Please label if the following two sentences are paraphrases")
    assert text.endswith("Sentence2: A cat was sitting on the mat.")


def test_sequence_swapping_is_reordered_instruction(pair_task):
    ps = render_prompt_set(PAIR_INSTANCE, pair_task)
    instruction = ps.prompts[0].text
    swapped = ps.prompts[1].text
    block = "Sentence1: The cat sat on the mat.\nSentence2: A cat was sitting on the mat."
    # identical wording, text block moved to the front
    assert instruction == instruction.split(block)[0] + block
    assert swapped == block + "\n" + instruction.split("\n" + block)[0]


def test_mcq_options_capitalized_in_label_order(pair_task):
    ps = render_prompt_set(PAIR_INSTANCE, pair_task)
    mcq = next(p.text for p in ps.prompts if p.prompt_type is PromptType.MULTIPLE_CHOICE)
    assert "(A) Paraphrase\n(B) Not paraphrase" in mcq


def test_distinct_mode_covers_all_seven_types(pair_task):
    ps = render_prompt_set(PAIR_INSTANCE, pair_task)
    assert tuple(p.prompt_type for p in ps.prompts) == PROMPT_TYPE_ORDER
    assert len({p.prompt_type for p in ps.prompts}) == 7


def test_same_prompt_mode_repeats_instruction():
    cfg = TaskConfig(
        "pairs", ("paraphrase", "not paraphrase"),
        "Please label if the following two sentences are paraphrases of each other.",
        ("sentence1", "sentence2"), k=7, perturbation_mode=PerturbationMode.SAME_PROMPT,
    )
    ps = render_prompt_set(PAIR_INSTANCE, cfg)
    assert len(ps.prompts) == 7
    assert {p.prompt_type for p in ps.prompts} == {PromptType.INSTRUCTION}
    assert len({p.text for p in ps.prompts}) == 1


def test_k_smaller_than_seven_takes_prefix(pair_task):
    cfg = TaskConfig(
        pair_task.task_id, pair_task.label_set, pair_task.instruction_text,
        pair_task.field_schema, k=3,
    )
    ps = render_prompt_set(PAIR_INSTANCE, cfg)
    assert tuple(p.prompt_type for p in ps.prompts) == PROMPT_TYPE_ORDER[:3]


def test_rendering_is_deterministic(pair_task):
    a = render_prompt_set(PAIR_INSTANCE, pair_task)
    b = render_prompt_set(PAIR_INSTANCE, pair_task)
    assert [p.text for p in a.prompts] == [p.text for p in b.prompts]


def test_every_prompt_contains_slot_values(pair_task, topic_task):
    for cfg, inst in [
        (pair_task, PAIR_INSTANCE),
        (topic_task, Instance("t1", {"title": "Rates climb", "description": "Markets react."})),
    ]:
        for p in render_prompt_set(inst, cfg).prompts:
            for value in inst.fields.values():
                assert value in p.text


def test_missing_slot_raises(pair_task):
    with pytest.raises(MissingSlot):
        render_prompt_set(Instance("x", {"sentence1": "only"}), pair_task)


def test_template_arity_enforced():
    with pytest.raises(TemplateArity):
        PromptTemplate(PromptType.INSTRUCTION, "no placeholder", AnswerFormat.FREE_LABEL)
    with pytest.raises(TemplateArity):
        PromptTemplate(PromptType.INSTRUCTION, "{Text} and {Text}", AnswerFormat.FREE_LABEL)


def test_default_templates_cover_enum(pair_task):
    templates = default_templates(pair_task)
    assert [t.prompt_type for t in templates] == list(PROMPT_TYPE_ORDER)


def test_true_false_probes_first_label(topic_task):
    templates = default_templates(topic_task)
    tf = next(t for t in templates if t.prompt_type is PromptType.TRUE_FALSE)
    assert "Is it true that the following text is about world?" in tf.template_text


def test_too_many_labels_for_mcq():
    labels = tuple(f"label{i:02d}" for i in range(27))
    with pytest.raises(TooManyLabels):
        mcq_options(labels)


class TestConfidenceSuffix:
    def test_appends_exact_phrase(self):
        out = confidence_suffix("Classify X.")
        assert out == f"Classify X. {CONFIDENCE_REQUEST}"
        assert out.endswith(
            "and please give a confidence score on a scale of 0 to 1 for your prediction"
        )

    def test_empty_prompt_yields_bare_suffix(self):
        assert confidence_suffix("") == CONFIDENCE_REQUEST

    def test_idempotent(self):
        once = confidence_suffix("Classify X.")
        assert confidence_suffix(once) == once


class TestTemplateOverrides:
    def test_partial_override_merges_with_defaults(self, pair_task, tmp_path):
        path = tmp_path / "templates.json"
        path.write_text(
            '{"instruction": {"template_text": "{instruction} Answer with {labels}.\\n{Text}",'
            ' "answer_format": "free_label"}}',
            encoding="utf-8",
        )
        templates = load_templates(path, pair_task)
        assert len(templates) == 7
        instruction = next(t for t in templates if t.prompt_type is PromptType.INSTRUCTION)
        assert 'Answer with "paraphrase" or "not paraphrase".' in instruction.template_text

    def test_mcq_override_must_enumerate_labels(self, pair_task, tmp_path):
        path = tmp_path / "templates.json"
        path.write_text(
            '{"multiple_choice": {"template_text": "Pick one.\\n{Text}",'
            ' "answer_format": "mcq_letter"}}',
            encoding="utf-8",
        )
        with pytest.raises(ConfigError):
            load_templates(path, pair_task)
