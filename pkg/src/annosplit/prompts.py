"""Prompt ensemble rendering: seven systematic perturbations of one task.

For each instance the engine renders k prompt variants that all ask for the
same annotation but vary the surface form: plain instruction, instruction
after the text (sequence swapping), a fixed rephrasing, a true/false probe,
an open question, a lettered multiple choice, and a leading statement that
invites agreement (confirmation bias). Response instability across these
variants is what the uncertainty estimators measure.

Rendering is deterministic: same (instance, config, templates) always
yields byte-identical prompts. The paraphrase variant is a fixed alternative
phrasing, not a machine-generated one, so runs stay auditable.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

from .errors import ConfigError, MissingSlot, TemplateArity, TooManyLabels
from .model import Instance, N_PROMPT_TYPES, PerturbationMode, TaskConfig

# Appended to a prompt when the caller wants the model to self-report
# confidence; the parser reads the number back out of the response.
CONFIDENCE_REQUEST = (
    "and please give a confidence score on a scale of 0 to 1 for your prediction"
)


class PromptType(str, Enum):
    INSTRUCTION = "instruction"
    SEQUENCE_SWAPPING = "sequence_swapping"
    PARAPHRASE = "paraphrase"
    TRUE_FALSE = "true_false"
    QUESTION_ANSWERING = "question_answering"
    MULTIPLE_CHOICE = "multiple_choice"
    CONFIRMATION_BIAS = "confirmation_bias"


# Canonical rendering order; distinct-prompt ensembles of size k use the
# first k entries.
PROMPT_TYPE_ORDER: tuple[PromptType, ...] = tuple(PromptType)

assert len(PROMPT_TYPE_ORDER) == N_PROMPT_TYPES


class AnswerFormat(str, Enum):
    FREE_LABEL = "free_label"
    TRUE_FALSE = "true_false"
    MCQ_LETTER = "mcq_letter"


@dataclass(frozen=True)
class PromptTemplate:
    """A prompt pattern with labels already substituted; {Text} renders per instance."""

    prompt_type: PromptType
    template_text: str
    answer_format: AnswerFormat

    def __post_init__(self):
        object.__setattr__(self, "prompt_type", PromptType(self.prompt_type))
        object.__setattr__(self, "answer_format", AnswerFormat(self.answer_format))
        if self.template_text.count("{Text}") != 1:
            raise TemplateArity(
                f"{self.prompt_type.value} template must contain {{Text}} exactly once"
            )


@dataclass(frozen=True)
class RenderedPrompt:
    prompt_type: PromptType
    text: str


@dataclass(frozen=True)
class PromptSet:
    """The k rendered prompt variants for one instance, in ensemble order."""

    instance_id: str
    prompts: tuple[RenderedPrompt, ...]

    def __post_init__(self):
        object.__setattr__(self, "prompts", tuple(self.prompts))

    @property
    def k(self) -> int:
        return len(self.prompts)


def display_label(label: str) -> str:
    """Surface form used in options and mock replies: first letter capitalized."""
    return label[0].upper() + label[1:] if label else label


def probe_label(config: TaskConfig) -> str:
    """Polarity target for true/false and confirmation-bias prompts."""
    return config.label_set[0]


def answer_choices(labels: tuple[str, ...]) -> str:
    """Quoted or-list: '"a" or "b"', '"a", "b" or "c"', ..."""
    quoted = [f'"{l}"' for l in labels]
    if len(quoted) == 1:
        return quoted[0]
    return ", ".join(quoted[:-1]) + " or " + quoted[-1]


def option_letter(index: int) -> str:
    if index >= 26:
        raise TooManyLabels("multiple choice supports at most 26 labels")
    return chr(ord("A") + index)


def mcq_options(labels: tuple[str, ...]) -> str:
    """Lettered option block, one label per line, in label-set order."""
    return "\n".join(
        f"({option_letter(i)}) {display_label(l)}" for i, l in enumerate(labels)
    )


def default_templates(config: TaskConfig) -> list[PromptTemplate]:
    """The seven stock perturbation templates, instantiated for one task."""
    if len(config.label_set) < 2:
        raise ConfigError("default templates need at least 2 labels")
    choices = answer_choices(config.label_set)
    probe = probe_label(config)
    instruction = config.instruction_text.strip()
    return [
        PromptTemplate(
            PromptType.INSTRUCTION,
            f"{instruction} Please give your answer as {choices}.\n{{Text}}",
            AnswerFormat.FREE_LABEL,
        ),
        PromptTemplate(
            PromptType.SEQUENCE_SWAPPING,
            f"{{Text}}\n{instruction} Please give your answer as {choices}.",
            AnswerFormat.FREE_LABEL,
        ),
        PromptTemplate(
            PromptType.PARAPHRASE,
            f"The task is as follows: {instruction} Decide which label applies to "
            f"the text below, choosing from {choices}.\n{{Text}}",
            AnswerFormat.FREE_LABEL,
        ),
        PromptTemplate(
            PromptType.TRUE_FALSE,
            f"Is it true that the following text is about {probe}? "
            f'Give your answer as "true" or "false".\n{{Text}}',
            AnswerFormat.TRUE_FALSE,
        ),
        PromptTemplate(
            PromptType.QUESTION_ANSWERING,
            f"Which label best describes the following text? Is it {choices}?\n{{Text}}",
            AnswerFormat.FREE_LABEL,
        ),
        PromptTemplate(
            PromptType.MULTIPLE_CHOICE,
            "Please choose one option that best describes the following text.\n"
            f"{{Text}}\n{mcq_options(config.label_set)}",
            AnswerFormat.MCQ_LETTER,
        ),
        PromptTemplate(
            PromptType.CONFIRMATION_BIAS,
            f"I think the following text is about {probe}. Do you agree? "
            f'Give your answer as "true" or "false".\n{{Text}}',
            AnswerFormat.TRUE_FALSE,
        ),
    ]


def render_text_block(instance: Instance, config: TaskConfig) -> str:
    """Join the instance's slots in schema order as 'SlotName: value' lines."""
    lines = []
    for slot in config.field_schema:
        value = instance.fields.get(slot, "")
        if not value.strip():
            raise MissingSlot(
                f"instance {instance.instance_id!r} has no text for slot {slot!r}"
            )
        lines.append(f"{slot[0].upper() + slot[1:]}: {value}")
    return "\n".join(lines)


def _fill(template: PromptTemplate, text_block: str) -> str:
    head, tail = template.template_text.split("{Text}")
    return head + text_block + tail


def render_prompt_set(
    instance: Instance,
    config: TaskConfig,
    templates: list[PromptTemplate] | None = None,
) -> PromptSet:
    """Render the instance's k-prompt ensemble under the config's mode.

    distinct_prompts uses the first k perturbation types in canonical order,
    each exactly once; same_prompt repeats the instruction prompt k times.
    """
    templates = templates if templates is not None else default_templates(config)
    by_type = {t.prompt_type: t for t in templates}
    text_block = render_text_block(instance, config)

    if config.perturbation_mode is PerturbationMode.SAME_PROMPT:
        order = [PromptType.INSTRUCTION] * config.k
    else:
        missing = [t.value for t in PROMPT_TYPE_ORDER[: config.k] if t not in by_type]
        if missing:
            raise ConfigError(f"templates missing prompt types: {', '.join(missing)}")
        order = list(PROMPT_TYPE_ORDER[: config.k])

    if PromptType.INSTRUCTION not in by_type:
        raise ConfigError("templates must include the instruction prompt type")

    rendered = tuple(
        RenderedPrompt(ptype, _fill(by_type[ptype], text_block)) for ptype in order
    )
    return PromptSet(instance_id=instance.instance_id, prompts=rendered)


def confidence_suffix(prompt: str) -> str:
    """Append the confidence request as a final clause; applying twice is a no-op."""
    if CONFIDENCE_REQUEST in prompt:
        return prompt
    if not prompt:
        return CONFIDENCE_REQUEST
    return f"{prompt} {CONFIDENCE_REQUEST}"


def template_answer_format(templates: list[PromptTemplate]) -> dict[PromptType, AnswerFormat]:
    return {t.prompt_type: t.answer_format for t in templates}


def validate_mcq_template(template: PromptTemplate, config: TaskConfig) -> None:
    """An mcq template must enumerate every label, lettered, in label-set order."""
    expected = mcq_options(config.label_set)
    if expected not in template.template_text:
        raise ConfigError(
            "multiple choice template must list every label in label-set order"
        )


_SUBSTITUTIONS = ("{instruction}", "{labels}", "{options}")


def load_templates(path: str | Path, config: TaskConfig) -> list[PromptTemplate]:
    """Load template overrides from a JSON file keyed by prompt type.

    Overrides may use {instruction}, {labels}, {options} and {label_1}..{label_n}
    placeholders, which are substituted now; {Text} stays for render time.
    Types not present in the file fall back to the stock templates.
    """
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    merged = {t.prompt_type: t for t in default_templates(config)}
    for key, spec in raw.items():
        ptype = PromptType(key)
        text = spec["template_text"]
        text = text.replace("{instruction}", config.instruction_text.strip())
        text = text.replace("{labels}", answer_choices(config.label_set))
        text = text.replace("{options}", mcq_options(config.label_set))
        for i, label in enumerate(config.label_set, start=1):
            text = text.replace(f"{{label_{i}}}", label)
        template = PromptTemplate(
            prompt_type=ptype,
            template_text=text,
            answer_format=AnswerFormat(spec["answer_format"]),
        )
        if template.answer_format is AnswerFormat.MCQ_LETTER:
            validate_mcq_template(template, config)
        merged[ptype] = template
    return [merged[t] for t in PROMPT_TYPE_ORDER]
