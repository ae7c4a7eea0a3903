"""Exception hierarchy for the annotation engine.

Data problems that callers are expected to inspect (dataset violations,
selection results) are returned as values, not raised; these exceptions
mark contract breaches and misconfiguration.
"""


class AnnosplitError(Exception):
    """Base class for all engine errors."""


class ConfigError(AnnosplitError):
    """A task, gateway, or cost configuration violates its invariants."""


class MissingSlot(AnnosplitError):
    """An instance lacks a slot required to fill a prompt template."""


class TemplateArity(AnnosplitError):
    """A prompt template does not contain the text placeholder exactly once."""


class TooManyLabels(AnnosplitError):
    """Multiple-choice rendering supports at most 26 lettered options."""


class BackendUnavailable(AnnosplitError):
    """The LLM backend kept failing after all configured retries."""


class PromptTooLong(AnnosplitError):
    """The backend rejected a prompt that exceeds its context window."""


class EmptyResponses(AnnosplitError):
    """An uncertainty or vote computation received zero annotations."""


class MissingResponses(AnnosplitError):
    """Batch scoring found instances without a response set."""

    def __init__(self, instance_ids):
        self.instance_ids = list(instance_ids)
        super().__init__(f"no responses for instances: {', '.join(self.instance_ids)}")


class BudgetOutOfRange(AnnosplitError):
    """Requested LLM budget n is outside [0, m]."""


class MissingScores(AnnosplitError):
    """A guided allocation is missing uncertainty scores for some instances."""

    def __init__(self, instance_ids):
        self.instance_ids = list(instance_ids)
        super().__init__(f"no scores for instances: {', '.join(self.instance_ids)}")


class IncompleteLabels(AnnosplitError):
    """Merging found instances without a resolved label."""

    def __init__(self, instance_ids):
        self.instance_ids = list(instance_ids)
        super().__init__(f"unresolved labels for instances: {', '.join(self.instance_ids)}")


class MissingGold(AnnosplitError):
    """A quality metric needs gold labels that are absent."""


class MissingTimeConfig(AnnosplitError):
    """Human cost requested but seconds_per_instance is not configured."""


class EmptyPointSet(AnnosplitError):
    """Pareto analysis received no points."""


class StaleToken(AnnosplitError):
    """A submitted claim token does not match any live claim."""


class InvalidLabel(AnnosplitError):
    """A submitted label is not a member of the task's label set."""
