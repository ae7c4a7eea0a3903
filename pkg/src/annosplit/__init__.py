"""annosplit: co-allocate annotation work between an LLM and human annotators.

The engine estimates per-instance LLM uncertainty from prompt-perturbed
response ensembles, routes instances to the cheaper channel it can trust,
and lets practitioners pick an allocation strategy off a cost-quality
Pareto frontier measured on gold-labeled pilot data.
"""

from .model import (
    AMBIGUOUS,
    AllocationPlan,
    Annotation,
    CostModel,
    Dataset,
    Estimator,
    Instance,
    ParetoPoint,
    PerturbationMode,
    ResponseSet,
    Source,
    Strategy,
    TaskConfig,
    UncertaintyScore,
    normalize_label,
    validate_dataset,
)

__version__ = "0.1.0"

__all__ = [
    "AMBIGUOUS",
    "AllocationPlan",
    "Annotation",
    "CostModel",
    "Dataset",
    "Estimator",
    "Instance",
    "ParetoPoint",
    "PerturbationMode",
    "ResponseSet",
    "Source",
    "Strategy",
    "TaskConfig",
    "UncertaintyScore",
    "normalize_label",
    "validate_dataset",
    "__version__",
]
