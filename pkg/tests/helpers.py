"""Small factories shared across test modules."""

from annosplit.model import Annotation, Dataset, Instance, ResponseSet


def response_set(instance_id: str, labels, confidences=None) -> ResponseSet:
    confidences = confidences or [None] * len(labels)
    return ResponseSet(
        instance_id=instance_id,
        annotations=tuple(
            Annotation(
                instance_id=instance_id,
                prompt_index=i + 1,
                raw_response=str(label),
                parsed_label=label,
                confidence=conf,
                token_count_in=50,
            )
            for i, (label, conf) in enumerate(zip(labels, confidences))
        ),
    )


def tiny_dataset(ids, gold=None) -> Dataset:
    gold = gold or {}
    return Dataset(
        tuple(
            Instance(iid, {"text": f"body of {iid}"}, gold_label=gold.get(iid))
            for iid in ids
        )
    )
