"""Persistent work queue for the human channel.

State is an append-only event log (enqueue/claim/submit records, one JSON
object per line) replayed on startup, so a crash never loses a labeled
item and leaves no lock files behind. Claims are leases: an item claimed
longer ago than its lease reverts to pending without coordinator action.
All transitions are serialized through one lock; submits are fsynced
before they are acknowledged.
"""

from __future__ import annotations

import json
import os
import threading
import time
import uuid
from dataclasses import dataclass, replace
from pathlib import Path

from .analytics import human_cost
from .errors import InvalidLabel, MissingTimeConfig, StaleToken
from .model import AllocationPlan, CostModel, Dataset, TaskConfig, normalize_label

DEFAULT_LEASE_SECONDS = 600.0

LOG_NAME = "events.log"


@dataclass
class QueueItem:
    """One human-channel work item and its lease bookkeeping."""

    instance_id: str
    fields: dict[str, str]
    gold_label: str | None = None
    escalated: bool = False
    status: str = "pending"  # pending | claimed | labeled
    claim_token: str | None = None
    claimed_at: float | None = None
    lease_seconds: float = DEFAULT_LEASE_SECONDS
    submitted_label: str | None = None
    annotator_id: str | None = None

    def lease_expired(self, now: float) -> bool:
        return (
            self.status == "claimed"
            and self.claimed_at is not None
            and now > self.claimed_at + self.lease_seconds
        )

    def effective_status(self, now: float) -> str:
        if self.lease_expired(now):
            return "pending"
        return self.status


class AnnotationQueue:
    """Durable claim/submit queue over one task's human-channel instances."""

    def __init__(
        self,
        data_dir: str | Path,
        config: TaskConfig,
        cost_model: CostModel | None = None,
        llm_cost_accrued: float | None = None,
        clock=time.time,
    ):
        self.data_dir = Path(data_dir)
        self.data_dir.mkdir(parents=True, exist_ok=True)
        self.config = config
        self.cost_model = cost_model
        self.llm_cost_accrued = llm_cost_accrued
        self.clock = clock
        self._lock = threading.RLock()
        self._items: dict[str, QueueItem] = {}
        self._order: list[str] = []
        self._by_token: dict[str, str] = {}
        self._log_path = self.data_dir / LOG_NAME
        self._replay()
        self._log = open(self._log_path, "a", encoding="utf-8")

    # -- persistence ---------------------------------------------------------

    def _replay(self) -> None:
        if not self._log_path.exists():
            return
        with open(self._log_path, "r", encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                self._apply(json.loads(line))

    def _apply(self, event: dict) -> None:
        kind = event["type"]
        if kind == "enqueue":
            iid = event["instance_id"]
            if iid not in self._items:
                self._items[iid] = QueueItem(
                    instance_id=iid,
                    fields=dict(event.get("fields", {})),
                    gold_label=event.get("gold_label"),
                    escalated=event.get("escalated", False),
                )
                self._order.append(iid)
        elif kind == "claim":
            item = self._items.get(event["instance_id"])
            if item is not None and item.status != "labeled":
                item.status = "claimed"
                item.claim_token = event["claim_token"]
                item.claimed_at = event["claimed_at"]
                item.lease_seconds = event.get("lease_seconds", DEFAULT_LEASE_SECONDS)
                item.annotator_id = event.get("annotator_id")
                self._by_token[item.claim_token] = item.instance_id
        elif kind == "submit":
            item = self._items.get(event["instance_id"])
            if item is not None and item.status != "labeled":
                item.status = "labeled"
                item.submitted_label = event["label"]
                item.annotator_id = event.get("annotator_id", item.annotator_id)

    def _append(self, event: dict, durable: bool = False) -> None:
        self._log.write(json.dumps(event, sort_keys=True, ensure_ascii=False) + "\n")
        self._log.flush()
        if durable:
            os.fsync(self._log.fileno())

    # -- operations ----------------------------------------------------------

    def enqueue_instance(self, iid: str, fields: dict[str, str],
                         gold_label: str | None = None, escalated: bool = False) -> bool:
        """Add one pending item; re-adding an existing instance is a no-op."""
        with self._lock:
            if iid in self._items:
                return False
            event = {
                "type": "enqueue",
                "instance_id": iid,
                "fields": fields,
                "gold_label": gold_label,
                "escalated": escalated,
            }
            self._append(event, durable=True)
            self._apply(event)
            return True

    def enqueue_plan(
        self,
        plan: AllocationPlan,
        dataset: Dataset,
        escalated_ids: set[str] | None = None,
    ) -> int:
        """Enqueue the plan's human channel plus any escalated LLM instances."""
        escalated_ids = escalated_ids or set()
        added = 0
        by_id = dataset.by_id()
        with self._lock:
            for inst in dataset.instances:
                iid = inst.instance_id
                if iid in plan.human_ids or iid in escalated_ids:
                    if self.enqueue_instance(
                        iid, dict(by_id[iid].fields), by_id[iid].gold_label,
                        escalated=iid in escalated_ids,
                    ):
                        added += 1
        return added

    def claim(self, annotator_id: str, lease_seconds: float | None = None) -> QueueItem | None:
        """Atomically hand the next pending item to one annotator, or None.

        Returns a snapshot; later transitions never mutate what a caller holds.
        """
        lease = lease_seconds if lease_seconds is not None else DEFAULT_LEASE_SECONDS
        with self._lock:
            now = self.clock()
            for iid in self._order:
                item = self._items[iid]
                if item.effective_status(now) != "pending":
                    continue
                if item.claim_token is not None:
                    self._by_token.pop(item.claim_token, None)
                token = uuid.uuid4().hex
                event = {
                    "type": "claim",
                    "instance_id": iid,
                    "claim_token": token,
                    "annotator_id": annotator_id,
                    "claimed_at": now,
                    "lease_seconds": lease,
                }
                self._append(event)
                self._apply(event)
                return replace(item, fields=dict(item.fields))
            return None

    def submit(self, claim_token: str, label: str, annotator_id: str | None = None) -> str:
        """Record a label for a live claim; durable before acknowledgement."""
        normalized = normalize_label(label)
        with self._lock:
            iid = self._by_token.get(claim_token)
            item = self._items.get(iid) if iid is not None else None
            now = self.clock()
            if (
                item is None
                or item.status != "claimed"
                or item.claim_token != claim_token
                or item.lease_expired(now)
            ):
                raise StaleToken("claim token does not match a live claim")
            if normalized not in self.config.label_set:
                raise InvalidLabel(f"label {label!r} is not in the task's label set")
            event = {
                "type": "submit",
                "instance_id": item.instance_id,
                "claim_token": claim_token,
                "label": normalized,
                "annotator_id": annotator_id or item.annotator_id,
                "submitted_at": now,
            }
            self._append(event, durable=True)
            self._apply(event)
            return item.instance_id

    # -- reporting -----------------------------------------------------------

    def counts(self) -> dict[str, int]:
        with self._lock:
            now = self.clock()
            tally = {"pending": 0, "claimed": 0, "labeled": 0}
            for item in self._items.values():
                tally[item.effective_status(now)] += 1
            return tally

    def ledger(self) -> dict:
        """Consistent snapshot: queue counts, accrued costs, running alignment."""
        with self._lock:
            tally = self.counts()
            labeled = [i for i in self._items.values() if i.status == "labeled"]
            accrued: float | None = None
            if self.cost_model is not None:
                try:
                    accrued = float(human_cost(len(labeled), self.cost_model))
                except MissingTimeConfig:
                    accrued = None
            gold_bearing = [i for i in labeled if i.gold_label is not None]
            align = (
                sum(1 for i in gold_bearing if i.submitted_label == i.gold_label)
                / len(gold_bearing)
                if gold_bearing
                else None
            )
            return {
                "task_id": self.config.task_id,
                "total": len(self._items),
                "pending": tally["pending"],
                "claimed": tally["claimed"],
                "labeled": tally["labeled"],
                "human_cost_accrued": accrued,
                "llm_cost_accrued": self.llm_cost_accrued,
                "alignment": align,
            }

    def export_labels(self) -> list[dict]:
        """Labeled items as line-record dicts, in enqueue order."""
        with self._lock:
            return [
                {
                    "instance_id": item.instance_id,
                    "fields": dict(item.fields),
                    "label": item.submitted_label,
                    "source": "human",
                    "vote_detail": None,
                    "escalated": item.escalated,
                }
                for iid in self._order
                for item in [self._items[iid]]
                if item.status == "labeled"
            ]

    def human_labels(self) -> dict[str, str]:
        with self._lock:
            return {
                i.instance_id: i.submitted_label
                for i in self._items.values()
                if i.status == "labeled" and i.submitted_label is not None
            }

    def close(self) -> None:
        with self._lock:
            if not self._log.closed:
                self._log.close()
