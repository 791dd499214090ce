"""Annotation task store: leases, record log, progress and agreement reporting.

Lease grants and submissions run inside a single-writer critical section;
records are immutable once written and persisted to an append-only JSONL log
that is replayed at startup.
"""

from __future__ import annotations

import json
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional, Sequence

from stancebench.annotation.kappa import ELIGIBLE, cohen_kappa
from stancebench.annotation.records import INITIAL_ROUNDS, AnnotationRecord, Round
from stancebench.annotation.vote import aggregate_gold, needs_tiebreak
from stancebench.corpus.models import Instance
from stancebench.errors import AlreadyLabeled, LeaseInvalid, NeedsMoreAnnotators
from stancebench.labels import StanceLabel

DEFAULT_LEASE_SECONDS = 30 * 60


@dataclass
class Lease:
    instance_id: str
    annotator_id: str
    round: Round
    expiry: float


@dataclass
class TaskView:
    instance_id: str
    target: str
    round: Round
    lines: list[dict]  # [{author, text}] in path order
    image_refs: list[str]
    captions: list[str]
    lease_expiry: float

    def to_dict(self) -> dict:
        return {
            "instance_id": self.instance_id,
            "target": self.target,
            "round": self.round.value,
            "lines": self.lines,
            "image_refs": self.image_refs,
            "captions": self.captions,
            "lease_expiry": self.lease_expiry,
        }


@dataclass
class AgreementReport:
    per_target_kappa: dict[str, Optional[float]]
    counted_pairs: dict[str, int]
    resolved: int
    unresolved: int

    def to_dict(self) -> dict:
        return {
            "per_target_kappa": self.per_target_kappa,
            "counted_pairs": self.counted_pairs,
            "resolved": self.resolved,
            "unresolved": self.unresolved,
        }


class AnnotationStore:
    def __init__(
        self,
        instances: Sequence[Instance],
        log_path: str | Path | None = None,
        lease_seconds: float = DEFAULT_LEASE_SECONDS,
        caption_lookup: Optional[Callable[[str], str]] = None,
        clock: Callable[[], float] = time.time,
    ):
        self._instances = {ins.instance_id: ins for ins in instances}
        self._order = sorted(self._instances)
        self._records: dict[str, list[AnnotationRecord]] = {iid: [] for iid in self._order}
        self._seen: set[tuple[str, str, Round]] = set()
        self._leases: dict[tuple[str, Round], Lease] = {}
        self._lock = threading.Lock()
        self._lease_seconds = lease_seconds
        self._clock = clock
        self._caption_lookup = caption_lookup
        self._log_path = Path(log_path) if log_path is not None else None
        if self._log_path is not None and self._log_path.exists():
            self._replay()

    # -- persistence ---------------------------------------------------

    def _replay(self) -> None:
        assert self._log_path is not None
        with open(self._log_path, "r", encoding="utf-8") as fh:
            for line in fh:
                if not line.strip():
                    continue
                record = AnnotationRecord.from_dict(json.loads(line))
                self._store_record(record)

    def _append_log(self, record: AnnotationRecord) -> None:
        if self._log_path is None:
            return
        with open(self._log_path, "a", encoding="utf-8") as fh:
            fh.write(json.dumps(record.to_dict(), sort_keys=True) + "\n")
            fh.flush()

    def _store_record(self, record: AnnotationRecord) -> None:
        key = (record.instance_id, record.annotator_id, record.round)
        if key in self._seen:
            raise AlreadyLabeled(f"duplicate record for {key}")
        self._seen.add(key)
        self._records.setdefault(record.instance_id, []).append(record)

    # -- leasing -------------------------------------------------------

    def _purge_expired(self, now: float) -> None:
        expired = [k for k, lease in self._leases.items() if lease.expiry <= now]
        for k in expired:
            del self._leases[k]

    def _open_slots(self, instance_id: str) -> list[Round]:
        """Rounds this instance still needs, in serving order."""
        records = self._records[instance_id]
        rounds_present = {r.round for r in records}
        initial = [r for r in records if r.round in INITIAL_ROUNDS]
        if len(initial) >= 2:
            # Initial pair complete: only a tie-break can still be needed.
            return [Round.TIEBREAK] if needs_tiebreak(records) else []
        slots = [r for r in INITIAL_ROUNDS if r not in rounds_present]
        return slots

    def _annotator_labeled(self, instance_id: str, annotator_id: str) -> bool:
        return any(r.annotator_id == annotator_id for r in self._records[instance_id])

    def next_task(self, annotator_id: str) -> Optional[TaskView]:
        with self._lock:
            now = self._clock()
            self._purge_expired(now)
            for instance_id in self._order:
                if self._annotator_labeled(instance_id, annotator_id):
                    continue
                if any(lease.annotator_id == annotator_id
                       for (iid, _), lease in self._leases.items() if iid == instance_id):
                    continue
                for slot in self._open_slots(instance_id):
                    lease_key = (instance_id, slot)
                    if lease_key in self._leases:
                        continue
                    expiry = now + self._lease_seconds
                    self._leases[lease_key] = Lease(instance_id, annotator_id, slot, expiry)
                    return self._task_view(instance_id, slot, expiry)
            return None

    def _task_view(self, instance_id: str, round: Round, expiry: float) -> TaskView:
        ins = self._instances[instance_id]
        captions = []
        if self._caption_lookup is not None:
            captions = [self._caption_lookup(ref) for ref in ins.image_refs]
        return TaskView(
            instance_id=instance_id,
            target=ins.target,
            round=round,
            lines=[{"author": u.author, "text": u.text} for u in ins.path],
            image_refs=list(ins.image_refs),
            captions=captions,
            lease_expiry=expiry,
        )

    def submit_label(
        self,
        annotator_id: str,
        instance_id: str,
        label: StanceLabel,
        vision_related: bool,
    ) -> AnnotationRecord:
        with self._lock:
            if instance_id not in self._instances:
                raise LeaseInvalid(f"unknown instance {instance_id!r}")
            if self._annotator_labeled(instance_id, annotator_id):
                raise AlreadyLabeled(
                    f"annotator {annotator_id!r} already labeled {instance_id!r}"
                )
            now = self._clock()
            self._purge_expired(now)
            lease = next(
                (l for (iid, _), l in self._leases.items()
                 if iid == instance_id and l.annotator_id == annotator_id),
                None,
            )
            if lease is None:
                raise LeaseInvalid(
                    f"no active lease for annotator {annotator_id!r} on {instance_id!r}"
                )
            record = AnnotationRecord(
                instance_id=instance_id,
                annotator_id=annotator_id,
                label=label,
                vision_related=vision_related,
                submitted_at=now,
                round=lease.round,
            )
            self._store_record(record)
            self._append_log(record)
            del self._leases[(instance_id, lease.round)]
            return record

    # -- reporting -----------------------------------------------------

    def gold_label(self, instance_id: str) -> Optional[StanceLabel]:
        try:
            return aggregate_gold(self._records[instance_id])
        except NeedsMoreAnnotators:
            return None

    def progress(self) -> dict:
        with self._lock:
            per_round = {r.value: 0 for r in Round}
            per_annotator: dict[str, int] = {}
            resolved = 0
            awaiting_tiebreak = 0
            unresolved_final: list[str] = []
            for instance_id in self._order:
                records = self._records[instance_id]
                for record in records:
                    per_round[record.round.value] += 1
                    per_annotator[record.annotator_id] = per_annotator.get(record.annotator_id, 0) + 1
                initial = [r for r in records if r.round in INITIAL_ROUNDS]
                if len(initial) < 2:
                    continue
                label = aggregate_gold(records)
                if label is not None:
                    resolved += 1
                elif needs_tiebreak(records):
                    awaiting_tiebreak += 1
                else:
                    unresolved_final.append(instance_id)
            return {
                "instances": len(self._order),
                "records_per_round": per_round,
                "per_annotator": per_annotator,
                "resolved": resolved,
                "awaiting_tiebreak": awaiting_tiebreak,
                "unresolved": unresolved_final,
                "active_leases": len(self._leases),
            }

    def agreement(self) -> AgreementReport:
        with self._lock:
            pairs_by_target: dict[str, list[tuple[StanceLabel, StanceLabel]]] = {}
            resolved = 0
            unresolved = 0
            for instance_id in self._order:
                records = self._records[instance_id]
                initial = sorted(
                    (r for r in records if r.round in INITIAL_ROUNDS),
                    key=lambda r: (r.round.value, r.submitted_at, r.annotator_id),
                )
                if len(initial) >= 2:
                    target = self._instances[instance_id].target
                    pairs_by_target.setdefault(target, []).append(
                        (initial[0].label, initial[1].label)
                    )
                    if aggregate_gold(records) is not None:
                        resolved += 1
                    else:
                        unresolved += 1
            kappas: dict[str, Optional[float]] = {}
            counted: dict[str, int] = {}
            for target, pairs in sorted(pairs_by_target.items()):
                eligible = [(a, b) for a, b in pairs if a in ELIGIBLE and b in ELIGIBLE]
                counted[target] = len(eligible)
                try:
                    kappas[target] = cohen_kappa(pairs)
                except Exception:
                    kappas[target] = None
            return AgreementReport(
                per_target_kappa=kappas,
                counted_pairs=counted,
                resolved=resolved,
                unresolved=unresolved,
            )

    # introspection used by the HTTP layer and tests
    def records_for(self, instance_id: str) -> list[AnnotationRecord]:
        with self._lock:
            return list(self._records[instance_id])

    @property
    def instance_count(self) -> int:
        return len(self._order)
