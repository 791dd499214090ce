"""Annotation records: one stance + vision-relevance judgment per annotator pass."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from stancebench.labels import StanceLabel


class Round(str, Enum):
    FIRST = "first"
    SECOND = "second"
    TIEBREAK = "tiebreak"

    @classmethod
    def parse(cls, value: str) -> "Round":
        return cls(value.lower())


INITIAL_ROUNDS = (Round.FIRST, Round.SECOND)


@dataclass(frozen=True)
class AnnotationRecord:
    instance_id: str
    annotator_id: str
    label: StanceLabel
    vision_related: bool
    submitted_at: float
    round: Round

    def to_dict(self) -> dict:
        return {
            "instance_id": self.instance_id,
            "annotator_id": self.annotator_id,
            "label": self.label.value,
            "vision_related": self.vision_related,
            "submitted_at": self.submitted_at,
            "round": self.round.value,
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "AnnotationRecord":
        return cls(
            instance_id=obj["instance_id"],
            annotator_id=obj["annotator_id"],
            label=StanceLabel.parse(obj["label"]),
            vision_related=bool(obj["vision_related"]),
            submitted_at=float(obj["submitted_at"]),
            round=Round.parse(obj["round"]),
        )
