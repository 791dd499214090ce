"""Stance labels and split names with their canonical serialized forms."""

from __future__ import annotations

from enum import Enum


class StanceLabel(str, Enum):
    AGAINST = "against"
    FAVOR = "favor"
    NONE = "none"

    @classmethod
    def parse(cls, value: str) -> "StanceLabel":
        try:
            return cls(value.lower())
        except ValueError:
            raise ValueError(f"unknown stance label {value!r}; expected one of "
                             f"{[m.value for m in cls]}") from None


# Fixed label order used for deterministic tie-breaking and report columns.
LABEL_ORDER: tuple[StanceLabel, ...] = (StanceLabel.AGAINST, StanceLabel.FAVOR, StanceLabel.NONE)


class Split(str, Enum):
    TRAIN = "train"
    VAL = "val"
    TEST = "test"

    @classmethod
    def parse(cls, value: str) -> "Split":
        try:
            return cls(value.lower())
        except ValueError:
            raise ValueError(f"unknown split {value!r}") from None
