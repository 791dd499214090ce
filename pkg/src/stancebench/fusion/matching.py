"""Map generated text onto a stance label.

Three deterministic stages: exact whole-word hit (earliest occurrence wins),
then minimum edit distance from any whitespace token to a label word (ties
broken by the fixed label order), and finally a fallback to "none" for empty
output. Total: every string maps to a label.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum

from stancebench.labels import LABEL_ORDER, StanceLabel


class MatchMethod(str, Enum):
    EXACT = "exact"
    EDIT_DISTANCE = "edit_distance"
    FALLBACK = "fallback"


@dataclass
class Prediction:
    generated_text: str
    matched: StanceLabel
    match_method: MatchMethod
    instance_id: str = ""

    def to_dict(self) -> dict:
        return {
            "instance_id": self.instance_id,
            "generated_text": self.generated_text,
            "matched": self.matched.value,
            "match_method": self.match_method.value,
        }


_WORD_PATTERNS = {
    label: re.compile(rf"\b{label.value}\b") for label in LABEL_ORDER
}


def levenshtein(a: str, b: str) -> int:
    if len(a) < len(b):
        a, b = b, a
    previous = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        current = [i]
        for j, cb in enumerate(b, start=1):
            current.append(min(
                previous[j] + 1,
                current[j - 1] + 1,
                previous[j - 1] + (ca != cb),
            ))
        previous = current
    return previous[-1]


def match_label(generated_text: str, instance_id: str = "") -> Prediction:
    lowered = generated_text.lower()

    hits = []
    for label in LABEL_ORDER:
        m = _WORD_PATTERNS[label].search(lowered)
        if m:
            hits.append((m.start(), label))
    if hits:
        hits.sort(key=lambda item: item[0])
        return Prediction(generated_text, hits[0][1], MatchMethod.EXACT, instance_id)

    tokens = lowered.split()
    if tokens:
        best = min(
            (levenshtein(token, label.value), order, label)
            for token in tokens
            for order, label in enumerate(LABEL_ORDER)
        )
        return Prediction(generated_text, best[2], MatchMethod.EDIT_DISTANCE, instance_id)

    return Prediction(generated_text, StanceLabel.NONE, MatchMethod.FALLBACK, instance_id)
