"""Gold-label aggregation: majority vote with a third-annotator tie-break.

``aggregate_gold`` returns the resolved label, or None while the instance is
unresolved — either still awaiting its tie-break pass, or finally unresolved
because all three annotators chose different labels.
"""

from __future__ import annotations

from typing import Optional, Sequence

from stancebench.annotation.records import INITIAL_ROUNDS, AnnotationRecord, Round
from stancebench.errors import NeedsMoreAnnotators
from stancebench.labels import StanceLabel


def _initial_pair(records: Sequence[AnnotationRecord]) -> list[AnnotationRecord]:
    initial = sorted(
        (r for r in records if r.round in INITIAL_ROUNDS),
        key=lambda r: (r.round.value, r.submitted_at, r.annotator_id),
    )
    if len(initial) < 2:
        raise NeedsMoreAnnotators(
            f"need 2 initial annotations, have {len(initial)}"
        )
    return initial[:2]


def aggregate_gold(records: Sequence[AnnotationRecord]) -> Optional[StanceLabel]:
    first, second = _initial_pair(records)
    if first.label == second.label:
        return first.label

    tiebreaks = [r for r in records if r.round == Round.TIEBREAK]
    if not tiebreaks:
        return None  # awaiting tie-break
    votes = [first.label, second.label, tiebreaks[0].label]
    for label in votes:
        if votes.count(label) >= 2:
            return label
    return None  # three-way disagreement: unresolved


def needs_tiebreak(records: Sequence[AnnotationRecord]) -> bool:
    """True when the two initial annotations disagree and no tie-break exists yet."""
    initial = [r for r in records if r.round in INITIAL_ROUNDS]
    if len(initial) < 2:
        return False
    first, second = _initial_pair(records)
    has_tiebreak = any(r.round == Round.TIEBREAK for r in records)
    return first.label != second.label and not has_tiebreak
