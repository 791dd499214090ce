import itertools

import pytest

from stancebench.annotation.records import AnnotationRecord, Round
from stancebench.annotation.vote import aggregate_gold, needs_tiebreak
from stancebench.errors import NeedsMoreAnnotators
from stancebench.labels import LABEL_ORDER, StanceLabel

from oracles import vote_oracle


def rec(label, round, annotator, at=0.0):
    return AnnotationRecord(
        instance_id="i1", annotator_id=annotator, label=label,
        vision_related=False, submitted_at=at, round=round,
    )


def records_for(first, second, tiebreak=None):
    records = [rec(first, Round.FIRST, "a1", 1.0), rec(second, Round.SECOND, "a2", 2.0)]
    if tiebreak is not None:
        records.append(rec(tiebreak, Round.TIEBREAK, "a3", 3.0))
    return records


def test_unanimous_pair():
    assert aggregate_gold(records_for(StanceLabel.FAVOR, StanceLabel.FAVOR)) == StanceLabel.FAVOR


def test_tiebreak_majority():
    result = aggregate_gold(
        records_for(StanceLabel.FAVOR, StanceLabel.AGAINST, StanceLabel.FAVOR))
    assert result == StanceLabel.FAVOR


def test_three_way_disagreement_unresolved():
    result = aggregate_gold(
        records_for(StanceLabel.FAVOR, StanceLabel.AGAINST, StanceLabel.NONE))
    assert result is None


def test_disagreeing_pair_without_tiebreak_pending():
    records = records_for(StanceLabel.FAVOR, StanceLabel.AGAINST)
    assert aggregate_gold(records) is None
    assert needs_tiebreak(records)


def test_needs_more_annotators():
    with pytest.raises(NeedsMoreAnnotators):
        aggregate_gold([rec(StanceLabel.FAVOR, Round.FIRST, "a1")])
    with pytest.raises(NeedsMoreAnnotators):
        aggregate_gold([])


def test_brute_force_two_record_combinations():
    for first, second in itertools.product(LABEL_ORDER, repeat=2):
        expected = vote_oracle([first, second])
        assert aggregate_gold(records_for(first, second)) == expected


def test_brute_force_three_record_combinations():
    for first, second, third in itertools.product(LABEL_ORDER, repeat=3):
        records = records_for(first, second, third)
        if first == second:
            # tie-break never happens after agreement; aggregation ignores it
            assert aggregate_gold(records_for(first, second)) == first
            continue
        expected = vote_oracle([first, second], third)
        assert aggregate_gold(records) == expected


def test_no_tiebreak_needed_after_agreement():
    assert not needs_tiebreak(records_for(StanceLabel.NONE, StanceLabel.NONE))
    assert not needs_tiebreak(
        records_for(StanceLabel.FAVOR, StanceLabel.AGAINST, StanceLabel.NONE))
