"""Depth-bucketed scoring.

Named targets bucket test instances as depths {1}, {2-4}, {5-6}; when the
post itself is the target there is no depth-1 instance, so the buckets are
{2}, {3-4}, {5-6}.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Sequence

from stancebench.corpus.models import Instance
from stancebench.corpus.stats import round_half_up
from stancebench.errors import DepthOutOfRange, PredictionGoldMismatch
from stancebench.evaluation.metrics import ConfusionCounts, f1_avg, f1_class
from stancebench.fusion.matching import Prediction
from stancebench.labels import StanceLabel


class TargetKind(str, Enum):
    NAMED = "named"
    POST = "post"


BUCKETS: dict[TargetKind, list[tuple[str, range]]] = {
    TargetKind.NAMED: [("1", range(1, 2)), ("2-4", range(2, 5)), ("5-6", range(5, 7))],
    TargetKind.POST: [("2", range(2, 3)), ("3-4", range(3, 5)), ("5-6", range(5, 7))],
}


@dataclass
class BucketReport:
    n: int
    f1_avg: float


@dataclass
class DepthBucketReport:
    target_kind: TargetKind
    buckets: dict[str, BucketReport]

    def to_dict(self) -> dict:
        return {
            "target_kind": self.target_kind.value,
            "buckets": {
                name: {"n": b.n, "f1_avg": round_half_up(b.f1_avg)}
                for name, b in self.buckets.items()
            },
        }


def depth_bucket_report(
    predictions: Sequence[Prediction],
    gold: Sequence[Instance],
    target_kind: TargetKind,
) -> DepthBucketReport:
    gold_by_id = {ins.instance_id: ins for ins in gold}
    pred_by_id = {p.instance_id: p for p in predictions}
    missing = [iid for iid in gold_by_id if iid not in pred_by_id]
    extra = [iid for iid in pred_by_id if iid not in gold_by_id]
    if missing or extra:
        raise PredictionGoldMismatch(missing, extra)

    buckets = BUCKETS[target_kind]
    valid_depths = {d for _, depth_range in buckets for d in depth_range}
    pairs_per_bucket: dict[str, list] = {name: [] for name, _ in buckets}
    for iid in sorted(gold_by_id):
        ins = gold_by_id[iid]
        if ins.depth not in valid_depths:
            raise DepthOutOfRange(
                f"instance {iid!r} has depth {ins.depth}, outside the "
                f"{target_kind.value}-target bucket range"
            )
        for name, depth_range in buckets:
            if ins.depth in depth_range:
                pairs_per_bucket[name].append((ins.gold, pred_by_id[iid].matched))
                break

    reports = {}
    for name, _ in buckets:
        pairs = pairs_per_bucket[name]
        conf = ConfusionCounts.from_pairs(pairs)
        reports[name] = BucketReport(
            n=len(pairs),
            f1_avg=f1_avg(f1_class(conf, StanceLabel.AGAINST), f1_class(conf, StanceLabel.FAVOR)),
        )
    return DepthBucketReport(target_kind=target_kind, buckets=reports)
