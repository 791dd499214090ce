"""Per-class F1 and the favor/against average that serves as the headline metric.

The none class is scored and reported but excluded from the average. Metrics
are computed in float64 and rounded half-up to two decimals only when a
report is rendered.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from typing import Optional, Sequence

from stancebench.corpus.models import Instance
from stancebench.corpus.stats import round_half_up
from stancebench.errors import PredictionGoldMismatch
from stancebench.fusion.matching import Prediction
from stancebench.labels import LABEL_ORDER, StanceLabel


@dataclass
class ConfusionCounts:
    tp: dict[StanceLabel, int] = field(default_factory=lambda: {l: 0 for l in LABEL_ORDER})
    fp: dict[StanceLabel, int] = field(default_factory=lambda: {l: 0 for l in LABEL_ORDER})
    fn: dict[StanceLabel, int] = field(default_factory=lambda: {l: 0 for l in LABEL_ORDER})

    @classmethod
    def from_pairs(cls, pairs: Sequence[tuple[StanceLabel, StanceLabel]]) -> "ConfusionCounts":
        """Build from (gold, predicted) pairs."""
        conf = cls()
        for gold, pred in pairs:
            if gold == pred:
                conf.tp[gold] += 1
            else:
                conf.fn[gold] += 1
                conf.fp[pred] += 1
        return conf

    @property
    def total(self) -> int:
        return sum(self.tp.values()) + sum(self.fn.values())


def f1_class(conf: ConfusionCounts, label: StanceLabel) -> float:
    """F1 as a percentage; 0 when the denominator vanishes."""
    denom = 2 * conf.tp[label] + conf.fp[label] + conf.fn[label]
    if denom == 0:
        return 0.0
    return 200.0 * conf.tp[label] / denom


def f1_avg(f1_against: float, f1_favor: float) -> float:
    if not (0.0 <= f1_against <= 100.0 and 0.0 <= f1_favor <= 100.0):
        raise ValueError(f"class F1 values must be percentages in [0, 100], "
                         f"got ({f1_against}, {f1_favor})")
    return (f1_against + f1_favor) / 2.0


@dataclass
class TargetReport:
    n: int
    f1_against: float
    f1_favor: float
    f1_none: float
    f1_avg: float


@dataclass
class EvalReport:
    n: int
    f1_against: float
    f1_favor: float
    f1_none: float
    f1_avg: float
    per_target: dict[str, TargetReport]
    confusion: ConfusionCounts

    def to_dict(self) -> dict:
        def fmt(v: float) -> float:
            return round_half_up(v)

        return {
            "n": self.n,
            "f1_against": fmt(self.f1_against),
            "f1_favor": fmt(self.f1_favor),
            "f1_none": fmt(self.f1_none),
            "f1_avg": fmt(self.f1_avg),
            "per_target": {
                t: {
                    "n": tr.n,
                    "f1_against": fmt(tr.f1_against),
                    "f1_favor": fmt(tr.f1_favor),
                    "f1_none": fmt(tr.f1_none),
                    "f1_avg": fmt(tr.f1_avg),
                }
                for t, tr in sorted(self.per_target.items())
            },
        }


def _report_from_pairs(pairs: Sequence[tuple[StanceLabel, StanceLabel]]) -> tuple[ConfusionCounts, dict]:
    conf = ConfusionCounts.from_pairs(pairs)
    against = f1_class(conf, StanceLabel.AGAINST)
    favor = f1_class(conf, StanceLabel.FAVOR)
    return conf, {
        "f1_against": against,
        "f1_favor": favor,
        "f1_none": f1_class(conf, StanceLabel.NONE),
        "f1_avg": f1_avg(against, favor),
    }


def evaluate(predictions: Sequence[Prediction], gold: Sequence[Instance]) -> EvalReport:
    """Score predictions against gold instances, matched by instance id.

    Every gold instance must be predicted and every prediction must have a
    gold instance; anything else is an error, never a silent drop.
    """
    gold_by_id = {ins.instance_id: ins for ins in gold}
    pred_by_id = {p.instance_id: p for p in predictions}
    missing = [iid for iid in gold_by_id if iid not in pred_by_id]
    extra = [iid for iid in pred_by_id if iid not in gold_by_id]
    if missing or extra:
        raise PredictionGoldMismatch(missing, extra)
    unjudged = [iid for iid, ins in gold_by_id.items() if ins.gold is None]
    if unjudged:
        raise ValueError(f"gold instances without labels: {sorted(unjudged)[:5]}")

    ordered = sorted(gold_by_id)
    pairs = [(gold_by_id[iid].gold, pred_by_id[iid].matched) for iid in ordered]
    conf, overall = _report_from_pairs(pairs)

    by_target: dict[str, list[tuple[StanceLabel, StanceLabel]]] = defaultdict(list)
    for iid in ordered:
        by_target[gold_by_id[iid].target].append(
            (gold_by_id[iid].gold, pred_by_id[iid].matched)
        )
    per_target = {}
    for target, target_pairs in sorted(by_target.items()):
        _, scores = _report_from_pairs(target_pairs)
        per_target[target] = TargetReport(n=len(target_pairs), **scores)

    return EvalReport(n=len(pairs), per_target=per_target, confusion=conf, **overall)
