"""Paired bootstrap over the favor/against F1 average.

Tests the hypothesis "system A is better than system B": resample instances
with replacement, score both systems on each resample, and report the
fraction of resamples where A fails to beat B. Deterministic under a fixed
seed and invariant to the order predictions are supplied in.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from stancebench.corpus.models import Instance
from stancebench.errors import PredictionGoldMismatch
from stancebench.evaluation.metrics import ConfusionCounts, f1_avg, f1_class
from stancebench.fusion.matching import Prediction
from stancebench.labels import StanceLabel


@dataclass
class SignificanceResult:
    observed_delta: float  # F1-avg(A) - F1-avg(B) on the full set
    p_value: float
    resamples: int
    seed: int

    def to_dict(self) -> dict:
        return {
            "observed_delta": self.observed_delta,
            "p_value": self.p_value,
            "resamples": self.resamples,
            "seed": self.seed,
        }


def _f1_avg_of(gold: np.ndarray, pred: np.ndarray) -> float:
    pairs = list(zip(gold.tolist(), pred.tolist()))
    conf = ConfusionCounts.from_pairs(pairs)
    return f1_avg(f1_class(conf, StanceLabel.AGAINST), f1_class(conf, StanceLabel.FAVOR))


def paired_bootstrap(
    preds_a: Sequence[Prediction],
    preds_b: Sequence[Prediction],
    gold: Sequence[Instance],
    resamples: int = 1000,
    seed: int = 0,
) -> SignificanceResult:
    if resamples < 100:
        raise ValueError(f"need at least 100 resamples, got {resamples}")
    gold_by_id = {ins.instance_id: ins for ins in gold}
    a_by_id = {p.instance_id: p for p in preds_a}
    b_by_id = {p.instance_id: p for p in preds_b}
    for by_id in (a_by_id, b_by_id):
        missing = [iid for iid in gold_by_id if iid not in by_id]
        extra = [iid for iid in by_id if iid not in gold_by_id]
        if missing or extra:
            raise PredictionGoldMismatch(missing, extra)

    ids = sorted(gold_by_id)
    gold_arr = np.array([gold_by_id[iid].gold for iid in ids], dtype=object)
    a_arr = np.array([a_by_id[iid].matched for iid in ids], dtype=object)
    b_arr = np.array([b_by_id[iid].matched for iid in ids], dtype=object)

    observed = _f1_avg_of(gold_arr, a_arr) - _f1_avg_of(gold_arr, b_arr)

    rng = np.random.default_rng(seed)
    n = len(ids)
    not_better = 0
    for _ in range(resamples):
        idx = rng.integers(0, n, size=n)
        if _f1_avg_of(gold_arr[idx], a_arr[idx]) <= _f1_avg_of(gold_arr[idx], b_arr[idx]):
            not_better += 1
    return SignificanceResult(
        observed_delta=observed,
        p_value=not_better / resamples,
        resamples=resamples,
        seed=seed,
    )
