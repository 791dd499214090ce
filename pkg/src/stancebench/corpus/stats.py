"""Corpus statistics: per-target label distribution, vision relevance, depth profile."""

from __future__ import annotations

from collections import Counter, defaultdict
from decimal import ROUND_HALF_UP, Decimal
from typing import Iterable, Sequence

from stancebench.corpus.models import CorpusStats, DepthStats, Instance, TargetStats, target_group
from stancebench.errors import EmptyCorpus
from stancebench.labels import LABEL_ORDER, StanceLabel


def round_half_up(value: float, decimals: int = 2) -> float:
    """Half-up rounding used everywhere a percentage is rendered.

    Values are first quantized at 9 decimals so that f64 representation noise
    (e.g. a mean of published 2-decimal figures landing at 64.88499999999999)
    still rounds like its exact decimal counterpart."""
    snapped = Decimal(repr(value)).quantize(Decimal("1e-9"), rounding=ROUND_HALF_UP)
    q = Decimal(10) ** -decimals
    return float(snapped.quantize(q, rounding=ROUND_HALF_UP))


def compute_corpus_stats(instances: Sequence[Instance]) -> CorpusStats:
    if not instances:
        raise EmptyCorpus("cannot compute statistics of an empty corpus")
    missing = [ins.instance_id for ins in instances if ins.gold is None]
    if missing:
        raise ValueError(f"{len(missing)} instance(s) lack gold labels, e.g. {missing[:3]}")

    by_target: dict[str, list[Instance]] = defaultdict(list)
    for ins in instances:
        by_target[target_group(ins)].append(ins)

    per_target: dict[str, TargetStats] = {}
    for target in sorted(by_target):
        group = by_target[target]
        total = len(group)
        counts = Counter(ins.gold for ins in group)
        label_counts = {label: counts.get(label, 0) for label in LABEL_ORDER}
        fractions = {label: label_counts[label] / total for label in LABEL_ORDER}
        percents = {label: round_half_up(100.0 * fractions[label]) for label in LABEL_ORDER}
        vision_count = sum(1 for ins in group if ins.vision_related)
        per_target[target] = TargetStats(
            total=total,
            label_counts=label_counts,
            label_fractions=fractions,
            label_percents=percents,
            vision_count=vision_count,
            vision_fraction=vision_count / total,
            vision_percent=round_half_up(100.0 * vision_count / total),
        )

    depth_groups: dict[int, list[Instance]] = defaultdict(list)
    for ins in instances:
        depth_groups[ins.depth].append(ins)
    per_depth = {
        depth: DepthStats(
            count=len(group),
            mean_word_count=sum(ins.focus.word_count() for ins in group) / len(group),
        )
        for depth, group in sorted(depth_groups.items())
    }

    return CorpusStats(total=len(instances), per_target=per_target, per_depth=per_depth)


def stats_to_dict(stats: CorpusStats) -> dict:
    return {
        "total": stats.total,
        "per_target": {
            target: {
                "total": ts.total,
                "labels": {
                    label.value: {
                        "count": ts.label_counts[label],
                        "percent": ts.label_percents[label],
                    }
                    for label in LABEL_ORDER
                },
                "vision_related": {"count": ts.vision_count, "percent": ts.vision_percent},
            }
            for target, ts in stats.per_target.items()
        },
        "per_depth": {
            str(depth): {"count": ds.count, "mean_word_count": round_half_up(ds.mean_word_count)}
            for depth, ds in stats.per_depth.items()
        },
        "flags": list(stats.flags),
    }
