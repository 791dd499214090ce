"""Deterministic thread-level train/val/test splitting.

Instances from one thread always share a split (paths within a thread overlap
textually, so instance-level splits would leak). Within each target the
thread order is shuffled by the seed, then each thread goes to the split
whose instance count is furthest below its quota, which keeps every split
within one thread-size of its exact ratio.
"""

from __future__ import annotations

import hashlib
from collections import defaultdict
from typing import Sequence

import numpy as np

from stancebench.corpus.models import Instance
from stancebench.errors import InsufficientThreads
from stancebench.labels import Split

DEFAULT_RATIOS = (0.70, 0.15, 0.15)
_SPLIT_ORDER = (Split.TRAIN, Split.VAL, Split.TEST)


def _target_rng(seed: int, target: str) -> np.random.Generator:
    digest = int.from_bytes(hashlib.sha256(target.encode("utf-8")).digest()[:8], "big")
    return np.random.default_rng([seed, digest])


def split_corpus(
    instances: Sequence[Instance],
    ratios: tuple[float, float, float] = DEFAULT_RATIOS,
    seed: int = 0,
) -> dict[str, Split]:
    """Return a mapping instance_id -> split. Deterministic for a fixed seed."""
    if abs(sum(ratios) - 1.0) > 1e-9:
        raise ValueError(f"split ratios must sum to 1, got {ratios}")

    by_target: dict[str, dict[str, list[Instance]]] = defaultdict(lambda: defaultdict(list))
    for ins in instances:
        by_target[ins.target][ins.thread_key].append(ins)

    assignment: dict[str, Split] = {}
    for target in sorted(by_target):
        threads = by_target[target]
        if len(threads) < 3:
            raise InsufficientThreads(target, len(threads))

        rng = _target_rng(seed, target)
        thread_keys = sorted(threads)
        order = [thread_keys[i] for i in rng.permutation(len(thread_keys))]

        total = sum(len(group) for group in threads.values())
        counts = {s: 0 for s in _SPLIT_ORDER}
        for key in order:
            size = len(threads[key])
            deficits = [ratios[i] * total - counts[s] for i, s in enumerate(_SPLIT_ORDER)]
            chosen = _SPLIT_ORDER[int(np.argmax(deficits))]
            counts[chosen] += size
            for ins in threads[key]:
                assignment[ins.instance_id] = chosen
    return assignment


def apply_split(instances: Sequence[Instance], assignment: dict[str, Split]) -> None:
    for ins in instances:
        ins.split = assignment[ins.instance_id]
