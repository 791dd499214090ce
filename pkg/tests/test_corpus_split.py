import json

import numpy as np
import pytest

from stancebench.corpus.flatten import flatten_to_instances
from stancebench.corpus.models import TargetSpec
from stancebench.corpus.split import apply_split, split_corpus
from stancebench.errors import InsufficientThreads
from stancebench.labels import Split
from stancebench.synth import build_synthetic_threads

from conftest import make_instance


def corpus_of(n_threads: int, seed: int = 0):
    threads = build_synthetic_threads(n_threads, seed=seed, max_comments=130)
    instances = []
    for thread in threads:
        instances.extend(flatten_to_instances(thread, TargetSpec.named("tesla")))
    return instances


def shares(instances, assignment):
    counts = {Split.TRAIN: 0, Split.VAL: 0, Split.TEST: 0}
    for ins in instances:
        counts[assignment[ins.instance_id]] += 1
    total = sum(counts.values())
    return {s: c / total for s, c in counts.items()}


def test_shares_within_2_percent_on_200_threads():
    instances = corpus_of(200)
    assignment = split_corpus(instances, seed=42)
    share = shares(instances, assignment)
    assert abs(share[Split.TRAIN] - 0.70) <= 0.02
    assert abs(share[Split.VAL] - 0.15) <= 0.02
    assert abs(share[Split.TEST] - 0.15) <= 0.02


def test_same_seed_reproduces_byte_identical_assignment():
    instances = corpus_of(40)
    a = split_corpus(instances, seed=7)
    b = split_corpus(instances, seed=7)
    ser_a = json.dumps({k: v.value for k, v in sorted(a.items())})
    ser_b = json.dumps({k: v.value for k, v in sorted(b.items())})
    assert ser_a == ser_b
    c = split_corpus(instances, seed=8)
    assert any(a[k] != c[k] for k in a)


def test_thread_level_assignment():
    instances = corpus_of(10)
    assignment = split_corpus(instances, seed=1)
    by_thread = {}
    for ins in instances:
        by_thread.setdefault(ins.thread_key, set()).add(assignment[ins.instance_id])
    for splits in by_thread.values():
        assert len(splits) == 1


def test_partition_every_instance_exactly_once():
    instances = corpus_of(25)
    assignment = split_corpus(instances, seed=3)
    assert set(assignment) == {ins.instance_id for ins in instances}
    apply_split(instances, assignment)
    assert all(ins.split is not None for ins in instances)


def test_thread_disjointness_over_many_seeds():
    instances = corpus_of(50)
    rng = np.random.default_rng(0)
    for seed in rng.integers(0, 2**31, size=1000):
        assignment = split_corpus(instances, seed=int(seed))
        by_thread = {}
        for ins in instances:
            prev = by_thread.setdefault(ins.thread_key, assignment[ins.instance_id])
            assert prev == assignment[ins.instance_id]


def test_insufficient_threads():
    instances = [
        make_instance("a:1", target="tesla", thread_key="th-a"),
        make_instance("b:1", target="tesla", thread_key="th-b"),
    ]
    with pytest.raises(InsufficientThreads):
        split_corpus(instances, seed=0)


def test_bad_ratios_rejected():
    instances = corpus_of(5)
    with pytest.raises(ValueError):
        split_corpus(instances, ratios=(0.5, 0.2, 0.2), seed=0)


def test_per_target_independence():
    tesla = corpus_of(10, seed=1)
    threads = build_synthetic_threads(10, seed=2, target_hint="bitcoin")
    bitcoin = []
    for thread in threads:
        bitcoin.extend(flatten_to_instances(thread, TargetSpec.named("bitcoin")))
    assignment = split_corpus(tesla + bitcoin, seed=5)
    # each target split independently: both see all three splits
    for group in (tesla, bitcoin):
        seen = {assignment[ins.instance_id] for ins in group}
        assert seen == {Split.TRAIN, Split.VAL, Split.TEST}
