import threading

import pytest

from stancebench.annotation.records import Round
from stancebench.annotation.store import AnnotationStore
from stancebench.errors import AlreadyLabeled, LeaseInvalid
from stancebench.labels import StanceLabel

from conftest import make_instance


class FakeClock:
    def __init__(self, start=1000.0):
        self.now = start

    def __call__(self):
        return self.now

    def advance(self, seconds):
        self.now += seconds


def store_with(n=3, tmp_path=None, clock=None, lease_seconds=1800.0):
    instances = [make_instance(f"i{k:03d}", target="tesla") for k in range(n)]
    return AnnotationStore(
        instances,
        log_path=(tmp_path / "annotations.jsonl") if tmp_path else None,
        lease_seconds=lease_seconds,
        clock=clock or FakeClock(),
    )


def test_fresh_store_serves_lowest_id_first_round():
    store = store_with(3)
    task = store.next_task("alice")
    assert task.instance_id == "i000"
    assert task.round == Round.FIRST


def test_task_view_contains_full_path():
    store = store_with(1)
    task = store.next_task("alice")
    assert len(task.lines) == 2  # post + focus comment
    assert task.lines[0]["author"] == "op"


def test_submit_happy_path_releases_lease(tmp_path):
    clock = FakeClock()
    store = store_with(1, tmp_path=tmp_path, clock=clock)
    task = store.next_task("alice")
    record = store.submit_label("alice", task.instance_id, StanceLabel.FAVOR, True)
    assert record.round == Round.FIRST
    assert store.progress()["active_leases"] == 0


def test_submit_without_lease_invalid():
    store = store_with(1)
    with pytest.raises(LeaseInvalid):
        store.submit_label("alice", "i000", StanceLabel.FAVOR, False)


def test_submit_after_expiry_invalid():
    clock = FakeClock()
    store = store_with(1, clock=clock, lease_seconds=60.0)
    task = store.next_task("alice")
    clock.advance(61.0)
    with pytest.raises(LeaseInvalid):
        store.submit_label("alice", task.instance_id, StanceLabel.FAVOR, False)


def test_duplicate_submission_rejected():
    store = store_with(2)
    task = store.next_task("alice")
    store.submit_label("alice", task.instance_id, StanceLabel.FAVOR, False)
    # second attempt on the same instance, regardless of lease state
    with pytest.raises(AlreadyLabeled):
        store.submit_label("alice", task.instance_id, StanceLabel.FAVOR, False)


def test_annotator_never_offered_instance_twice():
    store = store_with(1)
    task = store.next_task("alice")
    store.submit_label("alice", task.instance_id, StanceLabel.FAVOR, False)
    assert store.next_task("alice") is None


def test_tiebreak_offered_only_to_third_annotator():
    store = store_with(1)
    t1 = store.next_task("alice")
    store.submit_label("alice", t1.instance_id, StanceLabel.FAVOR, False)
    t2 = store.next_task("bob")
    store.submit_label("bob", t2.instance_id, StanceLabel.AGAINST, False)

    assert store.next_task("alice") is None
    assert store.next_task("bob") is None
    t3 = store.next_task("carol")
    assert t3 is not None
    assert t3.round == Round.TIEBREAK
    store.submit_label("carol", t3.instance_id, StanceLabel.FAVOR, False)
    assert store.gold_label("i000") == StanceLabel.FAVOR


def test_agreement_and_resolution_flow():
    store = store_with(2)
    for annotator, label0, label1 in (
        ("alice", StanceLabel.FAVOR, StanceLabel.AGAINST),
        ("bob", StanceLabel.FAVOR, StanceLabel.FAVOR),
    ):
        task = store.next_task(annotator)
        store.submit_label(annotator, task.instance_id, label0, False)
        task = store.next_task(annotator)
        store.submit_label(annotator, task.instance_id, label1, False)
    progress = store.progress()
    assert progress["resolved"] == 1
    assert progress["awaiting_tiebreak"] == 1
    report = store.agreement()
    assert report.counted_pairs["tesla"] == 2
    assert report.resolved == 1 and report.unresolved == 1


def test_expired_lease_regranted():
    clock = FakeClock()
    store = store_with(1, clock=clock, lease_seconds=60.0)
    store.next_task("alice")
    clock.advance(61.0)
    task = store.next_task("bob")
    assert task is not None and task.round == Round.FIRST


def test_persistence_replay(tmp_path):
    clock = FakeClock()
    store = store_with(2, tmp_path=tmp_path, clock=clock)
    task = store.next_task("alice")
    store.submit_label("alice", task.instance_id, StanceLabel.NONE, True)

    reloaded = AnnotationStore(
        [make_instance(f"i{k:03d}", target="tesla") for k in range(2)],
        log_path=tmp_path / "annotations.jsonl",
        clock=clock,
    )
    records = reloaded.records_for(task.instance_id)
    assert len(records) == 1
    assert records[0].label == StanceLabel.NONE
    assert records[0].vision_related is True
    # replayed record blocks re-annotation by the same annotator
    next_for_alice = reloaded.next_task("alice")
    assert next_for_alice is None or next_for_alice.instance_id != task.instance_id


def test_concurrent_hammering_no_double_assignment():
    store = store_with(40)
    grants: list[tuple[str, str, Round]] = []
    lock = threading.Lock()

    def worker(name):
        while True:
            task = store.next_task(name)
            if task is None:
                return
            with lock:
                grants.append((task.instance_id, name, task.round))
            store.submit_label(name, task.instance_id, StanceLabel.FAVOR, False)

    threads = [threading.Thread(target=worker, args=(f"w{i}",)) for i in range(16)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()

    seen = set()
    for instance_id, _, round_ in grants:
        key = (instance_id, round_)
        assert key not in seen, f"double assignment of {key}"
        seen.add(key)
    # every instance got exactly its two initial rounds (all agree, no tiebreaks)
    assert len(grants) == 80
