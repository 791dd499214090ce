"""
Annotation store, majority vote and agreement
=============================================

Three annotators work through a tiny task queue: two initial passes per
instance, a tie-break where they disagree, then gold aggregation and
Cohen's kappa over the favor/against pairs.
"""

from stancebench.annotation import AnnotationStore, cohen_kappa
from stancebench.corpus.models import Instance, Utterance
from stancebench.labels import StanceLabel

F, A, N = StanceLabel.FAVOR, StanceLabel.AGAINST, StanceLabel.NONE


def instance(k: int) -> Instance:
    path = [
        Utterance(id=f"p{k}", author="op", text=f"post number {k}", depth=1),
        Utterance(id=f"c{k}", author="u2", text=f"comment {k}", parent_id=f"p{k}", depth=2),
    ]
    return Instance(instance_id=f"i{k:02d}", target="tesla", path=path,
                    image_refs=[], depth=2)


store = AnnotationStore([instance(k) for k in range(4)])

# the two initial annotators disagree on every other instance
plans = {"ann1": [F, F, A, N], "ann2": [F, A, A, F]}
for annotator, labels in plans.items():
    for label in labels:
        task = store.next_task(annotator)
        store.submit_label(annotator, task.instance_id, label, vision_related=False)
        print(f"{annotator} labeled {task.instance_id} ({task.round.value}): {label.value}")

print("\nprogress:", {k: v for k, v in store.progress().items()
                      if k in ("resolved", "awaiting_tiebreak")})

# a third annotator resolves the disputes
while (task := store.next_task("ann3")) is not None:
    store.submit_label("ann3", task.instance_id, F, vision_related=True)
    print(f"ann3 tie-broke {task.instance_id}: favor")

print("\ngold labels:")
for k in range(4):
    label = store.gold_label(f"i{k:02d}")
    print(f"  i{k:02d}: {label.value if label else 'unresolved'}")

report = store.agreement()
print("\nagreement report:", report.to_dict())

# kappa directly on a hand-built contingency table: p_o=0.8, p_e=0.5 -> 0.6
pairs = [(F, F)] * 40 + [(F, A)] * 10 + [(A, F)] * 10 + [(A, A)] * 40
print("hand-checkable kappa:", cohen_kappa(pairs))
