"""Flatten a kept thread into unlabeled stance instances, one per utterance.

Depths above MAX_DEPTH are excluded. For post-as-target instances the post
itself is the target and is never a labeled focus, so flattening starts at
depth 2 and the target field carries the full post text.
"""

from __future__ import annotations

from stancebench.corpus.models import ConversationThread, Instance, TargetSpec

MAX_DEPTH = 6


def flatten_to_instances(thread: ConversationThread, target_spec: TargetSpec) -> list[Instance]:
    min_depth = 2 if target_spec.is_post_target else 1
    target = thread.post.text if target_spec.is_post_target else (target_spec.name or "")

    instances: list[Instance] = []
    for utt in thread.utterances():
        if not (min_depth <= utt.depth <= MAX_DEPTH):
            continue
        path = thread.path_to(utt)
        instances.append(Instance(
            instance_id=f"{thread.thread_id}:{utt.id}",
            target=target,
            path=path,
            # Images attach to posts only, so every instance inherits the
            # thread-level refs.
            image_refs=list(thread.image_refs),
            depth=len(path),
        ))
    return instances
