"""JSONL serialization for threads and instances.

Instance lines:
    {instance_id, target, path:[utterance ids], text_path:[strings],
     author_path:[strings], image_refs, gold|null, vision_related|null,
     depth, split|null}
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Iterable, Sequence

from stancebench.corpus.models import ConversationThread, Instance, Utterance
from stancebench.errors import MalformedLine
from stancebench.labels import Split, StanceLabel


def instance_to_dict(ins: Instance) -> dict:
    return {
        "instance_id": ins.instance_id,
        "target": ins.target,
        "path": [u.id for u in ins.path],
        "text_path": [u.text for u in ins.path],
        "author_path": [u.author for u in ins.path],
        "image_refs": list(ins.image_refs),
        "gold": ins.gold.value if ins.gold is not None else None,
        "vision_related": ins.vision_related,
        "depth": ins.depth,
        "split": ins.split.value if ins.split is not None else None,
    }


def instance_from_dict(obj: dict) -> Instance:
    ids, texts, authors = obj["path"], obj["text_path"], obj["author_path"]
    if not (len(ids) == len(texts) == len(authors)) or not ids:
        raise ValueError(f"instance {obj.get('instance_id')!r}: inconsistent path arrays")
    path = [
        Utterance(
            id=ids[i],
            author=authors[i],
            text=texts[i],
            parent_id=None if i == 0 else ids[i - 1],
            depth=i + 1,
        )
        for i in range(len(ids))
    ]
    return Instance(
        instance_id=obj["instance_id"],
        target=obj["target"],
        path=path,
        image_refs=list(obj.get("image_refs", [])),
        gold=None if obj.get("gold") is None else StanceLabel.parse(obj["gold"]),
        vision_related=obj.get("vision_related"),
        depth=obj["depth"],
        split=None if obj.get("split") is None else Split.parse(obj["split"]),
    )


def write_instances(instances: Sequence[Instance], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for ins in instances:
            fh.write(json.dumps(instance_to_dict(ins), ensure_ascii=False, sort_keys=True) + "\n")


def read_instances(path: str | Path) -> list[Instance]:
    instances = []
    with open(path, "r", encoding="utf-8") as fh:
        for line_number, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                instances.append(instance_from_dict(json.loads(line)))
            except (json.JSONDecodeError, KeyError, ValueError) as exc:
                raise MalformedLine(line_number, str(exc)) from exc
    return instances


def thread_to_dict(thread: ConversationThread) -> dict:
    return {
        "thread_id": thread.thread_id,
        "target_hint": thread.target_hint,
        "upvotes": thread.upvotes,
        "reviewer_relevance": list(thread.reviewer_relevance),
        "image_refs": list(thread.image_refs),
        "utterances": [
            {"id": u.id, "author": u.author, "text": u.text, "parent_id": u.parent_id}
            for u in thread.utterances()
        ],
    }


def write_threads(threads: Iterable[ConversationThread], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for thread in threads:
            fh.write(json.dumps(thread_to_dict(thread), ensure_ascii=False, sort_keys=True) + "\n")
