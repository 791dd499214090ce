"""Ingest thread dumps: JSONL, one conversation thread per line.

Wire schema per line:
    {thread_id, target_hint, upvotes, reviewer_relevance:[bool,bool],
     image_refs:[string], utterances:[{id, author, text, parent_id|null}]}

Depths are always recomputed from the parent chains, never trusted from input.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

from stancebench.corpus.models import ConversationThread, Utterance
from stancebench.errors import CycleDetected, DanglingParent, MalformedLine


def parse_thread_file(path: str | Path) -> list[ConversationThread]:
    threads: list[ConversationThread] = []
    with open(path, "r", encoding="utf-8") as fh:
        for line_number, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise MalformedLine(line_number, f"invalid JSON ({exc.msg})") from exc
            threads.append(parse_thread_obj(obj, line_number=line_number))
    return threads


def parse_thread_obj(obj: dict[str, Any], line_number: int = 0) -> ConversationThread:
    """Build a tree-validated thread from one decoded JSON object."""
    try:
        thread_id = str(obj["thread_id"])
        raw_utts = obj["utterances"]
        target_hint = str(obj.get("target_hint", ""))
        upvotes = int(obj.get("upvotes", 0))
        relevance = obj.get("reviewer_relevance", [True, True])
        image_refs = [str(r) for r in obj.get("image_refs", [])]
    except (KeyError, TypeError) as exc:
        raise MalformedLine(line_number, f"missing or malformed field: {exc}") from exc
    if not isinstance(raw_utts, list) or not raw_utts:
        raise MalformedLine(line_number, f"thread {thread_id!r} has no utterances")
    if not (isinstance(relevance, (list, tuple)) and len(relevance) == 2):
        raise MalformedLine(line_number, f"thread {thread_id!r}: reviewer_relevance must be a pair")

    utterances: list[Utterance] = []
    for raw in raw_utts:
        try:
            utterances.append(Utterance(
                id=str(raw["id"]),
                author=str(raw["author"]),
                text=str(raw["text"]),
                parent_id=None if raw.get("parent_id") is None else str(raw["parent_id"]),
            ))
        except (KeyError, TypeError) as exc:
            raise MalformedLine(line_number, f"malformed utterance in thread {thread_id!r}: {exc}") from exc

    by_id: dict[str, Utterance] = {}
    for utt in utterances:
        if utt.id in by_id:
            raise MalformedLine(line_number, f"duplicate utterance id {utt.id!r} in thread {thread_id!r}")
        by_id[utt.id] = utt

    roots = [u for u in utterances if u.parent_id is None]
    if len(roots) != 1:
        raise MalformedLine(
            line_number,
            f"thread {thread_id!r} must have exactly one root utterance, found {len(roots)}",
        )
    post = roots[0]

    for utt in utterances:
        if utt.parent_id is not None and utt.parent_id not in by_id:
            raise DanglingParent(utt.id, utt.parent_id)

    # Recompute depths by walking parent chains; a chain that never reaches
    # the root within len(utterances) steps has looped.
    depths: dict[str, int] = {post.id: 1}
    for utt in utterances:
        chain = []
        cur = utt
        while cur.id not in depths:
            chain.append(cur)
            if len(chain) > len(utterances):
                raise CycleDetected(thread_id)
            cur = by_id[cur.parent_id]  # type: ignore[index]
        base = depths[cur.id]
        for offset, node in enumerate(reversed(chain), start=1):
            depths[node.id] = base + offset
    for utt in utterances:
        utt.depth = depths[utt.id]

    comments = [u for u in utterances if u is not post]
    return ConversationThread(
        thread_id=thread_id,
        target_hint=target_hint,
        post=post,
        comments=comments,
        image_refs=image_refs,
        upvotes=upvotes,
        reviewer_relevance=(bool(relevance[0]), bool(relevance[1])),
    )
