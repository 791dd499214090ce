from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))  # make oracles importable

from stancebench.corpus.models import ConversationThread, Instance, Utterance
from stancebench.labels import StanceLabel


def make_thread(
    thread_id: str = "t1",
    post_words: int = 20,
    n_comments: int = 120,
    chain: bool = False,
    image_refs: tuple[str, ...] = ("images/a.png",),
    relevance: tuple[bool, bool] = (True, True),
    post_text: str | None = None,
) -> ConversationThread:
    """A filter-passing thread by default; chain=True makes one deep chain."""
    post = Utterance(id=f"{thread_id}/u0", author="op",
                     text=post_text if post_text is not None else "word " * (post_words - 1) + "word")
    comments = []
    prev = post.id
    for i in range(n_comments):
        parent = prev if chain else post.id
        utt = Utterance(id=f"{thread_id}/u{i+1}", author=f"user{i % 7}",
                        text=f"comment number {i} here", parent_id=parent)
        comments.append(utt)
        prev = utt.id
    thread = ConversationThread(
        thread_id=thread_id, target_hint="tesla", post=post, comments=comments,
        image_refs=list(image_refs), upvotes=100, reviewer_relevance=relevance,
    )
    # recompute depths the same way parsing does
    by_id = {u.id: u for u in thread.utterances()}
    for u in thread.utterances():
        depth, cur = 1, u
        while cur.parent_id is not None:
            cur = by_id[cur.parent_id]
            depth += 1
        u.depth = depth
    return thread


def make_instance(
    instance_id: str,
    gold: StanceLabel | None = None,
    target: str = "tesla",
    depth: int = 2,
    thread_key: str | None = None,
    vision_related: bool = False,
    focus_text: str = "some comment text",
) -> Instance:
    root_id = thread_key or f"{instance_id}-root"
    path = [Utterance(id=root_id, author="op", text="the post text", depth=1)]
    for level in range(2, depth + 1):
        path.append(Utterance(
            id=f"{instance_id}-u{level}", author=f"user{level}",
            text=focus_text if level == depth else "intermediate reply",
            parent_id=path[-1].id, depth=level,
        ))
    if depth == 1:
        path[0].text = focus_text if focus_text != "some comment text" else path[0].text
    return Instance(
        instance_id=instance_id, target=target, path=path, image_refs=[],
        gold=gold, vision_related=vision_related, depth=depth,
    )


@pytest.fixture
def tmp_data_dir(tmp_path):
    return tmp_path
