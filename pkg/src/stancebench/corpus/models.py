"""Core corpus data model: utterances, threads, labeled instances, statistics."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Literal, Optional

from stancebench.labels import StanceLabel, Split


def word_count(text: str) -> int:
    """Whitespace-delimited token count."""
    return len(text.split())


@dataclass
class Utterance:
    id: str
    author: str
    text: str
    parent_id: Optional[str] = None
    depth: int = 1

    @property
    def is_post(self) -> bool:
        return self.parent_id is None

    def word_count(self) -> int:
        return word_count(self.text)


@dataclass
class ConversationThread:
    thread_id: str
    target_hint: str
    post: Utterance
    comments: list[Utterance]
    image_refs: list[str]
    upvotes: int = 0
    reviewer_relevance: tuple[bool, bool] = (True, True)

    def utterances(self) -> Iterator[Utterance]:
        yield self.post
        yield from self.comments

    def utterance_by_id(self, utterance_id: str) -> Utterance:
        for utt in self.utterances():
            if utt.id == utterance_id:
                return utt
        raise KeyError(utterance_id)

    def path_to(self, utterance: Utterance) -> list[Utterance]:
        """Root-to-node chain for an utterance in this thread."""
        by_id = {u.id: u for u in self.utterances()}
        chain = [utterance]
        while chain[-1].parent_id is not None:
            chain.append(by_id[chain[-1].parent_id])
        chain.reverse()
        return chain


@dataclass(frozen=True)
class TargetSpec:
    """What the stance is measured against: a named entity, or the post itself."""

    kind: Literal["named", "post"]
    name: Optional[str] = None

    @classmethod
    def named(cls, name: str) -> "TargetSpec":
        return cls(kind="named", name=name)

    @classmethod
    def post(cls) -> "TargetSpec":
        return cls(kind="post")

    @property
    def is_post_target(self) -> bool:
        return self.kind == "post"


@dataclass
class Instance:
    """One labeled example: a root-to-comment path judged against a target."""

    instance_id: str
    target: str
    path: list[Utterance]
    image_refs: list[str]
    gold: Optional[StanceLabel] = None
    vision_related: Optional[bool] = None
    depth: int = 0
    split: Optional[Split] = None

    def __post_init__(self) -> None:
        if self.depth == 0:
            self.depth = len(self.path)

    @property
    def focus(self) -> Utterance:
        return self.path[-1]

    @property
    def thread_key(self) -> str:
        """Identifier shared by all instances of one thread (the root post id)."""
        return self.path[0].id

    @property
    def is_post_target(self) -> bool:
        return self.target == self.path[0].text


# Reserved group name for instances whose stance target is their own post.
POST_TARGET_GROUP = "post-t"


def target_group(ins: "Instance") -> str:
    """Grouping key for statistics and protocol selection. Named targets carry
    their name; post-target instances carry the full post text as their
    target, so they all fall under the reserved post-target group."""
    return POST_TARGET_GROUP if ins.is_post_target else ins.target


@dataclass
class TargetStats:
    total: int
    label_counts: dict[StanceLabel, int]
    label_fractions: dict[StanceLabel, float]
    label_percents: dict[StanceLabel, float]  # half-up, 2 decimals
    vision_count: int
    vision_fraction: float
    vision_percent: float


@dataclass
class DepthStats:
    count: int
    mean_word_count: float


@dataclass
class CorpusStats:
    total: int
    per_target: dict[str, TargetStats]
    per_depth: dict[int, DepthStats]
    flags: list[str] = field(default_factory=list)
